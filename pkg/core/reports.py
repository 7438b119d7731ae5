"""
Reports Module

The result of one command: verdicts, witnesses and violations in a fixed
field order. JSON is the machine interface; the text block is for people
and for golden files, so neither carries anything run-dependent unless
timing was requested.
"""

import json
from typing import Any, Dict, List, Optional

from colorama import Fore, Style
from pydantic import BaseModel, Field

# verdict values that get a pass/fail marker on a terminal
_PASSING = {"pass", "holds", "proved", "yes", "equal_at_depth", "in"}
_FAILING = {"fail", "refuted", "no", "distinct", "out"}


class Report(BaseModel):
    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    verdicts: Dict[str, str] = Field(default_factory=dict)
    witnesses: List[str] = Field(default_factory=list)
    violations: List[Dict[str, Any]] = Field(default_factory=list)
    exit_code: int = 0
    timing: Optional[float] = None

    def verdict(self, name, value):
        self.verdicts[name] = str(value)

    def witness(self, text):
        self.witnesses.append(str(text))

    def violation(self, **fields):
        self.violations.append({k: _plain(v) for k, v in fields.items()})

    def to_json(self):
        return json.dumps(self.model_dump(exclude_none=True), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self, tty=False):
        """
        Human-readable block.

        Args:
            tty (bool): Add coloured markers for a terminal

        Returns:
            str: the report text, newline terminated
        """
        args = " ".join(f"{k}={self.arguments[k]}" for k in sorted(self.arguments))
        lines = [f"qpk {self.command}" + (f" {args}" if args else "")]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        if self.verdicts:
            lines.append("verdicts:")
            for name in sorted(self.verdicts):
                lines.append(f"  {name}: {_mark(self.verdicts[name], tty)}")
        if self.witnesses:
            lines.append("witnesses:")
            for w in self.witnesses:
                lines.extend(f"  {part}" for part in w.splitlines())
        if self.violations:
            lines.append(f"violations: {len(self.violations)}")
            for v in self.violations:
                lines.append("  " + ", ".join(f"{k}={v[k]}" for k in sorted(v)))
        if self.timing is not None:
            lines.append(f"time: {self.timing:.3f}s")
        lines.append(f"exit code: {self.exit_code}")
        return "\n".join(lines) + "\n"

    def render(self, fmt="text", tty=False):
        if fmt == "json":
            return self.to_json()
        return self.to_text(tty)


def _plain(value):
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return str(value)


def _mark(value, tty):
    if not tty:
        return value
    key = value.lower()
    if key in _PASSING:
        return f"{Fore.GREEN}✅ {value}{Style.RESET_ALL}"
    if key in _FAILING:
        return f"{Fore.RED}❌ {value}{Style.RESET_ALL}"
    return value
