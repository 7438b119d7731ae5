import json
from fractions import Fraction

from reports import Report
from verdicts import Tri


def sample_report():
    report = Report(command="check handy", arguments={"samples": 3, "depth": 8}, seed=5)
    report.verdict("result", "pass")
    report.verdict("handy", Tri.YES)
    report.witness("Cut: top |- g\n  Base: top |- g  [R0]")
    return report


class TestText:
    def test_layout(self):
        assert sample_report().to_text() == (
            "qpk check handy depth=8 samples=3\n"
            "seed: 5\n"
            "verdicts:\n"
            "  handy: yes\n"
            "  result: pass\n"
            "witnesses:\n"
            "  Cut: top |- g\n"
            "    Base: top |- g  [R0]\n"
            "exit code: 0\n"
        )

    def test_violations_and_timing(self):
        report = Report(command="version")
        report.violation(check="injective", value=Fraction(1, 4), ok=False)
        report.timing = 0.25
        report.exit_code = 1
        text = report.to_text()
        assert "violations: 1\n  check=injective, ok=False, value=1/4\n" in text
        assert "time: 0.250s\n" in text
        assert text.endswith("exit code: 1\n")

    def test_terminal_markers(self):
        text = sample_report().to_text(tty=True)
        assert "✅ pass" in text
        failing = Report(command="prove")
        failing.verdict("derives", "refuted")
        assert "❌ refuted" in failing.to_text(tty=True)
        assert "❌" not in failing.to_text()


class TestJson:
    def test_round_trips_through_json(self):
        data = json.loads(sample_report().to_json())
        assert data["verdicts"] == {"handy": "yes", "result": "pass"}
        assert data["seed"] == 5
        assert "timing" not in data

    def test_stable_bytes(self):
        assert sample_report().render("json") == sample_report().render("json")
        assert sample_report().render("json").endswith("}\n")
        assert sample_report().render("text") == sample_report().to_text()
