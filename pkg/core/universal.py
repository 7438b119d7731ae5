"""
Universal Space Module

The powerset of the naturals as the space of filters of finite sets
ordered by reverse inclusion: finite sets, explicit subsets, staged
points, the quasi-metric d(F, G) = 2^-min(F \\ G) and the limit of an
effective left-Cauchy sequence of finite sets.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Optional

from errors import NotLeftCauchy, ParseError
from numbering import set_code, set_decode
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Universal")

PN_SPACE = "pn"


@dataclass(frozen=True, order=True)
class FinSet:
    """A finite set of naturals stored as a strictly increasing tuple."""

    elements: tuple = ()

    def __post_init__(self):
        for a, b in zip(self.elements, self.elements[1:]):
            if not a < b:
                raise ValueError(f"FinSet elements must be strictly increasing: {self.elements}")
        if self.elements and self.elements[0] < 0:
            raise ValueError("FinSet elements must be naturals")

    @classmethod
    def of(cls, items=()):
        return cls(tuple(sorted(set(items))))

    @classmethod
    def from_code(cls, code):
        return cls(set_decode(code))

    @classmethod
    def parse(cls, text):
        """Parse the textual syntax `{0,2,5}`."""
        stripped = text.strip()
        if not (stripped.startswith("{") and stripped.endswith("}")):
            raise ParseError(1, 1, "'{' ... '}'")
        body = stripped[1:-1].strip()
        if not body:
            return cls()
        items = []
        for part in body.split(","):
            part = part.strip()
            if not part.isdigit():
                raise ParseError(1, text.find(part) + 1 if part else len(text), "natural number")
            items.append(int(part))
        return cls.of(items)

    @property
    def code(self):
        return set_code(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, k):
        return k in self.as_set

    @property
    def as_set(self):
        return frozenset(self.elements)

    def issubset(self, other):
        return self.as_set <= frozenset(other)

    def union(self, other):
        return FinSet.of(self.as_set | frozenset(other))

    def intersection(self, other):
        return FinSet.of(self.as_set & frozenset(other))

    def restrict(self, n):
        """Elements <= n."""
        return FinSet(tuple(x for x in self.elements if x <= n))

    def __str__(self):
        return "{" + ",".join(str(x) for x in self.elements) + "}"


def pfin_order(s, t):
    """
    The order of finite sets under reverse inclusion.

    Args:
        s (FinSet): Lower candidate
        t (FinSet): Upper candidate

    Returns:
        bool: True iff t >= s, i.e. t is a subset of s
    """
    return frozenset(t) <= frozenset(s)


@dataclass(frozen=True, eq=False)
class ExplicitSubset:
    """
    A subset of the naturals with decidable membership.

    Membership is eventually periodic: member(k) == member(k + period) for
    every k >= horizon. Finite sets use period 1 with an empty tail.
    """

    member: Callable[[int], bool]
    horizon: int = 0
    period: int = 1
    name: str = ""
    finite_part: Optional[FinSet] = field(default=None)

    space = PN_SPACE

    @classmethod
    def finite(cls, items):
        s = items if isinstance(items, FinSet) else FinSet.of(items)
        top = s.elements[-1] + 1 if s.elements else 0
        return cls(member=s.__contains__, horizon=top, period=1, name=str(s), finite_part=s)

    @classmethod
    def evens(cls):
        return cls(member=lambda k: k % 2 == 0, horizon=0, period=2, name="evens")

    @classmethod
    def odds(cls):
        return cls(member=lambda k: k % 2 == 1, horizon=0, period=2, name="odds")

    @classmethod
    def interval(cls, a, b):
        """The finite set {a, ..., b}."""
        return cls.finite(range(a, b + 1))

    @classmethod
    def everything(cls):
        return cls(member=lambda k: True, horizon=0, period=1, name="nat")

    @property
    def is_finite(self):
        if self.finite_part is not None:
            return True
        return not any(self.member(k) for k in range(self.horizon, self.horizon + self.period))

    def contains(self, k):
        return bool(self.member(k))

    def upto(self, n):
        """Members <= n as a FinSet."""
        return FinSet(tuple(k for k in range(n + 1) if self.member(k)))

    def decision_bound(self):
        return self.horizon + self.period

    def basic_verdict(self, descriptor, stage):
        return Tri.of(all(self.member(k) for k in descriptor))

    def __str__(self):
        return self.name or "explicit"


def as_explicit(x):
    if isinstance(x, ExplicitSubset):
        return x
    return ExplicitSubset.finite(x)


def d_exact(F, G):
    """
    Exact quasi-distance between explicit subsets.

    Args:
        F: ExplicitSubset or finite collection of naturals
        G: ExplicitSubset or finite collection of naturals

    Returns:
        Fraction: 2^-n for the least n in F \\ G, or 0 when F is a subset of G
    """
    F = as_explicit(F)
    G = as_explicit(G)
    limit = max(F.horizon, G.horizon) + lcm(F.period, G.period)
    for k in range(limit):
        if F.member(k) and not G.member(k):
            return Fraction(1, 2 ** k)
    return Fraction(0)


class PNPoint:
    """
    A point of the universal space given by stages q_0, q_1, ... of finite
    sets with q_i inside {0..i} and q_i contained in q_(i+1); it denotes the
    union of its stages.
    """

    space = PN_SPACE

    def __init__(self, stage_fn, name=""):
        self._stage_fn = stage_fn
        self._memo = {}
        self.name = name

    @classmethod
    def from_stages(cls, stages, name=""):
        """A point whose stages are listed explicitly and constant afterwards."""
        stages = [s if isinstance(s, FinSet) else FinSet.of(s) for s in stages]
        if not stages:
            return cls(lambda i: FinSet(), name=name)
        last = len(stages) - 1
        return cls(lambda i: stages[min(i, last)], name=name)

    def stage(self, i):
        if i not in self._memo:
            self._memo[i] = self._stage_fn(i)
        return self._memo[i]

    def union_at(self, stage):
        return self.stage(stage)

    def basic_verdict(self, descriptor, stage):
        if frozenset(descriptor) <= self.stage(stage).as_set:
            return Tri.YES
        return Tri.UNKNOWN

    def invariant_violations(self, depth):
        """Return (kind, i) pairs where the stage invariants fail below depth."""
        problems = []
        for i in range(depth):
            q = self.stage(i)
            if q.elements and q.elements[-1] > i:
                problems.append(("bounded", i))
            if not q.issubset(self.stage(i + 1)):
                problems.append(("increasing", i))
        return problems

    def __str__(self):
        return self.name or "point"


def point_from_explicit(S):
    """Stage i of the point is S intersected with {0..i}."""
    S = as_explicit(S)
    return PNPoint(S.upto, name=str(S))


def union_at(x, stage):
    return x.union_at(stage)


def d_upper_at(x, y, n, stage):
    """
    Certify d(x, y) <= 2^-n from stage information.

    The stage-n information of x is read as its part below n; the bound is
    certified once that part shows up in y's stage information. Only
    positive information is used, so the verdict never retracts.

    Args:
        x (PNPoint): First point
        y (PNPoint): Second point
        n (int): Exponent of the bound
        stage (int): Stage of y to consult, at least n

    Returns:
        Tri: YES when certified, UNKNOWN otherwise
    """
    if stage < n:
        raise ValueError(f"stage {stage} must be at least n={n}")
    below = frozenset(k for k in x.stage(n) if k < n)
    if below <= y.stage(stage).as_set:
        return Tri.YES
    return Tri.UNKNOWN


def _term(seq, n):
    if callable(seq):
        return seq(n)
    return seq[n]


def left_cauchy_violation(seq, depth):
    """First (n, m) with 0 < n < m <= depth and d(a_n, a_m) >= 2^-n, else None."""
    last = depth if callable(seq) else min(depth, len(seq) - 1)
    for m in range(2, last + 1):
        a_m = frozenset(_term(seq, m))
        for n in range(1, m):
            head = frozenset(k for k in _term(seq, n) if k <= n)
            if not head <= a_m:
                return n, m
    return None


def pn_limit(seq, depth=12):
    """
    Limit of an effective left-Cauchy sequence of finite sets.

    Args:
        seq: list of finite sets, or a function n -> finite set
        depth (int): How far the left-Cauchy condition is checked

    Returns:
        PNPoint: stages q_i = a_(i+1) intersected with {0..i}

    Raises:
        NotLeftCauchy: with the first violating pair
    """
    violation = left_cauchy_violation(seq, depth)
    if violation is not None:
        logger.warning(f"Left-Cauchy check failed at {violation}")
        raise NotLeftCauchy(*violation)

    def stage(i):
        index = i + 1
        if not callable(seq):
            index = min(index, len(seq) - 1)
        return FinSet.of(k for k in _term(seq, index) if k <= i)

    return PNPoint(stage, name="limit")


def point_stage(x, i):
    """Stage-i information of a staged or explicit point."""
    if isinstance(x, PNPoint):
        return x.stage(i)
    return as_explicit(x).upto(i)


def pn_points_agree(x, y, depth):
    """
    YES when every element either point shows by stage depth shows up in
    the other by stage 2 * depth; UNKNOWN otherwise.
    """
    for a, b in ((x, y), (y, x)):
        seen = point_stage(b, 2 * depth).as_set
        if not point_stage(a, depth).as_set <= seen:
            return Tri.UNKNOWN
    return Tri.YES
