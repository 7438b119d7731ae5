"""
Quasi-Metric Module

Quasi-metric space codes over a countable carrier, points as sequences
with modulus 2^-n, left-Cauchy machinery and Smyth limits, ball codes,
the Sigma^0_2 code of a symmetrised ball, and the d' metric that makes a
Pi^0_2 subspace complete.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from codes import BasicOpen, BorelCode, Listing, open_code, sigma_code
from errors import InvalidPoint, NoLimitOperator, NotLeftCauchy, OracleMissing, PointOutsideY
from numbering import unpair
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("QMetric")


def dyadic(n):
    """2^-n as an exact fraction (n may be negative)."""
    return Fraction(1, 2 ** n) if n >= 0 else Fraction(2 ** -n)


def parse_rational(text):
    """Read a rational written as `p/q` or an integer."""
    return Fraction(text.strip())


@dataclass(frozen=True, eq=False)
class QMSpaceCode:
    """
    A countable carrier with a quasi-metric.

    Either `d` gives exact rational distances or `d_approx(a, b, p)` gives a
    rational within 2^-p of the true value. `limit` takes an effective
    left-Cauchy sequence (list or function n -> element) to a point.
    """

    name: str
    element_at: Callable[[int], Any]
    size: Optional[int] = None
    d: Optional[Callable[[Any, Any], Fraction]] = None
    d_approx: Optional[Callable[[Any, Any, int], Fraction]] = None
    limit: Optional[Callable] = None
    label_fn: Optional[Callable[[Any], str]] = None
    sampler: Optional[Callable] = field(default=None)
    index_of: Optional[Callable[[Any], int]] = field(default=None)

    @property
    def space(self):
        return f"qm:{self.name}"

    @property
    def exact(self):
        return self.d is not None

    def dist(self, a, b, precision=16):
        if self.d is not None:
            return self.d(a, b)
        return self.d_approx(a, b, precision)

    def tolerance(self, precision):
        """Error bound of dist at this precision."""
        return Fraction(0) if self.exact else dyadic(precision)

    def carrier(self, cutoff):
        if self.size is not None:
            cutoff = min(cutoff, self.size)
        return [a for a in (self.element_at(i) for i in range(cutoff)) if a is not None]

    def label(self, a):
        return self.label_fn(a) if self.label_fn is not None else str(a)

    def sample(self, rng):
        if self.sampler is not None:
            return self.sampler(rng)
        elems = self.carrier(64)
        return elems[rng.randrange(len(elems))]


class QMPoint:
    """
    A point given by carrier elements a_0, a_1, ... with
    d-hat(a_n, a_m) < 2^-n whenever m > n.

    `carrier_element` is set for points that embed a carrier element; exact
    evaluators use it.
    """

    def __init__(self, code, seq, carrier_element=None, name=""):
        self.code = code
        self._seq = seq
        self.carrier_element = carrier_element
        self.name = name

    @classmethod
    def constant(cls, code, a):
        return cls(code, lambda n: a, carrier_element=a, name=code.label(a))

    @property
    def space(self):
        return self.code.space

    def term(self, n):
        if callable(self._seq):
            return self._seq(n)
        return self._seq[min(n, len(self._seq) - 1)]

    def basic_verdict(self, descriptor, stage):
        """Membership in the ball B(a, r) = {x : d(a, x) < r}, certified at some index <= stage."""
        a, r = descriptor
        if self.carrier_element is not None and self.code.exact:
            return Tri.of(self.code.d(a, self.carrier_element) < r)
        for n in range(stage + 1):
            p = n + 2
            value = self.code.dist(a, self.term(n), p)
            slack = dyadic(n) + self.code.tolerance(p)
            if value + slack < r:
                return Tri.YES
            if value - slack >= r:
                return Tri.NO
        return Tri.UNKNOWN

    def __str__(self):
        return self.name or "point"


def _term(seq, n):
    if isinstance(seq, QMPoint):
        return seq.term(n)
    if callable(seq):
        return seq(n)
    return seq[n]


def _last(seq, depth):
    if callable(seq) or isinstance(seq, QMPoint):
        return depth
    return min(depth, len(seq) - 1)


def left_cauchy_violation(space, seq, depth, precision=16):
    """First (n, m) with 0 < n < m <= depth and d(a_n, a_m) >= 2^-n, else None."""
    tol = space.tolerance(precision)
    for m in range(2, _last(seq, depth) + 1):
        for n in range(1, m):
            if space.dist(_term(seq, n), _term(seq, m), precision) - tol >= dyadic(n):
                return n, m
    return None


def is_left_cauchy(space, seq, depth, precision=16):
    return left_cauchy_violation(space, seq, depth, precision) is None


def point_violation(space, seq, depth, precision=16):
    """First (n, m) with n < m <= depth and d-hat(a_n, a_m) >= 2^-n, else None."""
    tol = space.tolerance(precision)
    for m in range(1, _last(seq, depth) + 1):
        for n in range(m):
            a, b = _term(seq, n), _term(seq, m)
            if hat_d(space, a, b, precision) - tol >= dyadic(n):
                return n, m
    return None


def is_point(space, seq, depth, precision=16):
    return point_violation(space, seq, depth, precision) is None


def axioms_check(space, samples, precision):
    """
    Check nonnegativity and the triangle inequality on sample elements.

    Returns:
        list: violations beyond the tolerance 2^-(precision-1)
    """
    tol = Fraction(0) if space.exact else dyadic(precision - 1)
    p = precision + 2
    samples = list(samples)
    table = {}
    for i, a in enumerate(samples):
        for j, b in enumerate(samples):
            table[i, j] = space.dist(a, b, p)

    violations = []
    for (i, j), value in table.items():
        if value < -tol:
            violations.append({"axiom": "nonnegative", "a": space.label(samples[i]),
                               "b": space.label(samples[j]), "value": str(value)})
    n = len(samples)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = table[i, j] + table[j, k]
                if lhs < table[i, k] - tol:
                    violations.append({"axiom": "triangle", "a": space.label(samples[i]),
                                       "b": space.label(samples[j]), "c": space.label(samples[k]),
                                       "lhs": str(lhs), "rhs": str(table[i, k])})
    if violations:
        logger.warning(f"Space {space.name}: {len(violations)} axiom violations")
    return violations


def hat_d(space, a, b, precision=16):
    """The symmetrisation max(d(a, b), d(b, a))."""
    return max(space.dist(a, b, precision), space.dist(b, a, precision))


def point_dist(x, y, precision):
    """
    d(x, y) within 2^-precision, read off the terms at index precision + 2.

    Raises:
        InvalidPoint: if either sequence breaks its modulus before that index
    """
    n = precision + 2
    for z in (x, y):
        bad = point_violation(z.code, z, n, n)
        if bad is not None:
            raise InvalidPoint(*bad)
    return x.code.dist(x.term(n), y.term(n), n)


def points_equal_at(x, y, precision):
    """YES when both directed distances are certified below 2^-precision,
    NO when one is certified above 2^-(precision-1)."""
    err = dyadic(precision + 1)
    forward = point_dist(x, y, precision + 2)
    backward = point_dist(y, x, precision + 2)
    if forward + err < dyadic(precision) and backward + err < dyadic(precision):
        return Tri.YES
    if forward - err > dyadic(precision - 1) or backward - err > dyadic(precision - 1):
        return Tri.NO
    return Tri.UNKNOWN


def smyth_limit(space, seq, depth=12):
    """
    Limit of an effective left-Cauchy sequence through the space's operator.

    Raises:
        NoLimitOperator: when the space has none
        NotLeftCauchy: with the first violating pair
    """
    if space.limit is None:
        raise NoLimitOperator(space.name)
    bad = left_cauchy_violation(space, seq, depth)
    if bad is not None:
        raise NotLeftCauchy(*bad)
    return space.limit(seq)


def _center_term(x, n):
    return x.term(n) if isinstance(x, QMPoint) else x


def ball_code(space, x, r, precision=16):
    """
    Open code of B_d(x, r) = {y : d(x, y) < r}.

    A carrier centre gives the single basic {(0, a, r)}; a point centre
    lists the balls (a, l) with d(x_n, a) + l + 2^-n < r.
    """
    if not isinstance(x, QMPoint):
        return BorelCode(space.space, 1, 1, Listing.of(BasicOpen(space.space, (x, Fraction(r)))),
                         oracle=_ball_oracle(space, x, r))

    def rule(k):
        n, rest = unpair(k)
        i, j = unpair(rest)
        a = space.element_at(i)
        if a is None:
            return None
        radius = dyadic(j)
        bound = space.dist(x.term(n), a, precision) + space.tolerance(precision) + radius + dyadic(n)
        if bound < r:
            return BasicOpen(space.space, (a, radius))
        return None

    return open_code(space.space, Listing.from_rule(rule, name=f"B({x},{r})"))


point_ball_code = ball_code


def _ball_oracle(space, a, r):
    if not space.exact:
        return None

    def oracle(y):
        e = getattr(y, "carrier_element", None)
        if e is None:
            return None
        return space.d(a, e) < r

    return oracle


def hat_ball_sigma2(space, x, r, precision=16):
    """
    Rank-2 code of {y : d(x, y) < r and d(y, x) < r}.

    It is the union over q_i = r(1 - 2^-i) of B_d(x, r) minus the open set
    O_q, where O_q lists the balls B_d(a, e) with d(a, x) >= q + e; every
    such ball lies inside {y : d(y, x) > q}.
    """
    r = Fraction(r)
    ball = ball_code(space, x, r, precision)

    def far_side(q):
        def rule(k):
            i, j = unpair(k)
            a = space.element_at(i)
            if a is None:
                return None
            eps = dyadic(j)
            lo = space.dist(a, _center_term(x, precision), precision) - space.tolerance(precision)
            if isinstance(x, QMPoint):
                lo -= dyadic(precision)
            if lo >= q + eps:
                return BasicOpen(space.space, (a, eps))
            return None
        return open_code(space.space, Listing.from_rule(rule, name=f"O({q})"))

    pieces = Listing.from_rule(lambda i: (ball, far_side(r * (1 - dyadic(i)))), name=f"hat({r})")
    code = sigma_code(space.space, pieces)
    if space.exact and not isinstance(x, QMPoint):
        def oracle(y):
            e = getattr(y, "carrier_element", None)
            if e is None:
                return None
            return space.d(x, e) < r and space.d(e, x) < r
        code = BorelCode(code.space, code.polarity, code.rank, code.constituents, oracle)
    return code


INFINITE = math.inf


class DistanceOracles:
    """
    Distances d(x, F_i) from carrier elements to the closed complements
    F_i of the open parts B_i of a Pi^0_2 code, plus membership in the
    closed parts A_i. Subclasses or callables supply both.
    """

    def __init__(self, dist, in_closed, name=""):
        self._dist = dist
        self._in_closed = in_closed
        self.name = name

    def dist(self, i, x):
        """Fraction, (lo, hi) bracket, INFINITE for an empty F_i, or None when unavailable."""
        return self._dist(i, x)

    def in_closed(self, i, x):
        return self._in_closed(i, x)


def _as_value(v, width):
    """
    A single distance from an oracle answer, or None when an interval
    answer is wider than width or straddles zero.
    """
    if v is None:
        return None
    if isinstance(v, tuple):
        lo, hi = Fraction(v[0]), Fraction(v[1])
        if hi - lo > width:
            return None
        if hi == 0:
            return Fraction(0)
        if lo <= 0:
            return None
        return (lo + hi) / 2
    return v


def _inverse(v):
    if v == INFINITE:
        return Fraction(0)
    return 1 / Fraction(v)


def dprime_term(i, dx, dy):
    """The i-th summand of d'(x, y) given d(x, F_i) and d(y, F_i)."""
    x_open = dx > 0
    y_open = dy > 0
    if x_open and y_open:
        return min(dyadic(i), max(Fraction(0), _inverse(dy) - _inverse(dx)))
    if x_open:
        return dyadic(i)
    return Fraction(0)


def dprime(space, Y, x, y, precision, oracles):
    """
    The metric d'(x, y) = d(x, y) + sum_i d_i(x, y) relativised to Y,
    truncated after i = precision + 1.

    Raises:
        OracleMissing: when an oracle cannot answer for some i, or answers
            with an interval wider than 2^-(precision+i) or straddling zero
        PointOutsideY: when x or y is refuted by constituent i
    """
    total = Fraction(space.dist(x, y, precision + 2))
    for i in range(precision + 2):
        width = dyadic(precision + i)
        dx = oracles.dist(i, x)
        dy = oracles.dist(i, y)
        dx, dy = _as_value(dx, width), _as_value(dy, width)
        if dx is None or dy is None:
            raise OracleMissing(i)
        for z, dz in ((x, dx), (y, dy)):
            if not dz > 0 and not oracles.in_closed(i, z):
                raise PointOutsideY(i)
        total += dprime_term(i, dx, dy)
    return total


def smyth_separable_member(space, x, dense, precision, window=256):
    """
    YES when for every n <= precision some dense element x_n has
    d(x_n, x) < 2^-(n-1); UNKNOWN when the search window runs out.
    """
    candidates = [_term(dense, k) for k in range(window)] if not isinstance(dense, list) else dense[:window]
    for n in range(precision + 1):
        if not any(space.dist(c, x, precision + 2) + space.tolerance(precision + 2) < dyadic(n - 1)
                   for c in candidates):
            return Tri.UNKNOWN
    return Tri.YES


def hat_separably_closed_member(space, x, dense, r, precision=16, window=256):
    """YES when some dense element c_n has d-hat(x, c_n) < r."""
    candidates = [_term(dense, k) for k in range(window)] if not isinstance(dense, list) else dense[:window]
    r = Fraction(r)
    for c in candidates:
        if hat_d(space, x, c, precision) + space.tolerance(precision) < r:
            return Tri.YES
    return Tri.UNKNOWN
