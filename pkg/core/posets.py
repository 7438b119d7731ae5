"""
Posets Module

Countable preorders and their filter spaces. Filters are represented by
decreasing sequences (FilterStream) whose upward closure is the filter.
Also provides the handyfication and NP/UF transforms, products, pruning
and the brute-force filter enumeration used as an oracle elsewhere.
"""

import logging
import string
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Callable, Optional

from codes import BasicOpen, Listing, MapCode
from errors import NotAFilter, NotHandy, TooLarge
from numbering import pair, tuple_code, tuple_decode, unpair
from settings import get_settings
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Posets")

# strict-predecessor searches in generated posets look this far ahead
DEFAULT_REACH = 64


@dataclass(frozen=True, eq=False)
class CountablePoset:
    """
    An indexed preorder.

    `element_at(i)` returns the element with index i, or None when i is
    not a valid index. A finite poset has every valid index below `size`.
    """

    name: str
    element_at: Callable[[int], Any]
    index_of: Callable[[Any], int]
    leq: Callable[[Any, Any], bool]
    size: Optional[int] = None
    label_fn: Optional[Callable[[Any], str]] = None
    handy: bool = False
    lower_fn: Optional[Callable[[Any], Any]] = field(default=None)

    @property
    def space(self):
        return f"uf:{self.name}"

    @property
    def is_finite(self):
        return self.size is not None

    def carrier(self, cutoff=None):
        """Valid elements with index below cutoff (all of them when finite and no cutoff)."""
        if cutoff is None:
            if self.size is None:
                raise ValueError(f"poset {self.name} is infinite; a cutoff is required")
            cutoff = self.size
        elif self.size is not None:
            cutoff = min(cutoff, self.size)
        return [e for e in (self.element_at(i) for i in range(cutoff)) if e is not None]

    def lt(self, a, b):
        return self.leq(a, b) and not self.leq(b, a)

    def label(self, e):
        if self.label_fn is not None:
            return self.label_fn(e)
        return str(e)

    def __len__(self):
        if self.size is None:
            raise TypeError(f"poset {self.name} is infinite")
        return len(self.carrier())


def _default_labels(n):
    letters = string.ascii_lowercase
    if n <= len(letters):
        return list(letters[:n])
    return [f"e{i}" for i in range(n)]


def _closure(matrix):
    """Reflexive-transitive closure (Warshall)."""
    n = len(matrix)
    m = [list(row) for row in matrix]
    for i in range(n):
        m[i][i] = True
    for k in range(n):
        for i in range(n):
            if m[i][k]:
                row_k = m[k]
                row_i = m[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return m


def poset_from_matrix(name, labels, matrix):
    """Finite poset on 0..n-1 with leq(i, j) == matrix[i][j]."""
    table = tuple(tuple(bool(x) for x in row) for row in matrix)
    labels = list(labels)
    n = len(labels)
    return CountablePoset(
        name=name,
        element_at=lambda i: i if 0 <= i < n else None,
        index_of=lambda e: e,
        leq=lambda a, b: table[a][b],
        size=n,
        label_fn=lambda e: labels[e],
        handy=(n == 0),
    )


def finite_poset(name, labels, pairs, close=True):
    """
    Build a finite poset from labelled order pairs.

    Args:
        name (str): Poset name
        labels (list): Element labels, index order
        pairs (list): (x, y) label pairs meaning x <= y
        close (bool): Take the reflexive-transitive closure; otherwise only
            reflexivity is added, so the relation may fail transitivity

    Returns:
        CountablePoset: the finite poset
    """
    labels = list(labels)
    where = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    matrix = [[i == j for j in range(n)] for i in range(n)]
    for x, y in pairs:
        matrix[where[x]][where[y]] = True
    if close:
        matrix = _closure(matrix)
    return poset_from_matrix(name, labels, matrix)


def chain(n, name=None):
    """The chain e0 > e1 > ... > e(n-1): a > b > c for n = 3."""
    labels = _default_labels(n)
    matrix = [[i >= j for j in range(n)] for i in range(n)]
    return poset_from_matrix(name or f"chain{n}", labels, matrix)


def antichain(n, name=None):
    labels = _default_labels(n)
    matrix = [[i == j for j in range(n)] for i in range(n)]
    return poset_from_matrix(name or f"antichain{n}", labels, matrix)


def omega_chain(name="omega"):
    """The infinite descending chain c0 > c1 > c2 > ..."""
    return CountablePoset(
        name=name,
        element_at=lambda i: i if i >= 0 else None,
        index_of=lambda e: e,
        leq=lambda a, b: a >= b,
        size=None,
        label_fn=lambda e: f"c{e}",
        handy=True,
        lower_fn=lambda e: iter((e + 1,)),
    )


def existence_upcl_poset(f, n, name="upcl"):
    """
    Two-sorted poset on (0, m) and (1, k) for m, k < n with
    (1, k) > (0, m) exactly when f(m) == k.
    """
    def element_at(i):
        if i < 0 or i >= 2 * n:
            return None
        return (i % 2, i // 2)

    def leq(a, b):
        if a == b:
            return True
        return a[0] == 0 and b[0] == 1 and f(a[1]) == b[1]

    return CountablePoset(
        name=name,
        element_at=element_at,
        index_of=lambda e: 2 * e[1] + e[0],
        leq=leq,
        size=2 * n,
        label_fn=lambda e: f"({e[0]},{e[1]})",
    )


def random_poset(rng, n, density=0.3, name=None):
    """Random preorder on n elements: a random relation closed up (cycles allowed)."""
    matrix = [[i == j or rng.random() < density for j in range(n)] for i in range(n)]
    return poset_from_matrix(name or f"random{n}", _default_labels(n), _closure(matrix))


def check_poset(P, cutoff):
    """
    Report reflexivity and transitivity violations below a cutoff.

    Returns:
        list: violation tuples ("reflexive", a) or ("transitive", a, b, c)
    """
    elems = P.carrier(cutoff)
    violations = []
    for a in elems:
        if not P.leq(a, a):
            violations.append(("reflexive", a))
    for a in elems:
        for b in elems:
            if not P.leq(a, b):
                continue
            for c in elems:
                if P.leq(b, c) and not P.leq(a, c):
                    violations.append(("transitive", a, b, c))
    if violations:
        logger.warning(f"Poset {P.name} has {len(violations)} violations below {cutoff}")
    return violations


def upward_closure(P, K, cutoff):
    """{p valid below cutoff : some q in K has q <= p}."""
    K = list(K)
    return frozenset(p for p in P.carrier(cutoff) if any(P.leq(q, p) for q in K))


class FilterStream:
    """
    A decreasing sequence at(0) >= at(1) >= ... denoting the upward closure
    of its range.

    `support` is the index from which the sequence is known to be constant
    (None when unknown). `strict` marks strictly decreasing streams.
    """

    def __init__(self, poset, at_fn=None, step=None, first=None, strict=False, support=None, name=""):
        if (at_fn is None) == (step is None):
            raise ValueError("FilterStream needs exactly one of at_fn or step")
        self.poset = poset
        self._at_fn = at_fn
        self._step = step
        self._memo = [] if step is None else [first]
        self.strict = strict
        self.support = support
        self.name = name

    @classmethod
    def from_list(cls, poset, elements, strict=False, name=""):
        elements = list(elements)
        if not elements:
            raise NotAFilter("empty sequence")
        last = len(elements) - 1
        return cls(poset, at_fn=lambda n: elements[min(n, last)], strict=strict, support=last, name=name)

    @property
    def space(self):
        return self.poset.space

    def at(self, n):
        if self._step is None:
            return self._at_fn(n)
        while len(self._memo) <= n:
            k = len(self._memo)
            self._memo.append(self._step(self._memo[-1], k))
        return self._memo[n]

    def prefix(self, n):
        return [self.at(i) for i in range(n)]

    def basic_verdict(self, p, stage):
        """Membership of the element p in the filter, judged from at(0..stage)."""
        if any(self.poset.leq(self.at(i), p) for i in range(stage + 1)):
            return Tri.YES
        if self.support is not None and stage >= self.support:
            return Tri.NO
        return Tri.UNKNOWN

    def members(self, cutoff, depth):
        """Elements below cutoff certified as members by at(0..depth-1)."""
        heads = self.prefix(depth)
        return frozenset(p for p in self.poset.carrier(cutoff) if any(self.poset.leq(a, p) for a in heads))

    def check(self, depth):
        """Indices n < depth where at(n+1) <= at(n) (or strictness) fails."""
        bad = []
        for n in range(depth):
            a, b = self.at(n), self.at(n + 1)
            if not self.poset.leq(b, a) or (self.strict and self.poset.leq(a, b)):
                bad.append(n)
        return bad

    def labels(self, depth):
        return [self.poset.label(e) for e in self.prefix(depth)]


def principal_filter(P, p):
    return FilterStream.from_list(P, [p], name=f"up({P.label(p)})")


def filter_from_membership(P, member, cutoff):
    """
    Build a decreasing sequence for a filter given by membership.

    The filter axioms are checked on the prefix below cutoff. The sequence
    starts at the least-index member and steps to the least-index member
    strictly below the current one until none is left.

    Args:
        P (CountablePoset): The poset
        member (callable): element -> bool
        cutoff (int): Prefix size

    Returns:
        FilterStream: eventually constant stream with known support

    Raises:
        NotAFilter: if the prefix set is empty, not upward closed or not directed
    """
    carrier = P.carrier(cutoff)
    F = [p for p in carrier if member(p)]
    if not F:
        raise NotAFilter("empty")
    for p in F:
        for q in carrier:
            if P.leq(p, q) and not member(q):
                raise NotAFilter("not upward closed", (p, q))
    for i, p in enumerate(F):
        for q in F[i + 1:]:
            if not any(P.leq(r, p) and P.leq(r, q) for r in F):
                raise NotAFilter("not directed", (p, q))

    seq = [F[0]]
    while True:
        below = [p for p in F if P.lt(p, seq[-1])]
        if not below:
            break
        seq.append(below[0])
    return FilterStream.from_list(P, seq)


class ComparisonKind(Enum):
    EQUAL_AT_DEPTH = "equal-at-depth"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"


@dataclass
class Comparison:
    kind: ComparisonKind
    witness: Any = None

    def __str__(self):
        if self.witness is None:
            return self.kind.value
        return f"{self.kind.value}({self.witness})"


def _exact_members(P, F):
    return frozenset(p for p in P.carrier() if F.basic_verdict(p, F.support) is Tri.YES)


def _dominated(F, G, depth):
    """Every F.at(i), i < depth, lies above some G.at(j), j < 2*depth."""
    window = G.prefix(2 * depth)
    return all(any(F.poset.leq(g, F.at(i)) for g in window) for i in range(depth))


def filters_equal(P, F, G, depth):
    """
    Compare the filters denoted by two streams.

    Returns:
        Comparison: EQUAL_AT_DEPTH when mutual domination holds on the
        window, DISTINCT with the least-index witness when the difference is
        certified, UNKNOWN otherwise
    """
    if P.is_finite and F.support is not None and G.support is not None:
        a, b = _exact_members(P, F), _exact_members(P, G)
        if a == b:
            return Comparison(ComparisonKind.EQUAL_AT_DEPTH)
        witness = min(a ^ b, key=P.index_of)
        return Comparison(ComparisonKind.DISTINCT, P.label(witness))

    if _dominated(F, G, depth) and _dominated(G, F, depth):
        return Comparison(ComparisonKind.EQUAL_AT_DEPTH)

    if P.is_finite:
        for exact, other in ((F, G), (G, F)):
            if exact.support is None:
                continue
            known = _exact_members(P, exact)
            extra = [p for p in other.members(None, depth) if p not in known]
            if extra:
                return Comparison(ComparisonKind.DISTINCT, P.label(min(extra, key=P.index_of)))
    return Comparison(ComparisonKind.UNKNOWN)


@dataclass
class FilterClass:
    unbounded: Tri
    nonprincipal: Tri
    maximal: Tri

    def as_dict(self):
        return {"unbounded": str(self.unbounded), "nonprincipal": str(self.nonprincipal),
                "maximal": str(self.maximal)}


def _compatible(P, r, m, elems):
    return any(P.leq(s, r) and P.leq(s, m) for s in elems)


def classify_filter(P, F, depth):
    """
    Three-valued unbounded / non-principal / maximal verdicts for a filter.

    Exact on finite posets when the stream's support is known; otherwise
    sound verdicts with UNKNOWN where the prefix up to depth cannot decide.
    """
    if F.support is not None:
        m = F.at(F.support)
        nonprincipal = Tri.NO
        if P.is_finite:
            elems = P.carrier()
            unbounded = Tri.of(not any(P.lt(r, m) for r in elems))
            maximal = Tri.of(all(
                not _compatible(P, r, m, elems)
                for r in elems if F.basic_verdict(r, F.support) is Tri.NO
            ))
        else:
            elems = P.carrier(depth)
            if P.handy or any(P.lt(r, m) for r in elems):
                unbounded = Tri.NO
            else:
                unbounded = Tri.UNKNOWN
            outside = [r for r in elems if F.basic_verdict(r, F.support) is Tri.NO]
            maximal = Tri.NO if any(_compatible(P, r, m, elems) for r in outside) else Tri.UNKNOWN
        return FilterClass(unbounded, nonprincipal, maximal)

    if F.strict:
        unbounded = Tri.YES if P.handy else Tri.UNKNOWN
        return FilterClass(unbounded, Tri.YES, Tri.UNKNOWN)

    if P.is_finite:
        m = F.at(depth - 1)
        unbounded = Tri.YES if not any(P.lt(r, m) for r in P.carrier()) else Tri.UNKNOWN
        return FilterClass(unbounded, Tri.NO, Tri.UNKNOWN)
    logger.warning(f"classify_filter on {P.name}: nothing decided at depth {depth}")
    return FilterClass(Tri.UNKNOWN, Tri.UNKNOWN, Tri.UNKNOWN)


def is_maximal_filter(P, F, cutoff):
    """MF membership on a prefix: every r outside F is incompatible with F."""
    elems = P.carrier(cutoff)
    inside = [p for p in elems if F.basic_verdict(p, cutoff) is Tri.YES]
    if not inside:
        return Tri.UNKNOWN
    outside = [r for r in elems if F.basic_verdict(r, cutoff) is Tri.NO]
    for r in outside:
        if any(_compatible(P, r, p, elems) for p in inside):
            return Tri.NO
    if P.is_finite and F.support is not None:
        return Tri.YES
    return Tri.UNKNOWN


@dataclass
class FilterCatalog:
    """All filters of a finite poset, each as a frozenset of elements."""

    poset: CountablePoset
    filters: list
    uf: list
    np: list
    mf: list

    def stream(self, F):
        return filter_from_membership(self.poset, F.__contains__, self.poset.size)

    def labels(self, F):
        return sorted(self.poset.label(p) for p in F)


def _filter_key(P, F):
    return (len(F), sorted(P.index_of(p) for p in F))


def enumerate_filters(P):
    """
    Enumerate every filter of a finite poset and classify them.

    Every filter of a finite preorder is the upward closure of one element,
    so the filters are the distinct principal up-sets.

    Raises:
        TooLarge: if the carrier exceeds the configured bound
    """
    if not P.is_finite:
        raise TooLarge("infinite", get_settings().max_carrier)
    elems = P.carrier()
    bound = get_settings().max_carrier
    if len(elems) > bound:
        logger.warning(f"Refusing to enumerate {P.name}: {len(elems)} elements")
        raise TooLarge(len(elems), bound)

    by_set = {}
    for m in elems:
        up = frozenset(p for p in elems if P.leq(m, p))
        by_set.setdefault(up, m)
    filters = sorted(by_set, key=lambda F: _filter_key(P, F))

    uf, mf = [], []
    for F in filters:
        m = by_set[F]
        if not any(P.lt(r, m) for r in elems):
            uf.append(F)
        if all(not _compatible(P, r, m, elems) for r in elems if r not in F):
            mf.append(F)
    logger.info(f"Enumerated {len(filters)} filters of {P.name}")
    return FilterCatalog(P, filters, uf, [], mf)


def scan_filters(P):
    """Brute-force oracle: every nonempty upward-closed directed subset."""
    elems = P.carrier()
    found = []
    for k in range(1, len(elems) + 1):
        for subset in combinations(elems, k):
            S = frozenset(subset)
            if any(P.leq(p, q) and q not in S for p in S for q in elems):
                continue
            if all(any(P.leq(r, p) and P.leq(r, q) for r in S) for p in S for q in S):
                found.append(S)
    return sorted(found, key=lambda F: _filter_key(P, F))


def settle(P, F, depth):
    """The upward closure of at(0..depth-1) in a finite poset."""
    return F.members(None, depth)


def strictly_below(P, e, reach=DEFAULT_REACH):
    """Strictly lower elements of e, least index first, hinted or scanned."""
    if P.lower_fn is not None:
        for x in P.lower_fn(e):
            if P.lt(x, e):
                yield x
        return
    limit = P.size if P.is_finite else reach
    for i in range(limit):
        x = P.element_at(i)
        if x is not None and P.lt(x, e):
            yield x


def _first_below(P, e, reach):
    for x in strictly_below(P, e, reach):
        return x
    return None


def strict_descent(P, start, reach=DEFAULT_REACH):
    """
    The strictly decreasing stream from start that always steps to the
    first strictly lower element found.

    Raises:
        NotHandy: when some element has no strict predecessor within reach
    """
    def step(current, _n):
        nxt = _first_below(P, current, reach)
        if nxt is None:
            raise NotHandy(P.label(current))
        return nxt

    return FilterStream(P, step=step, first=start, strict=True, name=f"descent({P.label(start)})")


def strictify(F, reach=DEFAULT_REACH):
    """A strictly decreasing subsequence of F (F must be non-principal)."""
    P = F.poset
    if F.strict:
        return F
    positions = [0]

    def at(n):
        while len(positions) <= n:
            pos = positions[-1]
            current = F.at(pos)
            for j in range(pos + 1, pos + 1 + reach):
                if P.lt(F.at(j), current):
                    positions.append(j)
                    break
            else:
                raise NotAFilter("principal filter has no strictly decreasing subsequence", P.label(current))
        return F.at(positions[n])

    return FilterStream(P, at_fn=at, strict=True, name=F.name)


def is_handy(P, cutoff, reach=DEFAULT_REACH):
    """
    Check that every element below cutoff has a strict predecessor.

    Returns:
        tuple: (Tri, witness) with the first element lacking a predecessor
    """
    for e in P.carrier(cutoff):
        if _first_below(P, e, reach) is None:
            return (Tri.NO if P.is_finite else Tri.UNKNOWN), P.label(e)
    return Tri.YES, None


@dataclass(frozen=True, eq=False)
class PosetIso:
    """Forward and backward map codes between the filter spaces of two posets."""

    source: CountablePoset
    target: CountablePoset
    forward: MapCode
    backward: MapCode

    def to_target(self, F):
        return self.forward.image(F)

    def to_source(self, G):
        return self.backward.image(G)


def _coordinate_codes(P, Q, project, to_target, to_source, name):
    """Map codes for isos where q in the target corresponds to project(q) in P."""
    def fwd(k):
        q = Q.element_at(k)
        if q is None:
            return None
        return (0, BasicOpen(Q.space, q), BasicOpen(P.space, project(q)))

    def bwd(k):
        q = Q.element_at(k)
        if q is None:
            return None
        return (0, BasicOpen(P.space, project(q)), BasicOpen(Q.space, q))

    forward = MapCode(P.space, Q.space, Listing.from_rule(fwd, name=f"{name}-fwd"), image=to_target, name=name)
    backward = MapCode(Q.space, P.space, Listing.from_rule(bwd, name=f"{name}-bwd"), image=to_source,
                       name=f"{name}^-1")
    return forward, backward


def _project_stream(P, G, coordinate, strict=False):
    return FilterStream(P, at_fn=lambda n: coordinate(G.at(n)), strict=strict, name=G.name)


def handyfy_uf(P, reach=DEFAULT_REACH):
    """
    Handy poset P' = {(p, n) : no q with index < n has q < p} whose
    unbounded filters correspond to those of P.

    The order is (p, n) <= (q, m) iff equal, or p <= q with n > m.
    """
    def valid(p, n):
        return not any(P.lt(q, p) for q in P.carrier(n))

    def element_at(k):
        i, n = unpair(k)
        p = P.element_at(i)
        if p is None or not valid(p, n):
            return None
        return (p, n)

    def leq(a, b):
        return a == b or (P.leq(a[0], b[0]) and a[1] > b[1])

    def lower(e):
        p, n = e
        for m in range(n + 1, n + 1 + reach):
            cap = P.size if P.is_finite else m + 1
            for q in P.carrier(cap):
                if P.leq(q, p) and valid(q, m):
                    yield (q, m)

    Q = CountablePoset(
        name=f"{P.name}'",
        element_at=element_at,
        index_of=lambda e: pair(P.index_of(e[0]), e[1]),
        leq=leq,
        size=None,
        label_fn=lambda e: f"({P.label(e[0])},{e[1]})",
        handy=True,
        lower_fn=lower,
    )

    def to_target(F):
        positions = []

        def at(n):
            while len(positions) <= n:
                m = len(positions)
                k = positions[-1] if positions else 0
                for j in range(k, k + reach + m):
                    if valid(F.at(j), m):
                        positions.append(j)
                        break
                else:
                    raise NotAFilter("bounded filter has no handy image", m)
            return (F.at(positions[n]), n)

        return FilterStream(Q, at_fn=at, strict=True, name=f"h({F.name})")

    def to_source(G):
        return _project_stream(P, G, lambda e: e[0])

    forward, backward = _coordinate_codes(P, Q, lambda e: e[0], to_target, to_source, "handy-uf")
    logger.info(f"Handyfied {P.name} for unbounded filters")
    return Q, PosetIso(P, Q, forward, backward)


def handyfy_allfilters(P):
    """
    Handy poset P' = {(p, n) : index(p) <= n} whose unbounded filters
    correspond to all filters of P.
    """
    def element_at(k):
        i, n = unpair(k)
        p = P.element_at(i)
        if p is None or i > n:
            return None
        return (p, n)

    def leq(a, b):
        return a == b or (P.leq(a[0], b[0]) and a[1] > b[1])

    Q = CountablePoset(
        name=f"{P.name}*",
        element_at=element_at,
        index_of=lambda e: pair(P.index_of(e[0]), e[1]),
        leq=leq,
        size=None,
        label_fn=lambda e: f"({P.label(e[0])},{e[1]})",
        handy=True,
        lower_fn=lambda e: iter(((e[0], e[1] + 1),)),
    )

    def to_target(F):
        def at(j):
            top = max(P.index_of(F.at(i)) for i in range(j + 1))
            return (F.at(j), top + j)
        return FilterStream(Q, at_fn=at, strict=True, name=f"a({F.name})")

    def to_source(G):
        return _project_stream(P, G, lambda e: e[0])

    forward, backward = _coordinate_codes(P, Q, lambda e: e[0], to_target, to_source, "handy-all")
    logger.info(f"Handyfied {P.name} for all filters")
    return Q, PosetIso(P, Q, forward, backward)


def np_to_npuf(P, reach=DEFAULT_REACH):
    """
    Same elements, order x <= y iff x == y or (x < y in P and index(y) < index(x)).
    Non-principal filters of P become non-principal unbounded filters.
    """
    def leq(a, b):
        return a == b or (P.lt(a, b) and P.index_of(b) < P.index_of(a))

    Q = CountablePoset(
        name=f"{P.name}~",
        element_at=P.element_at,
        index_of=P.index_of,
        leq=leq,
        size=P.size,
        label_fn=P.label_fn,
    )

    def to_target(F):
        strict = strictify(F, reach)
        positions = [0]

        def at(n):
            while len(positions) <= n:
                pos = positions[-1]
                current = strict.at(pos)
                for j in range(pos + 1, pos + 1 + reach):
                    if P.index_of(strict.at(j)) > P.index_of(current):
                        positions.append(j)
                        break
                else:
                    raise NotAFilter("no index-increasing subsequence", P.label(current))
            return strict.at(positions[n])

        return FilterStream(Q, at_fn=at, strict=True, name=f"n({F.name})")

    def to_source(G):
        return FilterStream(P, at_fn=G.at, strict=G.strict, support=G.support, name=G.name)

    forward, backward = _coordinate_codes(P, Q, lambda e: e, to_target, to_source, "np-npuf")
    return Q, PosetIso(P, Q, forward, backward)


def npuf_to_np(P, reach=DEFAULT_REACH):
    """
    P'' = {(n, p) : no q with index <= n has q <= p}, ordered by
    (m, q) < (n, p) iff q < p in P and m > n. Filters of P that are both
    non-principal and unbounded correspond to non-principal filters of P''.
    """
    def valid(n, p):
        return not any(P.leq(q, p) for q in P.carrier(n + 1))

    def element_at(k):
        n, i = unpair(k)
        p = P.element_at(i)
        if p is None or not valid(n, p):
            return None
        return (n, p)

    def leq(a, b):
        return a == b or (P.lt(a[1], b[1]) and a[0] > b[0])

    Q = CountablePoset(
        name=f"{P.name}^",
        element_at=element_at,
        index_of=lambda e: pair(e[0], P.index_of(e[1])),
        leq=leq,
        size=None,
        label_fn=lambda e: f"({e[0]},{P.label(e[1])})",
    )

    def to_target(F):
        strict = strictify(F, reach)
        positions = []

        def at(k):
            while len(positions) <= k:
                start = positions[-1] + 1 if positions else 0
                n = len(positions)
                for j in range(start, start + reach + n):
                    if valid(n, strict.at(j)):
                        positions.append(j)
                        break
                else:
                    raise NotAFilter("filter is bounded", n)
            return (k, strict.at(positions[k]))

        return FilterStream(Q, at_fn=at, strict=True, name=f"m({F.name})")

    def to_source(G):
        return _project_stream(P, G, lambda e: e[1], strict=G.strict)

    forward, backward = _coordinate_codes(P, Q, lambda e: e[1], to_target, to_source, "npuf-np")
    return Q, PosetIso(P, Q, forward, backward)


def subposet(P, keep, name=None):
    """The restriction of P to the given elements, indices unchanged."""
    keep = frozenset(keep)
    size = max((P.index_of(e) + 1 for e in keep), default=0)

    def element_at(i):
        e = P.element_at(i)
        return e if e in keep else None

    return CountablePoset(
        name=name or f"{P.name}|",
        element_at=element_at,
        index_of=P.index_of,
        leq=P.leq,
        size=size,
        label_fn=P.label_fn,
        handy=P.handy,
    )


def prune_iterate(P, k, cutoff):
    """
    Apply the hat operation k times on the prefix below cutoff: keep the
    elements with a strict predecessor among the kept ones.
    """
    kept = P.carrier(cutoff)
    for step in range(k):
        nxt = [p for p in kept if any(P.lt(q, p) for q in kept)]
        if len(nxt) == len(kept):
            logger.debug(f"prune_iterate reached a fixpoint after {step} rounds")
            break
        kept = nxt
    return subposet(P, kept, name=f"{P.name}^{k}")


def is_prune_fixpoint(P, cutoff):
    kept = P.carrier(cutoff)
    return all(any(P.lt(q, p) for q in kept) for p in kept)


@dataclass(frozen=True, eq=False)
class ProductCodes:
    """
    Pairing and projections between a product and its factors, all as map
    codes. The pairing's domain basics are tuples of factor elements, read
    as "every coordinate filter contains its element".
    """

    pairing: MapCode
    projections: tuple
    isos: tuple

    def pair(self, *streams):
        return self.pairing.image(streams)

    def project(self, i, H):
        return self.projections[i].image(H)


def _tuple_space(spaces):
    return "prod:" + ",".join(spaces)


def _source_element(iso, x):
    """The factor element behind x, which is (p, n) when the factor was handyfied."""
    return x[0] if iso is not None else x


def _pairing_code(R, spaces, isos, build):
    domain = _tuple_space(spaces)

    def rule(k):
        e = R.element_at(k)
        if e is None:
            return None
        # padding coordinates past the factors constrain nothing
        coords = tuple(_source_element(iso, x) for iso, x in zip(isos, e))
        return (0, BasicOpen(R.space, e), BasicOpen(domain, coords))

    return MapCode(domain, R.space, Listing.from_rule(rule, name=f"{R.name}-pair"),
                   image=lambda streams: build(*streams), name="pair")


def _handy_factor(P, reach):
    if P.handy:
        return P, None
    return handyfy_uf(P, reach)


def _into_factor(iso, F, reach):
    if iso is None:
        return strictify(F, reach)
    return iso.to_target(F)


def _out_of_factor(iso, G):
    if iso is None:
        return G
    return iso.to_source(G)


def product(P, Q, reach=DEFAULT_REACH):
    """
    Product poset R of the handy versions of P and Q with the strict
    product order: (p, q) < (p', q') iff p < p' and q < q'.

    Returns:
        tuple: (R, ProductCodes)
    """
    P1, iso_p = _handy_factor(P, reach)
    Q1, iso_q = _handy_factor(Q, reach)

    def element_at(k):
        i, j = unpair(k)
        a, b = P1.element_at(i), Q1.element_at(j)
        if a is None or b is None:
            return None
        return (a, b)

    def leq(x, y):
        return x == y or (P1.lt(x[0], y[0]) and Q1.lt(x[1], y[1]))

    def lower(e):
        a, b = e
        for x in strictly_below(P1, a, reach):
            for y in strictly_below(Q1, b, reach):
                yield (x, y)
                break
            break

    R = CountablePoset(
        name=f"{P.name}x{Q.name}",
        element_at=element_at,
        index_of=lambda e: pair(P1.index_of(e[0]), Q1.index_of(e[1])),
        leq=leq,
        size=None,
        label_fn=lambda e: f"<{P1.label(e[0])},{Q1.label(e[1])}>",
        handy=True,
        lower_fn=lower,
    )

    def pairing(F, G):
        F1 = _into_factor(iso_p, F, reach)
        G1 = _into_factor(iso_q, G, reach)
        return FilterStream(R, at_fn=lambda n: (F1.at(n), G1.at(n)), strict=True, name=f"<{F.name},{G.name}>")

    def proj(i, base, iso):
        def image(H):
            G = FilterStream(base, at_fn=lambda n: H.at(n)[i], strict=True, name=H.name)
            return _out_of_factor(iso, G)

        target = iso.source if iso is not None else base

        def rule(k):
            e = R.element_at(k)
            if e is None:
                return None
            return (0, BasicOpen(target.space, _source_element(iso, e[i])), BasicOpen(R.space, e))

        return MapCode(R.space, target.space, Listing.from_rule(rule), image=image, name=f"pi{i + 1}")

    pair_code = _pairing_code(R, (P.space, Q.space), (iso_p, iso_q), pairing)
    codes = ProductCodes(pair_code, (proj(0, P1, iso_p), proj(1, Q1, iso_q)), (iso_p, iso_q))
    logger.info(f"Built product {R.name}")
    return R, codes


def singleton(name="one"):
    return poset_from_matrix(name, ["*"], [[True]])


def product_seq(posets, reach=DEFAULT_REACH):
    """
    Countable product over a finite list of posets, padded with the handy
    version of a singleton. Elements are tuples (p_0, ..., p_n) and
    (p'_0..p'_k) < (p_0..p_n) iff p_i > p'_i for every i < n and n < k.

    Returns:
        tuple: (R, ProductCodes)
    """
    posets = list(posets)
    factors = [_handy_factor(P, reach) for P in posets]
    pad = _handy_factor(singleton(), reach)
    star_stream = None

    def factor(i):
        return factors[i] if i < len(factors) else pad

    def element_at(k):
        idx = tuple_decode(k)
        out = []
        for i, j in enumerate(idx):
            e = factor(i)[0].element_at(j)
            if e is None:
                return None
            out.append(e)
        return tuple(out)

    def leq(x, y):
        if x == y:
            return True
        n, k = len(y) - 1, len(x) - 1
        return n < k and all(factor(i)[0].lt(x[i], y[i]) for i in range(n))

    R = CountablePoset(
        name="prod(" + ",".join(P.name for P in posets) + ")",
        element_at=element_at,
        index_of=lambda e: tuple_code([factor(i)[0].index_of(x) for i, x in enumerate(e)]),
        leq=leq,
        size=None,
        label_fn=lambda e: "<" + ",".join(factor(i)[0].label(x) for i, x in enumerate(e)) + ">",
        handy=True,
    )

    def pairing(*streams):
        nonlocal star_stream
        lifted = [_into_factor(factors[i][1], F, reach) for i, F in enumerate(streams)]
        if star_stream is None:
            one = pad[1].source
            star_stream = pad[1].to_target(FilterStream.from_list(one, [0]))

        def at(n):
            return tuple(lifted[i].at(n) if i < len(lifted) else star_stream.at(n) for i in range(n + 1))

        return FilterStream(R, at_fn=at, strict=True, name="<...>")

    def proj(i):
        P1, iso = factor(i)

        def image(H):
            start = 0
            while len(H.at(start)) <= i + 1:
                start += 1
            G = FilterStream(P1, at_fn=lambda n: H.at(start + n)[i], strict=True, name=H.name)
            return _out_of_factor(iso, G)

        target = iso.source if iso is not None else P1

        def rule(k):
            e = R.element_at(k)
            if e is None or len(e) <= i:
                return None
            return (0, BasicOpen(target.space, _source_element(iso, e[i])), BasicOpen(R.space, e))

        return MapCode(R.space, target.space, Listing.from_rule(rule, name=f"{R.name}-pi{i + 1}"), image=image,
                       name=f"pi{i + 1}")

    isos = tuple(f[1] for f in factors)
    pair_code = _pairing_code(R, tuple(P.space for P in posets), isos, pairing)
    codes = ProductCodes(pair_code, tuple(proj(i) for i in range(len(posets))), isos)
    return R, codes
