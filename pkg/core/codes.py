"""
Codes Module

Finite-rank Borel codes, Pi^0_2 codes and continuous-map codes, evaluated
stage by stage with three-valued (Kleene) verdicts. Points are any object
with a `space` tag and a `basic_verdict(descriptor, stage)` method.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from errors import QpkError, SpaceMismatch
from numbering import pair, unpair, tuple_decode
from universal import FinSet, PNPoint, PN_SPACE
from verdicts import Tri, all_of, any_of

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Codes")


class Listing:
    """
    An enumeration of constituents: either a finite list or a rule
    i -> item (None marks a gap at index i).
    """

    def __init__(self, items=None, rule=None, name=""):
        if (items is None) == (rule is None):
            raise ValueError("Listing needs exactly one of items or rule")
        self._items = tuple(items) if items is not None else None
        self._rule = rule
        self.name = name

    @classmethod
    def of(cls, *items):
        return cls(items=items)

    @classmethod
    def empty(cls):
        return cls(items=())

    @classmethod
    def from_rule(cls, rule, name=""):
        return cls(rule=rule, name=name)

    @property
    def finite(self):
        return self._items is not None

    @property
    def items(self):
        if self._items is None:
            raise ValueError("rule listings have no explicit item list")
        return self._items

    def __len__(self):
        return len(self.items)

    def item_at(self, i):
        if self._items is not None:
            return self._items[i] if i < len(self._items) else None
        return self._rule(i)

    def take(self, n):
        """Items at indices below n, gaps skipped."""
        if self._items is not None:
            return list(self._items[:n])
        return [item for item in (self._rule(i) for i in range(n)) if item is not None]

    def exhausted_by(self, n):
        """True when the first n indices already cover every item."""
        return self._items is not None and len(self._items) <= n

    def mapped(self, fn):
        """Apply fn to every item; fn may return None to drop an item."""
        if self._items is not None:
            return Listing(items=[y for y in (fn(x) for x in self._items) if y is not None])

        def rule(i):
            x = self._rule(i)
            return None if x is None else fn(x)

        return Listing(rule=rule, name=self.name)

    def structure(self, n=None):
        if self._items is not None:
            return tuple(self._items)
        return ("rule", self.name, tuple(self.take(n or 0)))


def interleave(listings):
    """Round-robin merge; finite when every part is finite."""
    listings = list(listings)
    if all(part.finite for part in listings):
        return Listing(items=[x for part in listings for x in part.items])
    k = len(listings)

    def rule(i):
        return listings[i % k].item_at(i // k)

    return Listing(rule=rule)


@dataclass(frozen=True)
class BasicOpen:
    """A basic open set: a space tag plus a descriptor valid for that space."""

    space: str
    descriptor: Any

    def __str__(self):
        return f"N[{self.descriptor}]"


def basic_open(s, space=PN_SPACE):
    """N_s over the universal space, or a basic open of another space."""
    if space == PN_SPACE and not isinstance(s, FinSet):
        s = FinSet.of(s)
    return BasicOpen(space, s)


def _require_space(x, space):
    got = getattr(x, "space", None)
    if got != space:
        raise SpaceMismatch(space, got)


@dataclass(frozen=True, eq=False)
class BorelCode:
    """
    A finite-rank Borel code.

    Rank 1 lists basic opens and denotes their union. Rank k > 1 lists
    pairs (v, w) of rank k-1 codes and denotes the union of v \\ w.
    Polarity 0 denotes the complement of that union.
    """

    space: str
    polarity: int
    rank: int
    constituents: Listing
    # oracle(x) -> bool for points it decides exactly, None otherwise
    oracle: Optional[Callable] = field(default=None)

    def structure(self, n=None):
        parts = self.constituents.structure(n)
        if self.rank > 1 and isinstance(parts, tuple) and parts and parts[0] != "rule":
            parts = tuple((v.structure(n), w.structure(n)) for v, w in parts)
        return (self.space, self.polarity, self.rank, parts)

    def __str__(self):
        return f"({self.polarity}, {self.rank}, {self.constituents.name or 'listing'})"


def open_code(space, basics):
    """Rank-1 open code from basic opens (or descriptors) or a Listing."""
    if not isinstance(basics, Listing):
        basics = Listing(items=[b if isinstance(b, BasicOpen) else BasicOpen(space, b) for b in basics])
    return BorelCode(space, 1, 1, basics)


def closed_code(space, basics):
    """Complement of the open union of the given basics."""
    return complement(open_code(space, basics))


def empty_code(space=PN_SPACE):
    return BorelCode(space, 1, 1, Listing.empty())


def whole_code(space=PN_SPACE):
    return BorelCode(space, 0, 1, Listing.empty())


def whole_open(space=PN_SPACE):
    """The whole universal space as an open: the single basic N_{}."""
    return open_code(space, [FinSet()]) if space == PN_SPACE else whole_code(space)


def sigma_code(space, pieces):
    """Rank-2 code of the union of v \\ w over pairs (v, w) of open codes."""
    if not isinstance(pieces, Listing):
        pieces = Listing(items=list(pieces))
    return BorelCode(space, 1, 2, pieces)


def complement(code):
    oracle = None
    if code.oracle is not None:
        def oracle(x):
            exact = code.oracle(x)
            return None if exact is None else not exact
    return BorelCode(code.space, 1 - code.polarity, code.rank, code.constituents, oracle)


def rank_check(code, max_rank, stage=8):
    """
    Validate the tuple layout of a code over its first constituents.

    Returns:
        list: human-readable problems, empty when the code is well formed
    """
    problems = []
    if code.rank < 1:
        problems.append(f"rank {code.rank} below 1")
    if code.rank > max_rank:
        problems.append(f"rank {code.rank} above the configured bound {max_rank}")
    if code.polarity not in (0, 1):
        problems.append(f"polarity {code.polarity} is not a bit")
    for item in code.constituents.take(stage):
        if code.rank == 1:
            if not isinstance(item, BasicOpen) or item.space != code.space:
                problems.append(f"rank-1 constituent {item!r} is not a basic open of {code.space}")
        else:
            try:
                v, w = item
            except (TypeError, ValueError):
                problems.append(f"constituent {item!r} is not a pair")
                continue
            for sub in (v, w):
                if not isinstance(sub, BorelCode) or sub.rank != code.rank - 1:
                    problems.append(f"sub-code of rank {getattr(sub, 'rank', '?')} under rank {code.rank}")
                else:
                    problems.extend(rank_check(sub, max_rank, stage))
    return problems


def _union_verdict(x, code, stage):
    items = code.constituents.take(stage)
    if code.rank == 1:
        verdict = any_of(x.basic_verdict(b.descriptor, stage) for b in items)
    else:
        verdict = any_of(_borel_verdict(x, v, stage) & ~_borel_verdict(x, w, stage) for v, w in items)
    if verdict is Tri.NO and not code.constituents.exhausted_by(stage):
        return Tri.UNKNOWN
    return verdict


def _borel_verdict(x, code, stage):
    if code.oracle is not None:
        exact = code.oracle(x)
        if exact is not None:
            return Tri.of(exact)
    verdict = _union_verdict(x, code, stage)
    return verdict if code.polarity == 1 else ~verdict


@dataclass(frozen=True, eq=False)
class Pi02Code:
    """
    A Pi^0_2 code: pairs (B_i, coA_i) of open codes denoting the
    intersection of the sets A_i union B_i, with A_i the complement of coA_i.
    """

    space: str
    pairs: Listing
    disjoint: bool = False

    def to_borel(self):
        """The same set as the complement of the union of coA_i \\ B_i."""
        return BorelCode(self.space, 0, 2, self.pairs.mapped(lambda p: (p[1], p[0])))

    def __str__(self):
        return f"pi02[{self.pairs.name or self.space}]"


def pi02_from_pairs(pairs, space=PN_SPACE, disjoint=False):
    """Build a Pi^0_2 code from (B, coA) pairs given as open codes or descriptor lists."""

    def as_open(part):
        if isinstance(part, BorelCode):
            return part
        return open_code(space, part)

    if isinstance(pairs, Listing):
        return Pi02Code(space, pairs, disjoint)
    return Pi02Code(space, Listing(items=[(as_open(b), as_open(a)) for b, a in pairs]), disjoint)


def _pi02_verdict(x, code, stage):
    items = code.pairs.take(stage)
    verdict = all_of(_borel_verdict(x, b, stage) | ~_borel_verdict(x, co_a, stage) for b, co_a in items)
    if verdict is Tri.YES and not code.pairs.exhausted_by(stage):
        return Tri.UNKNOWN
    return verdict


def member_at(x, code, stage):
    """
    Three-valued membership of a point in a Borel or Pi^0_2 code.

    Only the first `stage` constituents and the point's stage information
    are consulted, so decided verdicts never change as stage grows.

    Args:
        x: point with `space` and `basic_verdict`
        code (BorelCode | Pi02Code): code over the same space
        stage (int): evaluation stage

    Returns:
        Tri: YES (In), NO (Out) or UNKNOWN

    Raises:
        SpaceMismatch: if the point and the code live in different spaces
    """
    _require_space(x, code.space)
    if isinstance(code, Pi02Code):
        return _pi02_verdict(x, code, stage)
    return _borel_verdict(x, code, stage)


def pi02_conjoin(codes, space=PN_SPACE):
    """Intersection of Pi^0_2 codes by interleaving their pair listings."""
    codes = list(codes)
    if not codes:
        return Pi02Code(space, Listing.empty(), True)
    first = codes[0].space
    for c in codes[1:]:
        if c.space != first:
            raise SpaceMismatch(first, c.space)
    return Pi02Code(first, interleave(c.pairs for c in codes), all(c.disjoint for c in codes))


@dataclass(frozen=True, eq=False)
class TreeCode:
    """
    The Pi^0_2 code Y of functions y (coded by graphs {<y(j), j>}) that are
    paths through the combined tree {<>} + {n^s : s in T_n}.
    """

    code: Pi02Code
    trees: tuple
    bound: int

    def in_tree(self, sigma):
        if not sigma:
            return True
        n = sigma[0]
        return n < len(self.trees) and self.trees[n](tuple(sigma[1:]))

    def forbidden(self, sigma):
        """True when the graph of sigma is the coA part of some D pair."""
        return (
            0 < len(sigma) <= self.bound
            and all(v < self.bound for v in sigma)
            and not self.in_tree(sigma)
        )

    def witness(self, n, stage):
        """A finite graph inside N_(n,0) meeting every constraint up to stage, or None."""
        if n >= self.bound:
            return None
        stack = [(n,)]
        while stack:
            y = stack.pop()
            if self.forbidden(y):
                continue
            if len(y) == stage + 1:
                return FinSet.of(pair(v, j) for j, v in enumerate(y))
            if len(y) >= self.bound:
                continue
            for v in reversed(range(self.bound)):
                stack.append(y + (v,))
        return None

    def nonempty_at(self, n, stage):
        """
        Stage-wise nonemptiness of Y intersected with N_(n,0).

        Returns:
            Tri: YES with a witness graph found, NO when the bounded search fails
        """
        return Tri.of(self.witness(n, stage) is not None)


def _as_tree(tree):
    if callable(tree):
        return tree
    nodes = frozenset(tuple(s) for s in tree)
    return nodes.__contains__


def tree_to_pi02(trees, bound):
    """
    Encode a sequence of trees as a Pi^0_2 subset of the universal space.

    Args:
        trees: sequence of trees, each a predicate on tuples or a set of node tuples
        bound (int): entries and lengths of the listed sequences stay below it

    Returns:
        TreeCode: the code plus its bounded nonemptiness search
    """
    trees = tuple(_as_tree(t) for t in trees)
    holder = {}

    def d_rule(i):
        sigma = tuple_decode(i)
        tc = holder["tc"]
        if not tc.forbidden(sigma):
            return None
        graph = FinSet.of(pair(v, j) for j, v in enumerate(sigma))
        return (empty_code(), open_code(PN_SPACE, [graph]))

    def e_rule(j):
        column = Listing.from_rule(lambda i: BasicOpen(PN_SPACE, FinSet.of([pair(i, j)])), name=f"E{j}")
        return (open_code(PN_SPACE, column), whole_open())

    pairs = interleave([Listing.from_rule(d_rule, name="D"), Listing.from_rule(e_rule, name="E")])
    tc = TreeCode(Pi02Code(PN_SPACE, pairs, False), trees, bound)
    holder["tc"] = tc
    logger.info(f"Tree code built for {len(trees)} trees with bound {bound}")
    return tc


@dataclass(frozen=True, eq=False)
class MapCode:
    """
    A continuous-map code: triples (n, V, U) with V a codomain basic and U
    a domain basic, read as "x in U gives f(x) in V".
    """

    domain: str
    codomain: str
    triples: Listing
    image: Optional[Callable] = field(default=None)
    conflict: Optional[Callable] = field(default=None)
    name: str = ""


@dataclass
class DomainVerdict:
    verdict: Tri
    image: Any = None
    witness: Any = None


def identity_code(space, basics, image=True):
    """Identity map over the given basics (a Listing or list of descriptors)."""
    if not isinstance(basics, Listing):
        basics = Listing(items=[BasicOpen(space, b) for b in basics])
    return MapCode(space, space, basics.mapped(lambda b: (0, b, b)),
                   image=(lambda x: x) if image else None, name="id")


def preimage(phi, V):
    """
    The formal inverse image {U : (n, V, U) in phi} as an open code.

    Raises:
        SpaceMismatch: if V is not a basic open of phi's codomain
    """
    if V.space != phi.codomain:
        raise SpaceMismatch(phi.codomain, V.space)
    return open_code(phi.domain, phi.triples.mapped(lambda t: t[2] if t[1] == V else None))


def apply(phi, x, stage):
    """
    Codomain basics certified for phi(x) by the given stage.

    Returns:
        list: distinct BasicOpen values in listing order
    """
    _require_space(x, phi.domain)
    seen = []
    for _, V, U in phi.triples.take(stage):
        if V not in seen and x.basic_verdict(U.descriptor, stage) is Tri.YES:
            seen.append(V)
    return seen


def _force(y, stage):
    """Evaluate an image representation through the given stage."""
    if hasattr(y, "at"):
        for i in range(stage + 1):
            y.at(i)
    elif hasattr(y, "stage"):
        y.stage(stage)
    elif hasattr(y, "term"):
        y.term(stage)


def in_domain_at(phi, x, stage):
    """
    Whether x lies in the domain of phi, judged at a stage.

    NO needs a pair of conflicting requirements. YES needs an image
    constructor that produces the image of x through the stage; when it
    refuses, the verdict stays UNKNOWN with the refusal as witness.
    """
    _require_space(x, phi.domain)
    if phi.conflict is not None:
        certified = apply(phi, x, stage)
        for i, V in enumerate(certified):
            for W in certified[i + 1:]:
                if phi.conflict(V, W):
                    return DomainVerdict(Tri.NO, witness=(V, W))
    if phi.image is not None:
        try:
            _force(phi.image(x), stage)
        except QpkError as e:
            logger.debug(f"Image of {phi.name} refused a point below stage {stage}: {e}")
            return DomainVerdict(Tri.UNKNOWN, witness=str(e))
        return DomainVerdict(Tri.YES, image=phi.image)
    if phi.triples.finite and not phi.triples.items and phi.codomain == PN_SPACE:
        return DomainVerdict(Tri.YES, image=lambda _x: PNPoint.from_stages([], name="bottom"))
    return DomainVerdict(Tri.UNKNOWN)


def compose(phi, psi):
    """
    The map psi after phi, matching phi's codomain basics with psi's
    domain basics exactly.

    Raises:
        SpaceMismatch: if phi's codomain is not psi's domain
    """
    if phi.codomain != psi.domain:
        raise SpaceMismatch(psi.domain, phi.codomain)

    image = None
    if phi.image is not None and psi.image is not None:
        image = lambda x: psi.image(phi.image(x))

    if phi.triples.finite and psi.triples.finite:
        triples = [
            (pair(n, m), W, U)
            for n, W, V in psi.triples.items
            for m, V2, U in phi.triples.items
            if V == V2
        ]
        return MapCode(phi.domain, psi.codomain, Listing(items=triples), image=image,
                       name=f"{psi.name}.{phi.name}")

    def rule(k):
        i, j = unpair(k)
        outer = psi.triples.item_at(i)
        inner = phi.triples.item_at(j)
        if outer is None or inner is None or outer[2] != inner[1]:
            return None
        return (k, outer[1], inner[2])

    return MapCode(phi.domain, psi.codomain, Listing.from_rule(rule), image=image,
                   name=f"{psi.name}.{phi.name}")
