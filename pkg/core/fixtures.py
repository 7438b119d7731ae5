"""
Fixtures Module

Named builtins for the infinite objects documents cannot spell out:
quasi-metric spaces (the universal space, Cantor space, lower dyadics,
Sierpinski space), Pi^0_2 codes with distance oracles, explicit subsets,
posets and frame presentations. The DSL resolves `builtin name(args)`
through the registries at the bottom of this module.
"""

import logging
import random
from fractions import Fraction
from math import lcm

from codes import BasicOpen, Listing, Pi02Code, open_code, pi02_from_pairs, whole_code
from errors import UnknownName
from frames import Expression, Presentation
from numbering import pair, unpair, word, word_index
from posets import antichain, chain, existence_upcl_poset, omega_chain, random_poset
from qmetric import INFINITE, DistanceOracles, QMPoint, QMSpaceCode, dyadic
from universal import ExplicitSubset, FinSet, PN_SPACE, as_explicit, d_exact, pn_limit

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Fixtures")


# ---------------------------------------------------------------------------
# The universal space as a quasi-metric space


def _pn_sample(rng):
    return FinSet.of(k for k in range(6) if rng.random() < 0.5)


def pn_space():
    """Finite sets (by bitmask code) with d(F, G) = 2^-min(F \\ G)."""
    return QMSpaceCode(
        name="pn",
        element_at=FinSet.from_code,
        d=d_exact,
        limit=pn_limit,
        label_fn=str,
        sampler=_pn_sample,
        index_of=lambda s: s.code,
    )


def pn_oracles(X):
    """
    Distance oracles for a Pi^0_2 code with finite constituent listings.

    d(y, F_i) is 2^-m for m the least max(s) over open-part sets s inside
    y, infinite when the empty set is listed and 0 when y meets none.
    """
    def parts(i):
        item = X.pairs.item_at(i)
        if item is None:
            return None
        b, co_a = item
        return ([x.descriptor.as_set for x in co_a.constituents.items],
                [x.descriptor.as_set for x in b.constituents.items])

    def members(y):
        e = as_explicit(y)
        return e.upto(e.decision_bound()).as_set

    def dist(i, y):
        found = parts(i)
        if found is None:
            return INFINITE
        _, opens = found
        if any(not s for s in opens):
            return INFINITE
        inside = [max(s) for s in opens if s <= members(y)]
        return dyadic(min(inside)) if inside else Fraction(0)

    def in_closed(i, y):
        found = parts(i)
        if found is None:
            return True
        closed, _ = found
        return not any(q <= members(y) for q in closed)

    return DistanceOracles(dist, in_closed, name="pn")


def whole_oracles():
    """Oracles for a code with no constraints."""
    return DistanceOracles(lambda i, x: INFINITE, lambda i, x: True, name="whole")


# ---------------------------------------------------------------------------
# Cantor space: eventually periodic 0/1 sequences as (prefix, cycle)


def _primitive(cycle):
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


def cantor_normalize(prefix, cycle):
    """Shortest prefix with a primitive cycle for the same sequence."""
    if not cycle:
        raise ValueError("cycle must be nonempty")
    cycle = _primitive(cycle)
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = cycle[-1] + cycle[:-1]
    return prefix, cycle


def cantor_bit(x, k):
    prefix, cycle = x
    if k < len(prefix):
        return prefix[k]
    return cycle[(k - len(prefix)) % len(cycle)]


def _first_difference(x, y):
    if x == y:
        return None
    horizon = max(len(x[0]), len(y[0])) + lcm(len(x[1]), len(y[1]))
    for k in range(horizon):
        if cantor_bit(x, k) != cantor_bit(y, k):
            return k
    return None


def cantor_d(x, y):
    k = _first_difference(x, y)
    return Fraction(0) if k is None else dyadic(k)


def _cantor_element(i):
    a, b = unpair(i)
    prefix, cycle = word(a), word(b)
    if not cycle or cantor_normalize(prefix, cycle) != (prefix, cycle):
        return None
    return (prefix, cycle)


def _cantor_sample(rng):
    prefix = "".join(rng.choice("01") for _ in range(rng.randrange(7)))
    cycle = "".join(rng.choice("01") for _ in range(1 + rng.randrange(4)))
    return cantor_normalize(prefix, cycle)


def _seq_term(seq, n):
    if callable(seq):
        return seq(n)
    return seq[min(n, len(seq) - 1)]


def cantor_space():
    holder = {}

    def limit(seq):
        return QMPoint(holder["space"], lambda n: _seq_term(seq, n + 1), name="limit")

    space = QMSpaceCode(
        name="cantor",
        element_at=_cantor_element,
        d=cantor_d,
        limit=limit,
        label_fn=lambda x: f"{x[0]}({x[1]})",
        sampler=_cantor_sample,
        index_of=lambda x: pair(word_index(x[0]), word_index(x[1])),
    )
    holder["space"] = space
    return space


def cantor_point(space, bits, name=""):
    """The point with bits(k) as its k-th bit, approximated by finite words followed by zeros."""
    return QMPoint(space, lambda n: cantor_normalize("".join(bits(k) for k in range(n + 1)), "0"), name=name)


def random_cantor_point(space, rng):
    x = _cantor_sample(rng)
    return cantor_point(space, lambda k: cantor_bit(x, k), name=space.label(x))


def cylinder(space, w):
    """The basic ball of sequences starting with w."""
    return BasicOpen(space.space, (cantor_normalize(w, "0"), dyadic(len(w) - 1)))


def _words(length):
    return ["".join(bits) for bits in _product("01", length)]


def _product(alphabet, length):
    if length == 0:
        yield ()
        return
    for head in _product(alphabet, length - 1):
        for c in alphabet:
            yield head + (c,)


def no_adjacent_ones(space):
    """
    Sequences without two adjacent ones: for every i, x(i) = 0 or
    (x(i) = 1 and x(i+1) = 0). The two parts are disjoint.

    Returns:
        tuple: (Pi02Code, DistanceOracles)
    """
    def pair_at(i):
        opens = [cylinder(space, w) for w in _words(i + 2) if w[i] == "1" and w[i + 1] == "0"]
        ones = [cylinder(space, w) for w in _words(i + 1) if w[i] == "1"]
        return (open_code(space.space, opens), open_code(space.space, ones))

    code = Pi02Code(space.space, Listing.from_rule(pair_at, name="no11"), True)

    def dist(i, x):
        if cantor_bit(x, i) == "1" and cantor_bit(x, i + 1) == "0":
            return dyadic(i + 1)
        return Fraction(0)

    def in_closed(i, x):
        return cantor_bit(x, i) == "0"

    return code, DistanceOracles(dist, in_closed, name="no11")


def infinitely_many_ones(space):
    """
    Sequences with infinitely many ones: for every i some k >= i has
    x(k) = 1. The closed parts are empty.

    Returns:
        tuple: (Pi02Code, DistanceOracles)
    """
    def pair_at(i):
        def rule(m):
            w = word(m)
            if len(w) > i and w[-1] == "1":
                return cylinder(space, w)
            return None
        return (open_code(space.space, Listing.from_rule(rule, name=f"one after {i}")),
                whole_code(space.space))

    code = Pi02Code(space.space, Listing.from_rule(pair_at, name="inf1"), True)

    def dist(i, x):
        prefix, cycle = x
        for k in range(i, max(i, len(prefix)) + len(cycle)):
            if cantor_bit(x, k) == "1":
                return dyadic(k)
        return Fraction(0)

    return code, DistanceOracles(dist, lambda i, x: False, name="inf1")


# ---------------------------------------------------------------------------
# Small spaces


def _dyadic_element(i):
    m, n = unpair(i)
    if n > 0 and m % 2 == 0:
        return None
    return Fraction(m, 2 ** n)


def _dyadic_index(v):
    n = v.denominator.bit_length() - 1
    return pair(v.numerator, n)


def lower_dyadic_space():
    """Nonnegative dyadic rationals with d(p, q) = max(p - q, 0)."""
    return QMSpaceCode(
        name="lower-dyadic",
        element_at=_dyadic_element,
        d=lambda p, q: max(p - q, Fraction(0)),
        label_fn=str,
        sampler=lambda rng: Fraction(rng.randrange(33), 2 ** rng.randrange(5)),
        index_of=_dyadic_index,
    )


def sierpinski_space():
    """{0, 1} with d(x, y) = 0 when x <= y and 1 otherwise."""
    return QMSpaceCode(
        name="sierpinski",
        element_at=lambda i: i if i in (0, 1) else None,
        size=2,
        d=lambda x, y: Fraction(0) if x <= y else Fraction(1),
        label_fn=str,
        index_of=lambda x: x,
    )


# ---------------------------------------------------------------------------
# Pi^0_2 codes over the universal space


def whole_pi02():
    return Pi02Code(PN_SPACE, Listing.empty(), True)


def contains_pi02(k):
    """{x : k in x} as a single pair with an empty closed part."""
    return pi02_from_pairs([([FinSet.of([k])], [FinSet()])], disjoint=True)


def random_tree(rng, depth, bound, density=0.6):
    """A finite tree of tuples with entries below bound, closed under prefixes."""
    nodes = {()}
    frontier = [()]
    while frontier:
        node = frontier.pop()
        if len(node) >= depth:
            continue
        for v in range(bound):
            if rng.random() < density:
                child = node + (v,)
                nodes.add(child)
                frontier.append(child)
    return frozenset(nodes)


def tree_paths_oracle(tree, depth):
    """Whether the tree has a node of the given depth."""
    return any(len(node) == depth for node in tree)


# ---------------------------------------------------------------------------
# Frames


def sierpinski_frame():
    return Presentation(1, (), ("g",), "S")


def forced_frame():
    """One generator forced true: top <= g."""
    return Presentation(1, ((Expression.top(), Expression.gen(0)),), ("g",), "T")


def implication_frame():
    return Presentation(2, ((Expression.gen(0), Expression.gen(1)),), ("g0", "g1"), "I")


def chain_frame(n):
    """g_(i+1) <= g_i for i < n - 1: the points are the initial segments."""
    relations = tuple((Expression.gen(i + 1), Expression.gen(i)) for i in range(n - 1))
    return Presentation(n, relations, tuple(f"g{i}" for i in range(n)), f"chain{n}")


def random_presentation(rng, n_generators, n_relations, max_disjuncts=2, max_meet=2):
    def expression():
        k = rng.randrange(max_disjuncts + 1)
        return Expression(tuple(
            frozenset(rng.sample(range(n_generators), rng.randrange(min(max_meet, n_generators) + 1)))
            for _ in range(k)
        ))

    relations = tuple((expression(), expression()) for _ in range(n_relations))
    return Presentation(n_generators, relations, tuple(f"g{i}" for i in range(n_generators)), "random")


# ---------------------------------------------------------------------------
# Registries


def _upcl(n):
    return existence_upcl_poset(lambda m: m % 2 == 0, int(n))


POSETS = {
    "chain": lambda n=3: chain(int(n)),
    "antichain": lambda n=2: antichain(int(n)),
    "omega": lambda: omega_chain(),
    "random": lambda seed=0, n=5: random_poset(random.Random(int(seed)), int(n)),
    "upcl": _upcl,
}

SPACES = {
    "pn": pn_space,
    "cantor": cantor_space,
    "lower-dyadic": lower_dyadic_space,
    "sierpinski": sierpinski_space,
}

SUBSETS = {
    "evens": lambda: ExplicitSubset.evens(),
    "odds": lambda: ExplicitSubset.odds(),
    "range": lambda a, b: ExplicitSubset.interval(int(a), int(b)),
    "nat": lambda: ExplicitSubset.everything(),
}

PI02 = {
    "whole": whole_pi02,
    "contains": lambda k: contains_pi02(int(k)),
}

FRAMES = {
    "S": sierpinski_frame,
    "T": forced_frame,
    "I": implication_frame,
    "chain": lambda n=3: chain_frame(int(n)),
}


def lookup(registry, kind, name, args=()):
    """
    Build a registered object.

    Raises:
        UnknownName: when nothing of that kind is registered under name
    """
    if name not in registry:
        raise UnknownName(name, kind)
    try:
        return registry[name](*args)
    except (TypeError, ValueError) as e:
        logger.error(f"Bad arguments for builtin {name}: {e}")
        raise UnknownName(f"{name}/{len(args)}", kind)
