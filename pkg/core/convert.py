"""
Convert Module

Constructions between representations: unbounded filters of handy posets
and Pi^0_2 subsets of the universal space, Pi^0_2 codes and derived
posets, quasi-metric spaces and formal-ball posets, dense sequences,
the d' completion of a Pi^0_2 subspace, and frame presentations.
"""

import logging
from itertools import combinations

from codes import (
    BasicOpen, BorelCode, Listing, MapCode, Pi02Code, empty_code, interleave,
    open_code, whole_open,
)
from errors import (
    DisjointnessUnknown, InexactMetric, KindMismatch, MissingConstituents,
    NoLimitOperator, NotAFilter, NotHandy, SpaceMismatch, TooLarge,
)
from frames import Expression, Presentation
from numbering import pair, unpair
from posets import DEFAULT_REACH, CountablePoset, FilterStream, is_handy, np_to_npuf
from qmetric import QMSpaceCode, dprime, dyadic, smyth_limit
from universal import ExplicitSubset, FinSet, PNPoint, PN_SPACE, point_stage
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Convert")

# largest candidate set the path poset tries every extension of
EXTENSION_BOUND = 16


def _finite_elements(x):
    """The members of a finite explicit point, or None for anything else."""
    if isinstance(x, ExplicitSubset) and x.is_finite:
        return x.upto(x.horizon).as_set
    return None


def _singleton(k):
    return open_code(PN_SPACE, [FinSet.of([k])])


def _listing(P, fn, paired=False):
    """Finite listing over the indices of a finite poset, rule listing otherwise."""
    if not P.is_finite:
        return Listing.from_rule(fn)
    top = P.size if not paired else (pair(P.size - 1, P.size - 1) + 1 if P.size else 0)
    return Listing(items=[item for item in (fn(k) for k in range(top)) if item is not None])


def _require_pn(X):
    if X.space != PN_SPACE:
        raise SpaceMismatch(PN_SPACE, X.space)


def _descriptors(code, what):
    """The listing of finite sets of a rank-1 open code over the universal space."""
    if not isinstance(code, BorelCode) or code.rank != 1 or code.polarity != 1 or code.space != PN_SPACE:
        raise MissingConstituents(what)
    return code.constituents.mapped(lambda b: b.descriptor)


def _pair_sets(X, n):
    """(closed-part sets q_(n,k), open-part sets r_(n,h)) of pair n, or None for a gap."""
    item = X.pairs.item_at(n)
    if item is None:
        return None
    b, co_a = item
    return _descriptors(co_a, f"closed part of pair {n}"), _descriptors(b, f"open part of pair {n}")


def _prefix(listing, cap):
    return list(listing.items) if listing.finite else listing.take(cap)


# ---------------------------------------------------------------------------
# UF(P) into the universal space


def up_indices(P, p):
    """g(p): indices k <= index(p) of elements above p."""
    top = P.index_of(p)
    return FinSet.of(k for k in range(top + 1)
                     if (q := P.element_at(k)) is not None and P.leq(p, q))


def uf_point_transform(P, F):
    """
    The point of the universal space for a filter stream q_0 >= q_1 >= ...

    Stage i is the union of g(q_k) for k <= i, cut down to {0..i}; the
    union over all stages is the index set of the filter.
    """
    cache = {}

    def g(k):
        if k not in cache:
            cache[k] = up_indices(P, F.at(k)).as_set
        return cache[k]

    def stage(i):
        seen = set()
        for k in range(i + 1):
            seen |= g(k)
        return FinSet.of(k for k in seen if k <= i)

    return PNPoint(stage, name=f"g({F.name})")


def filter_of_point(P, x, reach=DEFAULT_REACH):
    """
    The filter {p : index(p) in x} as a decreasing stream.

    at(n) is the least-index member found at some stage s >= t_n below
    every member shown at stage t_n and below at(n-1), where t_n is the
    larger of n and the index of at(n-1).

    Raises:
        NotAFilter: when no common lower bound turns up within reach
    """
    memo = []

    def members(s):
        return [e for e in (P.element_at(k) for k in point_stage(x, s)) if e is not None]

    def at(n):
        while len(memo) <= n:
            m = len(memo)
            t = m if not memo else max(m, P.index_of(memo[-1]))
            need = members(t) + memo[-1:]
            for s in range(t, t + reach):
                found = [e for e in members(s) if all(P.leq(e, a) for a in need)]
                if found:
                    memo.append(min(found, key=P.index_of))
                    break
            else:
                raise NotAFilter("no lower bound within reach", m)
        return memo[n]

    return FilterStream(P, at_fn=at, name=f"F({getattr(x, 'name', 'x')})")


def _strict_ancestor_chain(P, e, n, cutoff, memo):
    """A strictly increasing chain of n elements above e among the first cutoff elements."""
    if n == 0:
        return True
    key = (P.index_of(e), n)
    if key not in memo:
        memo[key] = any(
            P.lt(e, q) and _strict_ancestor_chain(P, q, n - 1, cutoff, memo)
            for q in P.carrier(cutoff)
        )
    return memo[key]


def uf_to_pi02(P, cutoff=32, reach=DEFAULT_REACH):
    """
    Embed UF(P) of a handy poset as a Pi^0_2 subset B of the universal space.

    B is the intersection of the opens U_n with the filter-axiom set C.
    U_n is the union of N_g(e) over ends e of strictly decreasing
    sequences of length n + 1 that lie above no element of index <= n.
    C forbids invalid indices and requires a common lower bound for
    every pair of members. Finite explicit points are decided exactly.

    Args:
        P (CountablePoset): A handy poset
        cutoff (int): Prefix used for the handy check and ancestor search

    Returns:
        tuple: (Pi02Code B, forward MapCode g-hat, backward MapCode)

    Raises:
        NotHandy: when some element in the prefix has no strict predecessor
    """
    verdict, witness = is_handy(P, cutoff, reach)
    if verdict is not Tri.YES:
        logger.warning(f"uf_to_pi02 refused {P.name}: {witness} has no strict predecessor")
        raise NotHandy(witness)
    logger.info(f"Embedding UF({P.name}) into the universal space")

    chains = {}

    def ends_chain(e, n):
        k = P.index_of(e)
        if k <= n:
            return False
        if any(P.leq(q, e) for q in P.carrier(n + 1)):
            return False
        return _strict_ancestor_chain(P, e, n, max(cutoff, k + 1), chains)

    def u_code(n):
        def rule(k):
            e = P.element_at(k)
            if e is None or not ends_chain(e, n):
                return None
            return BasicOpen(PN_SPACE, up_indices(P, e))

        def oracle(x):
            elems = _finite_elements(x)
            if elems is None:
                return None
            for k in sorted(elems):
                e = P.element_at(k)
                if e is not None and ends_chain(e, n) and up_indices(P, e).as_set <= elems:
                    return True
            return False

        if P.is_finite:
            return BorelCode(PN_SPACE, 1, 1, _listing(P, rule), oracle)
        return BorelCode(PN_SPACE, 1, 1, Listing.from_rule(rule, name=f"U{n}"), oracle)

    def invalid(l):
        if P.element_at(l) is not None:
            return None
        return (empty_code(), _singleton(l))

    def directed(k):
        i, j = unpair(k)
        p, q = P.element_at(i), P.element_at(j)
        if p is None or q is None or i >= j:
            return None

        def rule(r):
            e = P.element_at(r)
            if e is None or not (P.leq(e, p) and P.leq(e, q)):
                return None
            return BasicOpen(PN_SPACE, FinSet.of([r]))

        def oracle(x):
            elems = _finite_elements(x)
            if elems is None:
                return None
            return any((e := P.element_at(r)) is not None and P.leq(e, p) and P.leq(e, q) for r in elems)

        lower = BorelCode(PN_SPACE, 1, 1, _listing(P, rule), oracle)
        return (lower, open_code(PN_SPACE, [FinSet.of([i, j])]))

    pieces = [
        Listing.from_rule(lambda n: (u_code(n), whole_open()), name="U"),
        Listing.from_rule(invalid, name="invalid"),
        Listing.from_rule(directed, name="directed"),
    ]
    B = Pi02Code(PN_SPACE, interleave(pieces), False)

    def fwd(k):
        p = P.element_at(k)
        if p is None:
            return None
        return (0, BasicOpen(PN_SPACE, FinSet.of([k])), BasicOpen(P.space, p))

    def bwd(k):
        p = P.element_at(k)
        if p is None:
            return None
        return (0, BasicOpen(P.space, p), BasicOpen(PN_SPACE, FinSet.of([k])))

    forward = MapCode(P.space, PN_SPACE, _listing(P, fwd),
                      image=lambda F: uf_point_transform(P, F), name="g-hat")
    backward = MapCode(PN_SPACE, P.space, _listing(P, bwd),
                       image=lambda x: filter_of_point(P, x, reach), name="g-hat^-1")
    return B, forward, backward


# ---------------------------------------------------------------------------
# Pi^0_2 codes to derived posets


def pi02_to_npuf(X, reach=DEFAULT_REACH):
    """
    The poset P' of triples (i, l, q) whose non-principal unbounded filters
    correspond to the points of X.

    (i, l, q) is valid when for every (n, k) with pair(n, k) < i some
    h < l has q_(n,k) inside q implying r_(n,h) inside q. The order is
    (i, l, q) < (j, k, r) iff l > k, q contains r and i >= j.

    Returns:
        tuple: (P', f from NPUF(P') to X, g from X to NPUF(P'))

    Raises:
        MissingConstituents: when a pair is not made of explicit open codes
    """
    _require_pn(X)
    logger.info("Building the triple poset of a Pi^0_2 code")

    def least_l(i, q):
        """Least l >= 1 making (i, l, q) valid, or None when no h < reach works."""
        need = 1
        for k in range(i):
            n, kk = unpair(k)
            parts = _pair_sets(X, n)
            if parts is None:
                continue
            qs, rs = parts
            closed_set = qs.item_at(kk)
            if closed_set is None or not closed_set.issubset(q):
                continue
            for h in range(reach):
                r = rs.item_at(h)
                if r is not None and r.issubset(q):
                    need = max(need, h + 1)
                    break
            else:
                return None
        return need

    def valid(i, l, q):
        need = least_l(i, q)
        return need is not None and l >= need

    def element_at(k):
        i, rest = unpair(k)
        l, c = unpair(rest)
        q = FinSet.from_code(c)
        return (i, l, q) if valid(i, l, q) else None

    def leq(a, b):
        return a == b or (a[1] > b[1] and b[2].as_set <= a[2].as_set and a[0] >= b[0])

    Q = CountablePoset(
        name="npuf(X)",
        element_at=element_at,
        index_of=lambda e: pair(e[0], pair(e[1], e[2].code)),
        leq=leq,
        label_fn=lambda e: f"({e[0]},{e[1]},{e[2]})",
        lower_fn=lambda e: iter(((e[0], e[1] + 1, e[2]),)),
    )

    def f_image(F):
        def stage(s):
            return FinSet.of(k for t in range(s + 1) for k in F.at(t)[2] if k <= s)
        return PNPoint(stage, name=f"f({F.name})")

    def g_image(x):
        memo, stages = [], []

        def at(n):
            while len(memo) <= n:
                m = len(memo)
                start = max(m, stages[-1] if stages else 0)
                for s in range(start, start + reach):
                    q = point_stage(x, s)
                    need = least_l(m, q)
                    if need is not None:
                        break
                else:
                    raise NotAFilter("point leaves the coded set", m)
                previous = memo[-1][1] if memo else -1
                stages.append(s)
                memo.append((m, max(need, previous + 1), q))
            return memo[n]

        return FilterStream(Q, at_fn=at, strict=True, name=f"g({getattr(x, 'name', 'x')})")

    def f_rule(j):
        return (0, BasicOpen(PN_SPACE, FinSet.of([j])), BasicOpen(Q.space, (0, 1, FinSet.of([j]))))

    def g_rule(k):
        e = element_at(k)
        if e is None:
            return None
        return (0, BasicOpen(Q.space, e), BasicOpen(PN_SPACE, e[2]))

    f = MapCode(Q.space, PN_SPACE, Listing.from_rule(f_rule), image=f_image, name="f")
    g = MapCode(PN_SPACE, Q.space, Listing.from_rule(g_rule), image=g_image, name="g")
    return Q, f, g


def npuf_to_pi02(P):
    """
    The Pi^0_2 code over the universal space of index sets of filters of P
    that are non-principal and unbounded: filter axioms plus, for every
    element p_n, some member q_k with p_n not below q_k.
    """
    logger.info(f"Coding NPUF({P.name}) as a Pi^0_2 set")

    def valid(k):
        return P.element_at(k) is not None

    def open_from(rule, test):
        def oracle(x):
            elems = _finite_elements(x)
            if elems is None:
                return None
            return any(valid(k) and test(P.element_at(k)) for k in elems)
        return BorelCode(PN_SPACE, 1, 1, _listing(P, rule), oracle)

    def unbounded(n):
        p = P.element_at(n)
        if p is None:
            return None

        def rule(k):
            q = P.element_at(k)
            return BasicOpen(PN_SPACE, FinSet.of([k])) if q is not None and not P.leq(p, q) else None

        return (open_from(rule, lambda q: not P.leq(p, q)), whole_open())

    def upward(k):
        i, j = unpair(k)
        p, q = P.element_at(i), P.element_at(j)
        if p is None or q is None or i == j or not P.leq(p, q):
            return None
        return (_singleton(j), _singleton(i))

    def directed(k):
        i, j = unpair(k)
        p, q = P.element_at(i), P.element_at(j)
        if p is None or q is None or i >= j:
            return None

        def rule(r):
            e = P.element_at(r)
            return BasicOpen(PN_SPACE, FinSet.of([r])) if e is not None and P.leq(e, p) and P.leq(e, q) else None

        return (open_from(rule, lambda e: P.leq(e, p) and P.leq(e, q)), open_code(PN_SPACE, [FinSet.of([i, j])]))

    def invalid(l):
        return None if valid(l) else (empty_code(), _singleton(l))

    def nonempty_rule(k):
        return BasicOpen(PN_SPACE, FinSet.of([k])) if valid(k) else None

    nonempty = Listing.of((open_from(nonempty_rule, lambda e: True), whole_open()))
    pieces = [
        _listing(P, unbounded),
        _listing(P, upward, paired=True),
        _listing(P, directed, paired=True),
        Listing.from_rule(invalid, name="invalid"),
        nonempty,
    ]
    return Pi02Code(PN_SPACE, interleave(pieces), False)


def np_to_pi02(P, reach=DEFAULT_REACH):
    """NP(P) as a Pi^0_2 set, through the re-ordered poset whose NPUF is NP(P)."""
    Q, iso = np_to_npuf(P, reach)
    return npuf_to_pi02(Q), iso


def _mentioned(listings):
    out = set()
    for sets in listings:
        for s in sets:
            out |= s.as_set
    return out


def pi02_to_uf(X, path_search_depth=8, reach=DEFAULT_REACH):
    """
    A handy poset of pairs (n, q) whose unbounded filters correspond to X.

    (n, q) is kept when q meets the first n + 1 constraints and q extends
    to a finite set meeting the constraints path_search_depth levels
    further. When every constituent listing is finite the constraints are
    finitely determined, the search is exact and the flag is set;
    otherwise the poset may keep dead elements and the flag is cleared.

    Returns:
        tuple: (P, f from UF(P) to X, g from X to UF(P), exact)

    Raises:
        MissingConstituents: when a pair is not made of explicit open codes
        TooLarge: on the first element whose exact extension search would
            exceed EXTENSION_BOUND candidates
    """
    _require_pn(X)
    exact = X.pairs.finite and all(
        _pair_sets(X, n) is None or (_pair_sets(X, n)[0].finite and _pair_sets(X, n)[1].finite)
        for n in range(len(X.pairs))
    )
    n_pairs = len(X.pairs) if X.pairs.finite else None
    logger.info(f"Building the path poset of a Pi^0_2 code (exact={exact})")

    def pieces_upto(m):
        top = m + 1 if n_pairs is None else min(m + 1, n_pairs)
        out = []
        for n in range(top):
            parts = _pair_sets(X, n)
            if parts is not None:
                cap = m + path_search_depth
                out.append((_prefix(parts[0], cap), _prefix(parts[1], cap)))
        return out

    def meets(pieces, q):
        s = q.as_set
        return all(not any(c.as_set <= s for c in qs) or any(r.as_set <= s for r in rs) for qs, rs in pieces)

    extendable_memo = {}

    def extendable(n, q):
        key = (n, q)
        if key not in extendable_memo:
            horizon = pieces_upto(n + path_search_depth if not exact else n_pairs)
            universe = sorted(_mentioned(qs + rs for qs, rs in horizon) - q.as_set)
            if len(universe) > EXTENSION_BOUND:
                if exact:
                    logger.warning(f"Extension search from ({n},{q}) refused: {len(universe)} candidates")
                    raise TooLarge(len(universe), EXTENSION_BOUND, what="extension search")
                logger.warning(f"Extension search from ({n},{q}) truncated: {len(universe)} candidates")
                extendable_memo[key] = True
            else:
                extendable_memo[key] = any(
                    meets(horizon, q.union(extra))
                    for size in range(len(universe) + 1)
                    for extra in combinations(universe, size)
                )
        return extendable_memo[key]

    def valid(n, q):
        return meets(pieces_upto(n), q) and extendable(n, q)

    def element_at(k):
        n, c = unpair(k)
        q = FinSet.from_code(c)
        return (n, q) if valid(n, q) else None

    def leq(a, b):
        return a == b or (a[0] > b[0] and b[1].as_set <= a[1].as_set)

    def lower(e):
        n, q = e
        horizon = pieces_upto(n + 1 + path_search_depth if not exact else n_pairs)
        universe = sorted(_mentioned(qs + rs for qs, rs in horizon) - q.as_set)
        for size in range(len(universe) + 1):
            for extra in combinations(universe, size):
                candidate = q.union(extra)
                if valid(n + 1, candidate):
                    yield (n + 1, candidate)

    P = CountablePoset(
        name="paths(X)",
        element_at=element_at,
        index_of=lambda e: pair(e[0], e[1].code),
        leq=leq,
        label_fn=lambda e: f"({e[0]},{e[1]})",
        handy=True,
        lower_fn=lower,
    )

    def f_image(F):
        def stage(s):
            return FinSet.of(k for t in range(s + 1) for k in F.at(t)[1] if k <= s)
        return PNPoint(stage, name=f"f({F.name})")

    def g_image(x):
        stages = []

        def at(n):
            while len(stages) <= n:
                m = len(stages)
                start = max(m, stages[-1] if stages else 0)
                for s in range(start, start + reach):
                    if valid(m, point_stage(x, s)):
                        stages.append(s)
                        break
                else:
                    raise NotAFilter("point leaves the coded set", m)
            return (n, point_stage(x, stages[n]))

        return FilterStream(P, at_fn=at, strict=True, name=f"g({getattr(x, 'name', 'x')})")

    def f_rule(i):
        e = (0, FinSet.of([i]))
        if not valid(*e):
            return None
        return (0, BasicOpen(PN_SPACE, FinSet.of([i])), BasicOpen(P.space, e))

    def g_rule(k):
        e = element_at(k)
        if e is None:
            return None
        return (0, BasicOpen(P.space, e), BasicOpen(PN_SPACE, e[1]))

    f = MapCode(P.space, PN_SPACE, Listing.from_rule(f_rule), image=f_image, name="f")
    g = MapCode(PN_SPACE, P.space, Listing.from_rule(g_rule), image=g_image, name="g")
    return P, f, g, exact


# ---------------------------------------------------------------------------
# Quasi-metric spaces


def qm_to_uf(space, reach=DEFAULT_REACH):
    """
    The formal-ball poset of a quasi-metric space with exact distances.

    Elements (a, j) stand for balls of radius 2^(1-j); (a, r) <= (b, s)
    iff they are equal or d(b, a) + r < s. phi sends a point to its balls
    (a_i, 2^(1-i)); psi picks, for each n, the first ball of radius below
    2^(-n-1) and takes the Smyth limit of their centres.

    Returns:
        tuple: (P, phi MapCode, psi MapCode)

    Raises:
        InexactMetric: when the space only has approximate distances
        NoLimitOperator: when the space has no limit operator
    """
    if not space.exact:
        raise InexactMetric(space.name)
    if space.limit is None:
        raise NoLimitOperator(space.name)
    if space.index_of is None:
        raise ValueError(f"space {space.name} does not number its carrier")
    logger.info(f"Building the formal-ball poset of {space.name}")

    def radius(e):
        return dyadic(e[1] - 1)

    def element_at(k):
        i, j = unpair(k)
        a = space.element_at(i)
        return None if a is None else (a, j)

    def leq(x, y):
        return x == y or space.d(y[0], x[0]) + radius(x) < radius(y)

    P = CountablePoset(
        name=f"balls({space.name})",
        element_at=element_at,
        index_of=lambda e: pair(space.index_of(e[0]), e[1]),
        leq=leq,
        label_fn=lambda e: f"B({space.label(e[0])},{radius(e)})",
        handy=True,
        lower_fn=lambda e: iter(((e[0], e[1] + 1),)),
    )

    def phi_image(x):
        return FilterStream(P, at_fn=lambda n: (x.term(n), n), strict=True, name=f"phi({x})")

    def psi_image(F):
        positions = []

        def centre(n):
            while len(positions) <= n:
                m = len(positions)
                start = positions[-1] if positions else 0
                for k in range(start, start + reach):
                    if F.at(k)[1] > m + 2:
                        positions.append(k)
                        break
                else:
                    raise NotAFilter("radii do not shrink; the filter is bounded", m)
            return F.at(positions[n])[0]

        return smyth_limit(space, centre)

    def fwd(k):
        e = element_at(k)
        if e is None:
            return None
        return (0, BasicOpen(P.space, e), BasicOpen(space.space, (e[0], radius(e))))

    def bwd(k):
        e = element_at(k)
        if e is None:
            return None
        return (0, BasicOpen(space.space, (e[0], radius(e))), BasicOpen(P.space, e))

    phi = MapCode(space.space, P.space, Listing.from_rule(fwd), image=phi_image, name="phi")
    psi = MapCode(P.space, space.space, Listing.from_rule(bwd), image=psi_image, name="psi")
    return P, phi, psi


def _subsets_upto(bound):
    for code in range(1 << (bound + 1)):
        yield FinSet.from_code(code)


def _is_whole(code):
    if code.polarity == 0 and code.rank == 1 and code.constituents.finite and not code.constituents.items:
        return True
    return code.rank == 1 and code.polarity == 1 and any(
        b.descriptor == FinSet() for b in code.constituents.take(1)
    )


def _kind_of(code):
    if isinstance(code, Pi02Code):
        return "Pi02"
    return {(0, 1): "closed", (1, 1): "open", (1, 2): "Sigma2", (0, 2): "Pi2"}.get(
        (code.polarity, code.rank), f"rank {code.rank}")


def dense_sequence(code, kind, bound, reach=DEFAULT_REACH):
    """
    A dense sequence of points of a closed, G_delta or Sigma^0_2 set.

    For every candidate prefix sigma inside {0..bound} a point agreeing
    with sigma below bound is emitted when one is certified: sigma itself
    for closed sets, sigma plus one consistent constituent per open part
    for G_delta sets, sigma plus a witness of one piece for Sigma^0_2 sets.

    Returns:
        list | Tri: the points, or Tri.UNKNOWN when nothing is certified
        and the listings are infinite

    Raises:
        KindMismatch: when the code is not of the requested kind
    """
    window = FinSet.of(range(bound + 1))
    if kind == "closed":
        if not isinstance(code, BorelCode) or (code.polarity, code.rank) != (0, 1):
            raise KindMismatch("closed", _kind_of(code))
        closed = [c.as_set for c in _prefix(_descriptors(_flip(code), "closed code"), reach)]
        points = [ExplicitSubset.finite(s) for s in _subsets_upto(bound)
                  if not any(c <= s.as_set for c in closed)]
        finite = code.constituents.finite
    elif kind == "Gdelta":
        if not isinstance(code, Pi02Code) or not all(_is_whole(co_a) for _, co_a in code.pairs.take(reach)):
            raise KindMismatch("Gdelta", _kind_of(code))
        points = _gdelta_points(code, bound, window, reach)
        finite = code.pairs.finite
    elif kind == "Sigma2":
        if not isinstance(code, BorelCode) or (code.polarity, code.rank) != (1, 2):
            raise KindMismatch("Sigma2", _kind_of(code))
        points = _sigma2_points(code, bound, window, reach)
        finite = code.constituents.finite
    else:
        raise KindMismatch("closed|Gdelta|Sigma2", kind)

    if not points and not finite:
        logger.warning(f"dense_sequence: nothing certified below {bound}")
        return Tri.UNKNOWN
    logger.info(f"dense_sequence({kind}) emitted {len(points)} points")
    return points


def _flip(code):
    return BorelCode(code.space, 1, code.rank, code.constituents)


def _consistent(sets, sigma, window):
    for r in sets:
        if r is not None and (r.as_set & window.as_set) <= sigma.as_set:
            return r
    return None


def _gdelta_points(code, bound, window, reach):
    opens = []
    for n, (b, _) in enumerate(code.pairs.take(bound + 1)):
        opens.append(_descriptors(b, f"open part of pair {n}"))
    points = []
    for sigma in _subsets_upto(bound):
        chosen = [_consistent(_prefix(sets, reach), sigma, window) for sets in opens]
        if any(r is None for r in chosen):
            continue
        if code.pairs.finite:
            union = sigma.as_set.union(*(r.as_set for r in chosen))
            points.append(ExplicitSubset.finite(FinSet.of(union)))
        else:
            points.append(_lazy_gdelta_point(code, sigma, chosen, window, reach))
    return points


def _lazy_gdelta_point(code, sigma, chosen, window, reach):
    """sigma plus consistent witnesses, choosing them for later pairs on demand."""
    picks = list(chosen)

    def pick(n):
        while len(picks) <= n:
            m = len(picks)
            item = code.pairs.item_at(m)
            r = None
            if item is not None:
                r = _consistent(_prefix(_descriptors(item[0], f"open part of pair {m}"), reach), sigma, window)
                if r is None:
                    logger.warning(f"No consistent witness for pair {m} from {sigma}")
            picks.append(r)
        return picks[n]

    def stage(i):
        out = set(sigma.as_set)
        for n in range(i + 1):
            r = pick(n)
            if r is not None:
                out |= r.as_set
        return FinSet.of(k for k in out if k <= i)

    return PNPoint(stage, name=f"dense({sigma})")


def _sigma2_points(code, bound, window, reach):
    seen = {}
    for v, w in code.constituents.take(reach):
        opens = _prefix(_descriptors(v, "open piece"), reach)
        holes = [c.as_set for c in _prefix(_descriptors(w, "removed piece"), reach)]
        for sigma in _subsets_upto(bound):
            r = _consistent(opens, sigma, window)
            if r is None:
                continue
            x = sigma.union(r)
            if not any(c <= x.as_set for c in holes):
                seen.setdefault(x, ExplicitSubset.finite(x))
    return [seen[k] for k in sorted(seen, key=lambda s: s.code)]


def pi02_to_qm(X, dense, oracles, space):
    """
    The quasi-metric space on a dense sequence of X with the d' metric.

    Args:
        X (Pi02Code): A code with disjoint closed and open parts
        dense (list | callable): Dense points, carrier elements of `space`
        oracles (DistanceOracles): Distances to the complements of the open parts
        space (QMSpaceCode): The ambient quasi-metric space

    Returns:
        QMSpaceCode: approximate distances within 2^-precision

    Raises:
        DisjointnessUnknown: when X does not declare its parts disjoint
    """
    if not X.disjoint:
        raise DisjointnessUnknown()
    if X.space not in (space.space, space.name):
        raise SpaceMismatch(space.space, X.space)
    if callable(dense):
        element_at, size = dense, None
    else:
        dense = list(dense)
        element_at, size = (lambda i: dense[i] if i < len(dense) else None), len(dense)
    logger.info(f"Building the d' space over {space.name}")
    return QMSpaceCode(
        name=f"{space.name}'",
        element_at=element_at,
        size=size,
        d_approx=lambda a, b, p: dprime(space, X, a, b, p, oracles),
        label_fn=space.label_fn,
        sampler=(lambda rng: element_at(rng.randrange(size))) if size else None,
    )


# ---------------------------------------------------------------------------
# Frames


def _as_open(expr):
    return open_code(PN_SPACE, [FinSet.of(d) for d in expr.disjuncts])


def frame_to_pi02(pres):
    """
    The points of a presentation as the Pi^0_2 set of the intersection of
    f(v) union the complement of f(u) over relations (u, v), with f sending
    an expression to the union of N_D over its disjuncts D.
    """
    pairs = [(_as_open(v), _as_open(u)) for u, v in pres.relations]
    return Pi02Code(PN_SPACE, Listing(items=pairs, name=f"frame({pres.name})"), False)


def pi02_to_frame(X, name="X"):
    """
    The presentation with one relation u => v per pair, u the join of the
    closed-part constituents and v the join of the open-part constituents.

    Raises:
        MissingConstituents: when some listing is not finite
    """
    _require_pn(X)
    if not X.pairs.finite:
        raise MissingConstituents("finite pair listing")
    relations = []
    top = 0
    for n in range(len(X.pairs)):
        parts = _pair_sets(X, n)
        if parts is None:
            continue
        qs, rs = parts
        if not qs.finite or not rs.finite:
            raise MissingConstituents(f"finite constituents of pair {n}")
        u = Expression(tuple(q.as_set for q in qs.items))
        v = Expression(tuple(r.as_set for r in rs.items))
        relations.append((u, v))
        for s in list(qs.items) + list(rs.items):
            top = max([top] + [k + 1 for k in s])
    return Presentation(top, tuple(relations), tuple(f"g{k}" for k in range(top)), name)
