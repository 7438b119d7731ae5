"""
Frames Module

Countably presented frames <G; R>: expressions as joins of finite meets of
generators, the lattice preorder, the least congruence preorder generated
by R (decided by a chase over conjunction states), proof trees for the
entailment relation, points as valuations, and spatial cross-checks.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Optional

from errors import TooLarge
from settings import get_settings
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Frames")


def _disjunct_key(d):
    return (len(d), tuple(sorted(d)))


@dataclass(frozen=True)
class Expression:
    """A join of finite meets: () is bottom, (frozenset(),) is top."""

    disjuncts: tuple = ()

    @classmethod
    def of(cls, *sets):
        return cls(tuple(frozenset(s) for s in sets))

    @classmethod
    def top(cls):
        return cls((frozenset(),))

    @classmethod
    def bot(cls):
        return cls(())

    @classmethod
    def gen(cls, g):
        return cls((frozenset([g]),))

    @property
    def generators(self):
        out = set()
        for d in self.disjuncts:
            out |= d
        return frozenset(out)

    def holds_under(self, valuation):
        """Truth under a two-valued valuation given as the set of true generators."""
        return any(d <= valuation for d in self.disjuncts)

    def render(self, names=None):
        if not self.disjuncts:
            return "bot"
        parts = []
        for d in self.disjuncts:
            if not d:
                parts.append("top")
            else:
                parts.append(" & ".join(_name(g, names) for g in sorted(d)))
        return " | ".join(parts)

    def __str__(self):
        return self.render()


def _name(g, names):
    if names is not None and g < len(names):
        return names[g]
    return f"g{g}"


def leq(a, b):
    """Every disjunct of a contains some disjunct of b."""
    return all(any(q <= p for q in b.disjuncts) for p in a.disjuncts)


def equivalent(a, b):
    return leq(a, b) and leq(b, a)


def meet(a, b):
    return Expression(tuple(p | q for p in a.disjuncts for q in b.disjuncts))


def join(a, b):
    return Expression(a.disjuncts + b.disjuncts)


def normalize(a):
    """Drop duplicate and subsumed disjuncts, then sort canonically."""
    unique = sorted(set(a.disjuncts), key=_disjunct_key)
    kept = [p for p in unique if not any(q < p for q in unique)]
    return Expression(tuple(kept))


@dataclass(frozen=True)
class Presentation:
    """Generators 0..n_generators-1 and relations (u, v) read as u <= v."""

    n_generators: int
    relations: tuple = ()
    names: tuple = ()
    name: str = ""

    def render_relation(self, j):
        u, v = self.relations[j]
        return f"{u.render(self.names)} => {v.render(self.names)}"

    def satisfies(self, valuation):
        return all(not u.holds_under(valuation) or v.holds_under(valuation) for u, v in self.relations)


class Outcome(Enum):
    HOLDS = "holds"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass
class FramePoint:
    """
    A point as increasing generator sets p_0, p_1, ...; when `valuation` is
    set the point is total and the generators outside it are false.
    """

    stages: tuple
    valuation: Optional[frozenset] = None

    @classmethod
    def from_set(cls, S, n_generators=None):
        S = frozenset(S)
        top = max(S) + 1 if S else 0
        stages = tuple(frozenset(g for g in S if g < i) for i in range(top + 1))
        return cls(stages, valuation=S if n_generators is not None else None)

    def stage(self, i):
        return self.stages[min(i, len(self.stages) - 1)]

    def __str__(self):
        last = sorted(self.stage(len(self.stages)))
        return "{" + ",".join(f"g{g}" for g in last) + "}"


def valuation_to_point(valuation, n_generators):
    return FramePoint.from_set(valuation, n_generators)


def point_sat(x, e, stage):
    """Sat (YES) when some disjunct is inside p_stage; Unsat (NO) only for total points."""
    if any(d <= x.stage(stage) for d in e.disjuncts):
        return Tri.YES
    if x.valuation is not None and not e.holds_under(x.valuation):
        return Tri.NO
    return Tri.UNKNOWN


@dataclass
class PrecResult:
    outcome: Outcome
    chain: list = field(default_factory=list)
    point: Optional[FramePoint] = None

    def __str__(self):
        return self.outcome.value


def _applicable(S, pres):
    state = Expression((S,))
    for j, (u, v) in enumerate(pres.relations):
        if leq(state, u) and not leq(state, v):
            return j
    return None


def _chase(S, b, pres, bound, steps):
    """Returns None when every branch from S reaches b, else the stuck state, or 'bound'."""
    if len(S) > bound:
        return "bound"
    state = Expression((S,))
    if leq(state, b):
        return None
    j = _applicable(S, pres)
    if j is None:
        return S
    v = pres.relations[j][1]
    steps.append((tuple(sorted(S)), j))
    for D in normalize(v).disjuncts:
        stuck = _chase(S | D, b, pres, bound, steps)
        if stuck is not None:
            return stuck
    return None


def prec(a, b, pres, bound=16, method="chase"):
    """
    Decide a <= b in the least congruence preorder generated by R.

    The chase saturates each disjunct of a under the relations: a state S
    with S <= u and not S <= v branches into S + D for each disjunct D of
    v. Every branch must reach b; a branch with no applicable relation is a
    point where a holds and b fails.

    Args:
        a (Expression): Left side
        b (Expression): Right side
        pres (Presentation): The presentation
        bound (int): Largest conjunction state explored
        method (str): "chase", or "closure" for the brute-force fixpoint

    Returns:
        PrecResult: HOLDS with the chase steps, REFUTED with a point, or UNKNOWN
    """
    if method == "closure":
        return _prec_by_closure(a, b, pres)
    if leq(a, b):
        return PrecResult(Outcome.HOLDS, chain=[("lattice", str(a), str(b))])
    steps = []
    for S in normalize(a).disjuncts:
        stuck = _chase(S, b, pres, bound, steps)
        if stuck == "bound":
            logger.warning(f"prec stopped at bound {bound}")
            return PrecResult(Outcome.UNKNOWN, chain=steps)
        if stuck is not None:
            return PrecResult(Outcome.REFUTED, chain=steps,
                              point=FramePoint.from_set(stuck, pres.n_generators))
    return PrecResult(Outcome.HOLDS, chain=steps)


def antichain_expressions(n):
    """Every normalized expression over n generators."""
    subsets = [frozenset(c) for k in range(n + 1) for c in combinations(range(n), k)]
    found = {normalize(Expression.bot())}
    frontier = [Expression.bot()]
    while frontier:
        nxt = []
        for e in frontier:
            for s in subsets:
                f = normalize(join(e, Expression((s,))))
                if f not in found:
                    found.add(f)
                    nxt.append(f)
        frontier = nxt
    return sorted(found, key=lambda e: (len(e.disjuncts), [_disjunct_key(d) for d in e.disjuncts]))


def congruence_closure(pres, max_generators=4):
    """
    Brute-force least preorder on all normalized expressions containing the
    lattice order and R, closed under transitivity and under meets and
    joins with a fixed expression.

    Returns:
        tuple: (expressions, set of (i, j) index pairs meaning e_i <= e_j)

    Raises:
        TooLarge: above max_generators generators
    """
    n = pres.n_generators
    if n > max_generators:
        raise TooLarge(n, max_generators, what="generator set")
    exprs = antichain_expressions(n)
    index = {e: i for i, e in enumerate(exprs)}
    size = len(exprs)
    rel = [[leq(exprs[i], exprs[j]) for j in range(size)] for i in range(size)]
    for u, v in pres.relations:
        rel[index[normalize(u)]][index[normalize(v)]] = True

    meets = [[index[normalize(meet(exprs[i], exprs[k]))] for k in range(size)] for i in range(size)]
    joins = [[index[normalize(join(exprs[i], exprs[k]))] for k in range(size)] for i in range(size)]

    changed = True
    while changed:
        changed = False
        for k in range(size):
            for i in range(size):
                if rel[i][k]:
                    for j in range(size):
                        if rel[k][j] and not rel[i][j]:
                            rel[i][j] = True
                            changed = True
        for i in range(size):
            for j in range(size):
                if not rel[i][j]:
                    continue
                for k in range(size):
                    mi, mj = meets[i][k], meets[j][k]
                    if not rel[mi][mj]:
                        rel[mi][mj] = True
                        changed = True
                    ji, jj = joins[i][k], joins[j][k]
                    if not rel[ji][jj]:
                        rel[ji][jj] = True
                        changed = True
    pairs = {(i, j) for i in range(size) for j in range(size) if rel[i][j]}
    return exprs, pairs


def _prec_by_closure(a, b, pres):
    exprs, pairs = congruence_closure(pres)
    index = {e: i for i, e in enumerate(exprs)}
    holds = (index[normalize(a)], index[normalize(b)]) in pairs
    if holds:
        return PrecResult(Outcome.HOLDS, chain=[("closure", str(a), str(b))])
    for valuation in enumerate_points(pres):
        if a.holds_under(valuation) and not b.holds_under(valuation):
            return PrecResult(Outcome.REFUTED, point=FramePoint.from_set(valuation, pres.n_generators))
    return PrecResult(Outcome.UNKNOWN)


class Rule(Enum):
    BASE = "Base"
    CUT = "Cut"
    LJOIN = "LJoin"
    RJOIN = "RJoin"


@dataclass(frozen=True)
class ProofTree:
    """
    A derivation node. Base leaves carry a witness (x, y, j) for the
    relation axiom (x & u_j, y & v_j) with x <= y, or None for a lattice leaf.
    """

    rule: Rule
    antecedent: Expression
    succedent: Expression
    children: tuple = ()
    witness: Optional[tuple] = None

    def depth(self):
        return 1 + max((c.depth() for c in self.children), default=0)

    def render(self, names=None, indent=0):
        pad = "  " * indent
        head = f"{pad}{self.rule.value}: {self.antecedent.render(names)} |- {self.succedent.render(names)}"
        if self.witness is not None:
            head += f"  [R{self.witness[2]}]"
        return "\n".join([head] + [c.render(names, indent + 1) for c in self.children])


@dataclass
class DeriveResult:
    outcome: Outcome
    tree: Optional[ProofTree] = None
    point: Optional[FramePoint] = None

    def __str__(self):
        return {"holds": "proved"}.get(self.outcome.value, self.outcome.value)


class _Stuck(Exception):
    def __init__(self, state):
        super().__init__(state)
        self.state = state


class _TooDeep(Exception):
    pass


def _relation_axiom(A, B, pres):
    """Find (x, y, j) with A == x & u_j, B == y & v_j and x <= y."""
    for j, (u, v) in enumerate(pres.relations):
        if equivalent(A, meet(A, u)) and equivalent(B, meet(B, v)) and leq(A, B):
            return (A, B, j)
    return None


def _close_leaf(A, B, pres, base_reading):
    """A closing Base (or RJoin + Base) node for A |- B, or None."""
    witness = _relation_axiom(A, B, pres)
    if witness is not None:
        return ProofTree(Rule.BASE, A, B, witness=witness)
    if base_reading != "lattice" or not leq(A, B):
        return None
    if len(B.disjuncts) <= 1:
        return ProofTree(Rule.BASE, A, B)
    for D in B.disjuncts:
        part = Expression((D,))
        if leq(A, part):
            return ProofTree(Rule.RJOIN, A, B, children=(ProofTree(Rule.BASE, A, part),))
    return ProofTree(Rule.BASE, A, B)


def _derive(A, B, pres, depth, base_reading):
    if depth <= 0:
        raise _TooDeep()
    A = normalize(A)
    if len(A.disjuncts) != 1:
        children = tuple(_derive(Expression((D,)), B, pres, depth - 1, base_reading) for D in A.disjuncts)
        return ProofTree(Rule.LJOIN, A, B, children=children)

    leaf = _close_leaf(A, B, pres, base_reading)
    if leaf is not None:
        if leaf.depth() > depth:
            raise _TooDeep()
        return leaf
    S = A.disjuncts[0]
    j = _applicable(S, pres)
    if j is None:
        if leq(A, B):
            # lattice-true but not closable under the relation-only reading
            raise _TooDeep()
        raise _Stuck(S)
    u, v = pres.relations[j]
    c = normalize(meet(A, v))
    left = ProofTree(Rule.BASE, A, c, witness=(A, A, j))
    right = _derive(c, B, pres, depth - 1, base_reading)
    return ProofTree(Rule.CUT, A, B, children=(left, right))


def derives(a, b, pres, depth=10, base_reading="lattice"):
    """
    Search for a proof of a |- b, lowest rule first, deterministic.

    Args:
        base_reading (str): "lattice" lets Base close any a <= b;
            "relation-only" closes only relation axioms

    Returns:
        DeriveResult: PROVED tree (outcome HOLDS), REFUTED point, or UNKNOWN
    """
    try:
        tree = _derive(a, b, pres, depth, base_reading)
    except _Stuck as stuck:
        return DeriveResult(Outcome.REFUTED, point=FramePoint.from_set(stuck.state, pres.n_generators))
    except _TooDeep:
        return DeriveResult(Outcome.UNKNOWN)
    if tree.antecedent != normalize(a):
        tree = ProofTree(tree.rule, a, tree.succedent, tree.children, tree.witness)
    return DeriveResult(Outcome.HOLDS, tree=tree)


def check_proof_tree(tree, pres, base_reading="lattice"):
    """
    Validate every node against its rule's side conditions.

    Returns:
        list: problems, empty when the tree is valid
    """
    problems = []
    A, B = tree.antecedent, tree.succedent
    if tree.rule is Rule.BASE:
        if tree.children:
            problems.append("Base node with children")
        if tree.witness is not None:
            x, y, j = tree.witness
            if j >= len(pres.relations):
                problems.append(f"unknown relation {j}")
            else:
                u, v = pres.relations[j]
                if not (equivalent(A, meet(x, u)) and equivalent(B, meet(y, v)) and leq(x, y)):
                    problems.append(f"Base node {A} |- {B} is not an instance of relation {j}")
        elif base_reading != "lattice" or not leq(A, B):
            problems.append(f"Base leaf {A} |- {B} does not close")
    elif tree.rule is Rule.CUT:
        if len(tree.children) != 2:
            problems.append("Cut needs two children")
        else:
            left, right = tree.children
            if left.antecedent != A or right.succedent != B or left.succedent != right.antecedent:
                problems.append(f"Cut at {A} |- {B} does not chain")
    elif tree.rule is Rule.LJOIN:
        parts = normalize(A).disjuncts
        if len(parts) != len(tree.children):
            problems.append(f"LJoin at {A} has {len(tree.children)} children for {len(parts)} disjuncts")
        for D, child in zip(parts, tree.children):
            if child.antecedent != Expression((D,)) or child.succedent != B:
                problems.append(f"LJoin child {child.antecedent} |- {child.succedent} mismatched")
    elif tree.rule is Rule.RJOIN:
        if len(tree.children) != 1:
            problems.append("RJoin needs one child")
        else:
            child = tree.children[0]
            if child.antecedent != A or not leq(child.succedent, B) or len(child.succedent.disjuncts) != 1:
                problems.append(f"RJoin at {A} |- {B} does not pick a disjunct")
    for child in tree.children:
        problems.extend(check_proof_tree(child, pres, base_reading))
    return problems


def enumerate_points(pres):
    """
    Every two-valued valuation of the generators that respects R.

    Raises:
        TooLarge: above the configured generator bound
    """
    n = pres.n_generators
    bound = get_settings().max_generators
    if n > bound:
        logger.warning(f"Refusing to enumerate points of {pres.name}: {n} generators")
        raise TooLarge(n, bound, what="generator set")
    points = []
    for mask in range(1 << n):
        valuation = frozenset(g for g in range(n) if mask >> g & 1)
        if pres.satisfies(valuation):
            points.append(valuation)
    return sorted(points, key=_disjunct_key)


def spatial_check(pres, a, b, depth=10, bound=16):
    """
    Compare prec and derives with point-set inclusion over all points.

    Returns:
        dict: verdicts plus a list of disagreements (empty when consistent)
    """
    points = enumerate_points(pres)
    semantic = all(b.holds_under(p) for p in points if a.holds_under(p))
    by_chase = prec(a, b, pres, bound)
    by_proof = derives(a, b, pres, depth)
    disagreements = []
    expected = Outcome.HOLDS if semantic else Outcome.REFUTED
    if by_chase.outcome is not expected:
        disagreements.append(f"prec={by_chase.outcome.value} semantic={expected.value}")
    if by_proof.outcome is not Outcome.UNKNOWN and by_proof.outcome is not expected:
        disagreements.append(f"derives={by_proof.outcome.value} semantic={expected.value}")
    for result in (by_chase, by_proof):
        if result.outcome is Outcome.REFUTED:
            x = result.point
            if point_sat(x, a, len(x.stages)) is not Tri.YES or point_sat(x, b, len(x.stages)) is not Tri.NO:
                disagreements.append(f"witness {x} does not falsify the goal")
    if by_proof.tree is not None:
        disagreements.extend(check_proof_tree(by_proof.tree, pres))
    if disagreements:
        logger.warning(f"Spatial check on {pres.name}: {disagreements}")
    return {
        "semantic": "holds" if semantic else "refuted",
        "prec": by_chase.outcome.value,
        "derives": str(by_proof),
        "points": len(points),
        "disagreements": disagreements,
    }
