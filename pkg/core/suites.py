"""
Suites Module

Named invariant suites run by `qpk check`. Every suite draws its samples
from a random.Random seeded by the caller, so a (suite, flags, seed)
triple always produces the same report.
"""

import logging
import random
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from tqdm import tqdm

import fixtures
from codes import member_at
from convert import qm_to_uf, uf_to_pi02
from errors import UnknownName
from frames import Outcome, spatial_check
from posets import (ComparisonKind, enumerate_filters, filters_equal, handyfy_uf, is_handy, product, random_poset,
                    settle, strictly_below)
from qmetric import axioms_check, dyadic, point_dist
from reports import Report
from universal import ExplicitSubset, FinSet, point_stage
from verdicts import Tri

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("Suites")

# violations listed in a report; the count is always complete
MAX_LISTED = 20


@dataclass
class SuiteOptions:
    target: Optional[str] = None
    samples: int = 100
    seed: int = 0
    depth: int = 8
    precision: int = 16
    exhaustive: Optional[int] = None
    quiet: bool = False


def progress(iterable, desc, quiet, total=None):
    """tqdm on stderr, only when someone is watching."""
    return tqdm(iterable, desc=desc, total=total, file=sys.stderr,
                disable=quiet or not sys.stderr.isatty(), leave=False)


def _finish(report, violations, checked):
    report.verdict("checked", checked)
    report.verdict("violations", len(violations))
    report.verdict("result", "fail" if violations else "pass")
    for v in violations[:MAX_LISTED]:
        report.violation(**v)
    report.exit_code = 1 if violations else 0
    return report


def _new_report(name, opts):
    args = {"samples": opts.samples, "depth": opts.depth, "precision": opts.precision}
    if opts.target:
        args["target"] = opts.target
    if opts.exhaustive is not None:
        args["exhaustive"] = opts.exhaustive
    return Report(command=f"check {name}", arguments=args, seed=opts.seed)


# ---------------------------------------------------------------------------
# quasi-metric


def check_quasi_metric(opts):
    """
    Nonnegativity, the triangle inequality and T0 separation.

    With --exhaustive n on the universal space every subset of {0..n} is
    used; otherwise `samples` elements are drawn from the space's sampler.
    """
    name = opts.target or "pn"
    space = fixtures.lookup(fixtures.SPACES, "space", name)
    report = _new_report("quasi-metric", opts)
    rng = random.Random(opts.seed)

    if opts.exhaustive is not None:
        if name == "pn":
            universe = range(opts.exhaustive + 1)
            elems = [FinSet.of(k for k in universe if mask >> k & 1) for mask in range(1 << len(universe))]
        else:
            elems = space.carrier(1 << (opts.exhaustive + 1))
    else:
        elems = [space.sample(rng) for _ in progress(range(opts.samples), "sampling", opts.quiet)]
    logger.info(f"quasi-metric suite on {space.name}: {len(elems)} elements")

    violations = axioms_check(space, elems, opts.precision)
    tol = Fraction(0) if space.exact else dyadic(opts.precision - 1)
    for i, a in enumerate(progress(elems, "separation", opts.quiet)):
        for b in elems[i + 1:]:
            if a == b:
                continue
            if space.dist(a, b, opts.precision) <= tol and space.dist(b, a, opts.precision) <= tol:
                violations.append({"axiom": "separation", "a": space.label(a), "b": space.label(b)})
    report.verdict("space", space.name)
    return _finish(report, violations, f"{len(elems) ** 3} triples")


# ---------------------------------------------------------------------------
# handy


def _uf_streams(P):
    catalog = enumerate_filters(P)
    return catalog, [catalog.stream(F) for F in catalog.uf]


def _handy_levels(P, Q, top):
    """Elements (p, n) of the handyfied Q with level n <= top."""
    return [(p, n) for p in P.carrier() for n in range(top + 1)
            if Q.element_at(Q.index_of((p, n))) is not None]


def _minimal_upsets(elems, leq):
    """Up-sets of the minimal elements of a finite preorder: its unbounded filters."""
    def lt(a, b):
        return leq(a, b) and not leq(b, a)

    return {frozenset(q for q in elems if leq(m, q)) for m in elems if not any(lt(r, m) for r in elems)}


def handy_sample(P, depth):
    """Violations of the handyfication contract on one finite poset."""
    violations = []
    Q, iso = handyfy_uf(P)
    verdict, witness = is_handy(Q, 4 * depth)
    if verdict is not Tri.YES:
        violations.append({"poset": P.name, "check": "handy", "witness": witness})
    catalog, streams = _uf_streams(P)
    recovered = set()
    images = []
    for F in streams:
        G = iso.to_target(F)
        images.append(G)
        back = iso.to_source(G)
        cmp = filters_equal(P, F, back, depth)
        if cmp.kind is not ComparisonKind.EQUAL_AT_DEPTH:
            violations.append({"poset": P.name, "check": "P round trip", "filter": F.labels(1)[0],
                               "result": str(cmp)})
        recovered.add(settle(P, back, depth))
        again = iso.to_target(iso.to_source(G))
        cmp = filters_equal(Q, G, again, depth)
        if cmp.kind is not ComparisonKind.EQUAL_AT_DEPTH:
            violations.append({"poset": P.name, "check": "P' round trip", "filter": F.labels(1)[0],
                               "result": str(cmp)})
    if recovered != set(catalog.uf):
        violations.append({"poset": P.name, "check": "|UF| preserved",
                           "expected": len(catalog.uf), "got": len(recovered)})

    # past level |P| only minimal elements of P survive, so the bottom of
    # the level prefix generates every unbounded filter of Q
    top = P.size + 1
    levels = _handy_levels(P, Q, top)
    bottoms = [m for m in levels if not any(Q.lt(r, m) for r in levels)]
    direct = _minimal_upsets(P.carrier(), P.leq)
    found = {frozenset(q for q in P.carrier() if P.leq(m[0], q)) for m in bottoms}
    if found != direct:
        violations.append({"poset": P.name, "check": "UF(P') on levels", "expected": len(direct),
                           "got": len(found)})
    for m in bottoms:
        if next(strictly_below(Q, m), None) is None:
            violations.append({"poset": P.name, "check": "UF(P') = NP(P')", "element": Q.label(m)})
        if not any(G.basic_verdict(m, top + 1) is Tri.YES for G in images):
            violations.append({"poset": P.name, "check": "surjective", "element": Q.label(m)})
    return violations


def check_handy(opts):
    """handyfy_uf on seeded random preorders with at most eight elements."""
    report = _new_report("handy", opts)
    rng = random.Random(opts.seed)
    violations = []
    for k in progress(range(opts.samples), "handy", opts.quiet):
        P = random_poset(rng, rng.randint(1, 8), name=f"random{k}")
        violations.extend(handy_sample(P, opts.depth))
    return _finish(report, violations, opts.samples)


# ---------------------------------------------------------------------------
# roundtrip


def uf_pi02_sample(P, depth, rng, probes=8):
    """
    Violations of the UF(P') <-> B correspondence for the handyfied P'.

    Filter images must not be refuted at stage `depth` and must decode to
    the filter they came from. Their stage prefixes must be exactly the
    truncations of the unbounded filters of P', enumerated directly from
    the valid elements. Finite subsets (never points of B) must be refuted:
    all subsets of {0..4}, then `probes` random subsets of {0..7}.
    """
    violations = []
    Q, iso = handyfy_uf(P)
    B, forward, backward = uf_to_pi02(Q)
    _, streams = _uf_streams(P)
    n = P.size
    stage = n * (n + 1) // 2 + 2 * n + 4
    images = {}
    for F in streams:
        x = forward.image(iso.to_target(F))
        label = F.labels(1)[0]
        if member_at(x, B, depth) is Tri.NO:
            violations.append({"poset": P.name, "check": "image in B", "filter": label})
        key = point_stage(x, stage).as_set
        if key in images:
            violations.append({"poset": P.name, "check": "injective", "filter": label, "clash": images[key]})
        images[key] = label
        back = iso.to_source(backward.image(x))
        cmp = filters_equal(P, F, back, depth)
        if cmp.kind is not ComparisonKind.EQUAL_AT_DEPTH:
            violations.append({"poset": P.name, "check": "g-hat round trip", "filter": label,
                               "result": str(cmp)})

    # a filter of P' holds (q, l) exactly when q is in its P-filter
    valid = [k for k in range(stage + 1) if Q.element_at(k) is not None]
    expected = {frozenset(k for k in valid if Q.element_at(k)[0] in U)
                for U in _minimal_upsets(P.carrier(), P.leq)}
    if expected != set(images):
        violations.append({"poset": P.name, "check": f"stage-{stage} inhabitants",
                           "expected": len(expected), "got": len(images)})

    candidates = [FinSet.of(k for k in range(5) if mask >> k & 1) for mask in range(32)]
    candidates += [FinSet.of(k for k in range(8) if rng.random() < 0.5) for _ in range(probes)]
    for S in candidates:
        top = max(S.elements, default=0)
        if member_at(ExplicitSubset.finite(S), B, 3 * (top + 2)) is not Tri.NO:
            violations.append({"poset": P.name, "check": "finite set refuted", "set": str(S)})
    return violations


def qm_uf_sample(space, P, phi, psi, x, depth):
    """psi(phi(x)) within 2^-depth of x, and phi(psi(F)) equal to F."""
    violations = []
    F = phi.image(x)
    y = psi.image(F)
    there, back = point_dist(x, y, depth + 2), point_dist(y, x, depth + 2)
    if there >= dyadic(depth) or back >= dyadic(depth):
        violations.append({"space": space.name, "check": "psi(phi(x))", "point": str(x),
                           "distance": str(max(there, back))})
    cmp = filters_equal(P, F, phi.image(y), depth)
    if cmp.kind is not ComparisonKind.EQUAL_AT_DEPTH:
        violations.append({"space": space.name, "check": "phi(psi(F))", "point": str(x), "result": str(cmp)})
    return violations


def product_sample(P, Q, depth):
    """Pairing and projections on every pair of unbounded filters."""
    violations = []
    R, codes = product(P, Q)
    _, left = _uf_streams(P)
    _, right = _uf_streams(Q)
    seen = set()
    for F in left:
        for G in right:
            H = codes.pair(F, G)
            a, b = codes.project(0, H), codes.project(1, H)
            for original, projected in ((F, a), (G, b)):
                cmp = filters_equal(original.poset, original, projected, depth)
                if cmp.kind is not ComparisonKind.EQUAL_AT_DEPTH:
                    violations.append({"product": R.name, "check": "projection", "filter": original.name,
                                       "result": str(cmp)})
            seen.add((settle(P, a, depth), settle(Q, b, depth)))
            steps = H.check(depth)
            if steps:
                violations.append({"product": R.name, "check": "pairing descends", "filter": H.name, "steps": steps})
    pairs = [(p, q) for p in P.carrier() for q in Q.carrier()]
    direct = _minimal_upsets(pairs, lambda x, y: P.leq(x[0], y[0]) and Q.leq(x[1], y[1]))
    found = {frozenset((p, q) for p in A for q in B) for A, B in seen}
    if found != direct:
        violations.append({"product": R.name, "check": "UF(PxQ) = UF(P) x UF(Q)", "expected": len(direct),
                           "got": len(found)})
    return violations


def check_roundtrip(opts):
    """
    Round trips through the conversions. Targets: `uf-pi02` (default),
    `qm-uf` (Cantor space) and `product`.
    """
    target = opts.target or "uf-pi02"
    report = _new_report("roundtrip", opts)
    rng = random.Random(opts.seed)
    violations = []
    if target == "uf-pi02":
        for k in progress(range(opts.samples), target, opts.quiet):
            P = random_poset(rng, rng.randint(1, 6), name=f"random{k}")
            violations.extend(uf_pi02_sample(P, opts.depth, rng))
    elif target == "qm-uf":
        space = fixtures.cantor_space()
        P, phi, psi = qm_to_uf(space)
        for _ in progress(range(opts.samples), target, opts.quiet):
            x = fixtures.random_cantor_point(space, rng)
            violations.extend(qm_uf_sample(space, P, phi, psi, x, opts.depth))
    elif target == "product":
        for k in progress(range(opts.samples), target, opts.quiet):
            P = random_poset(rng, rng.randint(1, 4), name=f"p{k}")
            Q = random_poset(rng, rng.randint(1, 4), name=f"q{k}")
            violations.extend(product_sample(P, Q, opts.depth))
    else:
        raise UnknownName(target, "roundtrip target")
    report.verdict("target", target)
    return _finish(report, violations, opts.samples)


# ---------------------------------------------------------------------------
# frame-triad


def random_goal(rng, n_generators):
    pres = fixtures.random_presentation(rng, n_generators, 2)
    return pres.relations[0][0], pres.relations[1][1]


def triad_sample(pres, a, b, depth):
    """spatial_check on one goal; returns (violations, derives was unknown)."""
    result = spatial_check(pres, a, b, depth)
    goal = f"{a.render(pres.names)} <= {b.render(pres.names)}"
    violations = [{"frame": pres.name, "goal": goal, "problem": d} for d in result["disagreements"]]
    return violations, result["derives"] == Outcome.UNKNOWN.value


def check_frame_triad(opts):
    """
    prec against point semantics and derives against prec on seeded
    presentations with at most three generators and two relations.
    """
    report = _new_report("frame-triad", opts)
    rng = random.Random(opts.seed)
    violations = []
    unknown = 0
    for k in progress(range(opts.samples), "frame-triad", opts.quiet):
        n = rng.randint(1, 3)
        pres = fixtures.random_presentation(rng, n, rng.randint(0, 2))
        pres = replace(pres, name=f"random{k}")
        a, b = random_goal(rng, n)
        found, was_unknown = triad_sample(pres, a, b, max(opts.depth, 10))
        violations.extend(found)
        unknown += was_unknown
    rate = Fraction(unknown, max(opts.samples, 1))
    report.verdict("unknown_rate", f"{float(rate):.3f}")
    if rate >= Fraction(1, 20):
        violations.append({"check": "unknown rate", "rate": f"{float(rate):.3f}"})
    return _finish(report, violations, opts.samples)


SUITES = {
    "quasi-metric": (check_quasi_metric, "quasi-metric axioms of a builtin space"),
    "handy": (check_handy, "handyfication of random finite preorders"),
    "roundtrip": (check_roundtrip, "conversion round trips (uf-pi02, qm-uf, product)"),
    "frame-triad": (check_frame_triad, "prec, derives and point semantics agree"),
}


def run_suite(name, opts):
    """
    Run a named suite.

    Raises:
        UnknownName: for an unregistered suite
    """
    if name not in SUITES:
        raise UnknownName(name, "suite")
    logger.info(f"Running suite {name} (seed {opts.seed}, samples {opts.samples})")
    return SUITES[name][0](opts)
