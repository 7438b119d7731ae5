"""
End-to-end properties at desk scale, one class per property family.
Sample counts and bounds are the ones the suites are expected to meet.
"""

import random
from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings, strategies as st

import dsl
from codes import tree_to_pi02
from convert import qm_to_uf
from errors import QpkError
from fixtures import (cantor_bit, cantor_d, cantor_normalize, cantor_space, infinitely_many_ones, no_adjacent_ones,
                      random_cantor_point, random_tree, tree_paths_oracle)
from frames import Expression, Presentation, normalize, spatial_check
from posets import random_poset
from qmetric import dprime, dyadic
from suites import SuiteOptions, handy_sample, product_sample, qm_uf_sample, run_suite, uf_pi02_sample
from universal import ExplicitSubset, FinSet, d_exact, pn_limit, point_stage
from verdicts import Tri


class TestUniversalAxioms:
    def test_all_subsets_of_six(self):
        report = run_suite("quasi-metric", SuiteOptions(target="pn", exhaustive=5, quiet=True))
        assert report.verdicts["checked"] == "262144 triples"
        assert report.violations == []
        assert report.exit_code == 0


class TestHandyfication:
    def test_random_preorders(self):
        rng = random.Random(2)
        for k in range(200):
            P = random_poset(rng, rng.randint(1, 8), name=f"p{k}")
            assert handy_sample(P, 8) == []


class TestUfPi02:
    def test_random_handyfied_posets(self):
        rng = random.Random(3)
        for k in range(100):
            P = random_poset(rng, rng.randint(1, 6), name=f"p{k}")
            assert uf_pi02_sample(P, 8, rng) == []


def small_expressions(n):
    """Expressions with at most two disjuncts of at most two generators."""
    meets = [frozenset(c) for k in range(3) for c in combinations(range(n), k)]
    found = {normalize(Expression.bot())}
    for k in (1, 2):
        for parts in combinations(meets, k):
            found.add(normalize(Expression(parts)))
    return sorted(found, key=lambda e: e.render())


class TestFrameTriad:
    def run_family(self, cases):
        disagreements, unknown = [], 0
        for pres, a, b in cases:
            result = spatial_check(pres, a, b, depth=10)
            disagreements.extend(result["disagreements"])
            unknown += result["derives"] == "unknown"
        return disagreements, Fraction(unknown, len(cases))

    def test_one_generator_exhaustively(self):
        exprs = small_expressions(1)
        relations = [(u, v) for u in exprs for v in exprs]
        cases = []
        for size in range(3):
            for rel in combinations(relations, size):
                pres = Presentation(1, rel, ("g0",), "one")
                cases.extend((pres, a, b) for a in exprs for b in exprs)
        disagreements, rate = self.run_family(cases)
        assert disagreements == []
        assert rate < Fraction(1, 20)

    def test_up_to_three_generators(self):
        rng = random.Random(4)
        cases = []
        for k in range(400):
            n = rng.randint(2, 3)
            exprs = small_expressions(n)
            rel = tuple((rng.choice(exprs), rng.choice(exprs)) for _ in range(rng.randint(0, 2)))
            pres = Presentation(n, rel, tuple(f"g{i}" for i in range(n)), f"family{k}")
            cases.append((pres, rng.choice(exprs), rng.choice(exprs)))
        disagreements, rate = self.run_family(cases)
        assert disagreements == []
        assert rate < Fraction(1, 20)


def no_adjacent_point(rng):
    blocks = lambda k: "".join(rng.choice(("0", "10")) for _ in range(k))
    return cantor_normalize(blocks(rng.randrange(4)), blocks(1 + rng.randrange(3)))


def many_ones_point(rng):
    prefix = "".join(rng.choice("01") for _ in range(rng.randrange(6)))
    cycle = "".join(rng.choice("01") for _ in range(rng.randrange(3))) + "1"
    return cantor_normalize(prefix, cycle)


class TestCompletionMetric:
    def check(self, make_subspace, make_point, seed):
        space = cantor_space()
        Y, oracles = make_subspace(space)
        rng = random.Random(seed)
        tol = dyadic(18)
        for _ in range(250):
            x, y, z = make_point(rng), make_point(rng), make_point(rng)
            xy = dprime(space, Y, x, y, 20, oracles)
            assert cantor_d(x, y) <= xy <= cantor_d(x, y) + 2
            xz = dprime(space, Y, x, z, 20, oracles)
            yz = dprime(space, Y, y, z, 20, oracles)
            assert xz <= xy + yz + tol

    def test_no_adjacent_ones(self):
        self.check(no_adjacent_ones, no_adjacent_point, 5)

    def test_infinitely_many_ones(self):
        self.check(infinitely_many_ones, many_ones_point, 6)

    def test_generated_points_lie_in_the_subspaces(self):
        rng = random.Random(7)
        for _ in range(50):
            x = no_adjacent_point(rng)
            assert all(not (cantor_bit(x, k) == "1" and cantor_bit(x, k + 1) == "1") for k in range(40))
            y = many_ones_point(rng)
            assert any(cantor_bit(y, k) == "1" for k in range(30, 40))


class TestCantorRoundTrip:
    def test_hundred_points(self):
        space = cantor_space()
        P, phi, psi = qm_to_uf(space)
        rng = random.Random(8)
        for _ in range(100):
            assert qm_uf_sample(space, P, phi, psi, random_cantor_point(space, rng), 8) == []


class TestProducts:
    def test_fifty_pairs(self):
        rng = random.Random(9)
        for k in range(50):
            P = random_poset(rng, rng.randint(1, 4), name=f"p{k}")
            Q = random_poset(rng, rng.randint(1, 4), name=f"q{k}")
            assert product_sample(P, Q, 8) == []


class TestUniversalLimits:
    def test_left_cauchy_sequences(self):
        rng = random.Random(10)
        for _ in range(200):
            target = rng.choice([
                ExplicitSubset.finite(FinSet.of(k for k in range(20) if rng.random() < 0.4)),
                ExplicitSubset.evens(),
                ExplicitSubset.odds(),
                ExplicitSubset.interval(rng.randrange(5), 5 + rng.randrange(10)),
            ])
            seq = []
            for n in range(40):
                junk = [k for k in range(n + 1, n + 6) if rng.random() < 0.5]
                seq.append(target.upto(n).union(FinSet.of(junk)))
            x = pn_limit(seq)
            assert x.invariant_violations(12) == []
            for n in range(13):
                assert point_stage(x, n) == target.upto(n)
                assert d_exact(seq[n + 1], target) < dyadic(n)


class TestTreeCodes:
    def test_nonemptiness_matches_path_search(self):
        rng = random.Random(11)
        for _ in range(100):
            tree = random_tree(rng, rng.randint(3, 6), 3)
            code = tree_to_pi02([tree], bound=7)
            assert (code.nonempty_at(0, 6) is Tri.YES) == tree_paths_oracle(tree, 6)


TOKENS = ["poset", "frame", "pi02", "point", "expr", "goal", "builtin", "elem", "order", "gen", "rel", "pair",
          "open", "coA", "disjoint", "set", "value", "top", "bot", "{", "}", "(", ")", ";", "<", "<=", "=>",
          "&", "|", ",", "a", "b", "g", "S", "T", "chain", "omega", "0", "12", "999999", "1234567", "#", "\n", " "]


class TestParserTotality:
    @settings(max_examples=10000, deadline=None)
    @given(st.lists(st.sampled_from(TOKENS), max_size=30))
    def test_token_soup(self, tokens):
        text = " ".join(tokens)
        try:
            doc = dsl.parse(text)
        except QpkError:
            return
        for name, block in doc.blocks.items():
            try:
                getattr(doc, {"expr": "expression"}.get(block.kind, block.kind))(name)
            except QpkError:
                pass

    @settings(max_examples=500, deadline=None)
    @given(st.text(max_size=60))
    def test_arbitrary_text(self, text):
        try:
            dsl.parse(text)
        except QpkError:
            pass

    @settings(max_examples=500, deadline=None)
    @given(st.lists(st.sampled_from(TOKENS[15:31] + ["g0", "g1"]), max_size=12))
    def test_goal_soup(self, tokens):
        pres = Presentation(2, (), ("g0", "g1"), "pair")
        try:
            a, b = dsl.parse_goal(" ".join(tokens), pres)
        except QpkError:
            return
        assert isinstance(a, Expression) and isinstance(b, Expression)
