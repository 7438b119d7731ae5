from types import SimpleNamespace

import pytest

import suites
from errors import UnknownName
from fixtures import cantor_space, implication_frame, random_cantor_point
from convert import qm_to_uf
from frames import Expression
from posets import handyfy_uf, product, random_poset
from suites import (MAX_LISTED, SUITES, SuiteOptions, handy_sample, product_sample, qm_uf_sample, run_suite,
                    triad_sample, uf_pi02_sample)


def quick(**kwargs):
    base = dict(samples=5, seed=3, depth=6, quiet=True)
    base.update(kwargs)
    return SuiteOptions(**base)


class TestSamples:
    def test_handy(self, chain3, diamond, rng):
        assert handy_sample(chain3, 6) == []
        assert handy_sample(diamond, 6) == []
        for n in range(1, 6):
            assert handy_sample(random_poset(rng, n), 6) == []

    def test_uf_pi02(self, chain3, antichain2, rng):
        assert uf_pi02_sample(chain3, 6, rng) == []
        assert uf_pi02_sample(antichain2, 6, rng) == []

    def test_qm_uf(self, rng):
        space = cantor_space()
        P, phi, psi = qm_to_uf(space)
        for _ in range(5):
            assert qm_uf_sample(space, P, phi, psi, random_cantor_point(space, rng), 8) == []

    def test_product(self, chain3, antichain2):
        assert product_sample(chain3, antichain2, 5) == []

    def test_minimal_upsets(self, chain3, antichain2):
        assert suites._minimal_upsets(chain3.carrier(), chain3.leq) == {frozenset([0, 1, 2])}
        assert suites._minimal_upsets(antichain2.carrier(), antichain2.leq) == {frozenset([0]), frozenset([1])}

    def test_handy_levels_bottom_out_at_minimal(self, chain3):
        Q, _ = handyfy_uf(chain3)
        levels = suites._handy_levels(chain3, Q, 4)
        assert (0, 0) in levels and (2, 4) in levels
        assert (1, 3) not in levels
        assert [m for m in levels if not any(Q.lt(r, m) for r in levels)] == [(2, 4)]

    def test_handy_image_must_cover_every_filter(self, antichain2, monkeypatch):
        def collapsed(P):
            Q, iso = handyfy_uf(P)
            first = []

            def to_target(F):
                first.append(F)
                return iso.to_target(first[0])

            return Q, SimpleNamespace(to_target=to_target, to_source=iso.to_source)

        monkeypatch.setattr(suites, "handyfy_uf", collapsed)
        checks = {v["check"] for v in handy_sample(antichain2, 6)}
        assert "surjective" in checks

    def test_product_must_reach_every_pair(self, chain3, antichain2, monkeypatch):
        def collapsed(P, Q):
            R, codes = product(P, Q)
            first = []

            def pair(F, G):
                first.append((F, G))
                return codes.pair(*first[0])

            return R, SimpleNamespace(pair=pair, project=codes.project)

        monkeypatch.setattr(suites, "product", collapsed)
        checks = {v["check"] for v in product_sample(chain3, antichain2, 5)}
        assert "UF(PxQ) = UF(P) x UF(Q)" in checks

    def test_triad(self):
        g0, g1 = Expression.gen(0), Expression.gen(1)
        violations, unknown = triad_sample(implication_frame(), g0, g1, 10)
        assert violations == [] and not unknown


class TestRunSuite:
    def test_registry(self):
        assert sorted(SUITES) == ["frame-triad", "handy", "quasi-metric", "roundtrip"]

    @pytest.mark.parametrize("name,target", [
        ("quasi-metric", "pn"),
        ("quasi-metric", "cantor"),
        ("quasi-metric", "lower-dyadic"),
        ("handy", None),
        ("roundtrip", "uf-pi02"),
        ("roundtrip", "qm-uf"),
        ("roundtrip", "product"),
        ("frame-triad", None),
    ])
    def test_small_runs_pass(self, name, target):
        report = run_suite(name, quick(target=target))
        assert report.verdicts["result"] == "pass", report.violations
        assert report.exit_code == 0
        assert report.seed == 3

    def test_exhaustive_universal_space(self):
        report = run_suite("quasi-metric", quick(exhaustive=3))
        assert report.verdicts["checked"] == "4096 triples"
        assert report.arguments["exhaustive"] == 3

    def test_deterministic(self):
        first = run_suite("handy", quick(samples=4))
        second = run_suite("handy", quick(samples=4))
        assert first.to_json() == second.to_json()

    def test_unknown_suite_and_target(self):
        with pytest.raises(UnknownName):
            run_suite("everything", quick())
        with pytest.raises(UnknownName):
            run_suite("roundtrip", quick(target="nowhere"))
        with pytest.raises(UnknownName):
            run_suite("quasi-metric", quick(target="hilbert"))

    def test_listing_cap(self):
        assert MAX_LISTED == 20
