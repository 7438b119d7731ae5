import pytest

from codes import (Listing, Pi02Code, closed_code, empty_code, member_at, open_code, pi02_from_pairs, sigma_code,
                   tree_to_pi02, whole_open)
from convert import (dense_sequence, filter_of_point, frame_to_pi02, np_to_pi02, pi02_to_frame, pi02_to_npuf,
                     pi02_to_qm, pi02_to_uf, qm_to_uf, uf_point_transform, uf_to_pi02, up_indices)
from errors import (DisjointnessUnknown, InexactMetric, KindMismatch, MissingConstituents, NoLimitOperator,
                    NotAFilter, NotHandy, SpaceMismatch, TooLarge)
from fixtures import (cantor_point, cantor_space, contains_pi02, implication_frame, lower_dyadic_space,
                      no_adjacent_ones)
from frames import enumerate_points
from numbering import pair
from posets import ComparisonKind, filters_equal, strict_descent
from qmetric import dyadic, point_dist
from universal import ExplicitSubset, FinSet, PN_SPACE, pn_points_agree
from verdicts import Tri


def finite(*items):
    return ExplicitSubset.finite(items)


class TestUfToPi02:
    def test_requires_handy(self, chain3):
        with pytest.raises(NotHandy):
            uf_to_pi02(chain3)

    def test_up_indices(self, omega):
        assert up_indices(omega, 3) == FinSet.of([0, 1, 2, 3])

    def test_images_and_round_trip(self, omega):
        B, forward, backward = uf_to_pi02(omega)
        F = strict_descent(omega, 0)
        x = forward.image(F)
        assert x.stage(3) == FinSet.of([0, 1, 2, 3])
        assert member_at(x, B, 6) is not Tri.NO
        back = backward.image(x)
        assert filters_equal(omega, F, back, 6).kind is ComparisonKind.EQUAL_AT_DEPTH

    def test_finite_sets_are_refuted(self, omega):
        B, _, _ = uf_to_pi02(omega)
        assert member_at(finite(0), B, 6) is Tri.NO
        assert member_at(finite(0, 1, 2), B, 12) is Tri.NO

    def test_point_transform_matches_forward(self, omega):
        F = strict_descent(omega, 0)
        assert uf_point_transform(omega, F).stage(5) == FinSet.of(range(6))
        assert filter_of_point(omega, uf_point_transform(omega, F)).labels(3) == ["c0", "c1", "c2"]


class TestPi02ToPosets:
    def test_path_poset_round_trip(self):
        P, f, g, exact = pi02_to_uf(contains_pi02(0))
        assert exact
        x = finite(0, 2)
        G = g.image(x)
        assert G.at(0) == (0, FinSet.of([0]))
        assert G.check(4) == []
        assert pn_points_agree(f.image(G), x, 4) is Tri.YES

    def test_path_poset_rejects_outside_points(self):
        _, _, g, _ = pi02_to_uf(contains_pi02(0))
        with pytest.raises(NotAFilter):
            g.image(finite(1)).at(0)

    def test_infinite_listings_are_not_exact(self):
        tc = tree_to_pi02([lambda s: True], bound=3)
        assert pi02_to_uf(tc.code)[3] is False

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            pi02_to_uf(Pi02Code("qm:cantor", Listing.empty()))

    def test_wide_exact_search_is_refused(self):
        # pair 0 forces some {k, 100}, pair 1 forbids 100: the set is empty
        wide = [FinSet.of([k, 100]) for k in range(1, 21)]
        X = pi02_from_pairs([(wide, [FinSet()]), ([], [FinSet.of([100])])], disjoint=True)
        P, _, _, exact = pi02_to_uf(X)
        assert exact
        with pytest.raises(TooLarge):
            P.element_at(pair(0, FinSet.of([1, 100]).code))

    def test_narrow_exact_search_drops_dead_elements(self):
        narrow = [FinSet.of([k, 100]) for k in range(1, 4)]
        X = pi02_from_pairs([(narrow, [FinSet()]), ([], [FinSet.of([100])])], disjoint=True)
        P, _, _, exact = pi02_to_uf(X)
        assert exact
        assert P.element_at(pair(0, FinSet.of([1, 100]).code)) is None

    def test_triple_poset_round_trip(self):
        Q, f, g = pi02_to_npuf(contains_pi02(0))
        x = finite(0, 2)
        G = g.image(x)
        assert G.check(4) == []
        assert pn_points_agree(f.image(G), x, 4) is Tri.YES

    def test_triple_levels_start_at_one(self):
        Q, _, g = pi02_to_npuf(contains_pi02(0))
        assert Q.element_at(pair(0, pair(0, FinSet.of([0]).code))) is None
        assert Q.element_at(pair(0, pair(1, FinSet.of([0]).code))) == (0, 1, FinSet.of([0]))
        assert g.image(finite(0, 2)).at(0)[1] >= 1

    def test_np_code_refutes_principal_filters(self, omega):
        code, _ = np_to_pi02(omega)
        assert member_at(finite(0), code, 4) is Tri.NO


class TestQuasiMetricToUf:
    def test_balls_round_trip(self):
        space = cantor_space()
        P, phi, psi = qm_to_uf(space)
        x = cantor_point(space, lambda k: "1" if k % 3 == 0 else "0")
        F = phi.image(x)
        assert F.check(6) == []
        y = psi.image(F)
        assert point_dist(x, y, 8) < dyadic(8)
        assert point_dist(y, x, 8) < dyadic(8)

    def test_refusals(self, cantor_no11):
        with pytest.raises(NoLimitOperator):
            qm_to_uf(lower_dyadic_space())
        with pytest.raises(InexactMetric):
            qm_to_uf(cantor_no11)


@pytest.fixture
def cantor_no11():
    space = cantor_space()
    Y, oracles = no_adjacent_ones(space)
    return pi02_to_qm(Y, [("", "0"), ("", "10"), ("1", "0")], oracles, space)


class TestCompletionSpace:
    def test_dprime_space(self, cantor_no11):
        assert cantor_no11.carrier(10) == [("", "0"), ("", "10"), ("1", "0")]
        assert cantor_no11.dist(("", "0"), ("", "0"), 8) == 0
        assert cantor_no11.dist(("", "0"), ("1", "0"), 8) >= 1

    def test_needs_declared_disjointness(self):
        space = cantor_space()
        with pytest.raises(DisjointnessUnknown):
            pi02_to_qm(Pi02Code(space.space, Listing.empty(), False), [], None, space)
        _, oracles = no_adjacent_ones(space)
        with pytest.raises(SpaceMismatch):
            pi02_to_qm(contains_pi02(0), [], oracles, space)


class TestDense:
    def test_closed(self):
        points = dense_sequence(closed_code(PN_SPACE, [FinSet.of([0])]), "closed", 2)
        assert len(points) == 4
        assert all(not p.contains(0) for p in points)

    def test_gdelta(self):
        points = dense_sequence(contains_pi02(0), "Gdelta", 2)
        assert len(points) == 4
        assert all(member_at(p, contains_pi02(0), 3) is Tri.YES for p in points)

    def test_sigma2(self):
        D = sigma_code(PN_SPACE, [(open_code(PN_SPACE, [FinSet.of([0])]), open_code(PN_SPACE, [FinSet.of([1])]))])
        points = dense_sequence(D, "Sigma2", 2)
        assert [p.upto(2) for p in points] == [FinSet.of([0]), FinSet.of([0, 2])]

    def test_kind_mismatch(self):
        with pytest.raises(KindMismatch):
            dense_sequence(contains_pi02(0), "closed", 2)
        with pytest.raises(KindMismatch):
            dense_sequence(contains_pi02(0), "weird", 2)

    def test_unknown_when_nothing_certified(self):
        nothing = Pi02Code(PN_SPACE, Listing.from_rule(lambda i: (empty_code(), whole_open())))
        assert dense_sequence(nothing, "Gdelta", 2) is Tri.UNKNOWN


class TestFrames:
    def test_frame_points_are_the_pi02_set(self):
        I = implication_frame()
        code = frame_to_pi02(I)
        points = set(enumerate_points(I))
        for mask in range(4):
            valuation = frozenset(g for g in range(2) if mask >> g & 1)
            expected = Tri.YES if valuation in points else Tri.NO
            assert member_at(ExplicitSubset.finite(valuation), code, 2) is expected

    def test_back_to_a_presentation(self):
        pres = pi02_to_frame(frame_to_pi02(implication_frame()), "I2")
        assert pres.n_generators == 2
        assert enumerate_points(pres) == enumerate_points(implication_frame())
        assert pres.render_relation(0) == "g0 => g1"

    def test_infinite_listing_refused(self):
        with pytest.raises(MissingConstituents):
            pi02_to_frame(tree_to_pi02([lambda s: True], bound=3).code)
