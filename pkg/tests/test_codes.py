from dataclasses import replace

import pytest

from codes import (BasicOpen, BorelCode, Listing, Pi02Code, apply, basic_open, closed_code, complement,
                   compose, empty_code, identity_code, in_domain_at, interleave, member_at, open_code,
                   pi02_conjoin, pi02_from_pairs, preimage, rank_check, sigma_code, tree_to_pi02, whole_code)
from errors import SpaceMismatch
from posets import FilterStream, handyfy_uf
from universal import ExplicitSubset, FinSet, PNPoint, PN_SPACE
from verdicts import Tri


@pytest.fixture
def contains0():
    return pi02_from_pairs([([FinSet.of([0])], [FinSet()])], disjoint=True)


def finite(*items):
    return ExplicitSubset.finite(items)


class TestListing:
    def test_finite(self):
        lst = Listing.of(1, 2, 3)
        assert lst.take(2) == [1, 2]
        assert lst.exhausted_by(3)
        assert lst.item_at(7) is None

    def test_rule_skips_gaps(self):
        lst = Listing.from_rule(lambda i: i if i % 2 == 0 else None)
        assert lst.take(5) == [0, 2, 4]
        assert not lst.exhausted_by(100)

    def test_needs_exactly_one_source(self):
        with pytest.raises(ValueError):
            Listing()

    def test_interleave(self):
        assert interleave([Listing.of(1), Listing.of(2, 3)]).items == (1, 2, 3)
        mixed = interleave([Listing.of("a"), Listing.from_rule(lambda i: i)])
        assert [mixed.item_at(i) for i in range(4)] == ["a", 0, None, 1]

    def test_mapped_drops_none(self):
        assert Listing.of(1, 2, 3).mapped(lambda x: x * 10 if x != 2 else None).items == (10, 30)


class TestMembership:
    def test_open_and_closed(self):
        U = open_code(PN_SPACE, [FinSet.of([0])])
        assert member_at(finite(0), U, 1) is Tri.YES
        assert member_at(finite(1), U, 1) is Tri.NO
        assert member_at(finite(0), closed_code(PN_SPACE, [FinSet.of([0])]), 1) is Tri.NO
        assert member_at(finite(0), complement(U), 1) is Tri.NO

    def test_empty_and_whole(self):
        assert member_at(finite(3), empty_code(), 0) is Tri.NO
        assert member_at(finite(3), whole_code(), 0) is Tri.YES

    def test_pi02_exact_points(self, contains0):
        assert member_at(finite(0), contains0, 1) is Tri.YES
        assert member_at(finite(1), contains0, 1) is Tri.NO

    def test_staged_point_waits(self, contains0):
        x = PNPoint.from_stages([[], [], [0]])
        assert member_at(x, contains0, 1) is Tri.UNKNOWN
        assert member_at(x, contains0, 2) is Tri.YES

    def test_to_borel_keeps_membership(self, contains0):
        B = contains0.to_borel()
        for x in (finite(0), finite(1), finite(0, 4)):
            assert member_at(x, B, 2) is member_at(x, contains0, 2)

    def test_rule_listing_never_refutes_early(self):
        U = open_code(PN_SPACE, Listing.from_rule(lambda i: BasicOpen(PN_SPACE, FinSet.of([i + 5]))))
        assert member_at(finite(0), U, 3) is Tri.UNKNOWN
        assert member_at(finite(6), U, 3) is Tri.YES

    def test_sigma_code(self):
        v = open_code(PN_SPACE, [FinSet.of([0])])
        w = open_code(PN_SPACE, [FinSet.of([1])])
        D = sigma_code(PN_SPACE, [(v, w)])
        assert member_at(finite(0), D, 1) is Tri.YES
        assert member_at(finite(0, 1), D, 1) is Tri.NO

    def test_space_mismatch(self):
        U = open_code("uf:chain3", [0])
        with pytest.raises(SpaceMismatch):
            member_at(finite(0), U, 1)

    def test_conjoin(self, contains0):
        contains1 = pi02_from_pairs([([FinSet.of([1])], [FinSet()])])
        both = pi02_conjoin([contains0, contains1])
        assert member_at(finite(0, 1), both, 2) is Tri.YES
        assert member_at(finite(1), both, 2) is Tri.NO
        assert not both.disjoint

    def test_conjoin_rejects_mixed_spaces(self, contains0):
        with pytest.raises(SpaceMismatch):
            pi02_conjoin([contains0, Pi02Code("qm:cantor", Listing.empty())])


class TestRankCheck:
    def test_well_formed(self, contains0):
        assert rank_check(open_code(PN_SPACE, [FinSet()]), 3) == []
        assert rank_check(contains0.to_borel(), 3) == []

    def test_problems(self):
        assert any("not a pair" in p for p in rank_check(BorelCode(PN_SPACE, 1, 2, Listing.of(42)), 3))
        assert any("polarity" in p for p in rank_check(BorelCode(PN_SPACE, 2, 1, Listing.empty()), 3))
        assert any("above" in p for p in rank_check(BorelCode(PN_SPACE, 1, 5, Listing.empty()), 3))
        wrong = BorelCode(PN_SPACE, 1, 1, Listing.of(BasicOpen("qm:cantor", "0")))
        assert rank_check(wrong, 3)


class TestTrees:
    def test_nonempty_follows_paths(self):
        everything = lambda s: True
        stump = {()}
        tc = tree_to_pi02([everything, stump], bound=4)
        assert tc.nonempty_at(0, 3) is Tri.YES
        assert tc.nonempty_at(1, 3) is Tri.NO
        assert tc.nonempty_at(3, 3) is Tri.NO

    def test_witness_is_a_graph(self):
        tc = tree_to_pi02([lambda s: all(v == 0 for v in s)], bound=3)
        w = tc.witness(0, 2)
        assert w is not None and len(w) == 3


class TestMaps:
    def setup_method(self):
        self.basics = [FinSet.of([0]), FinSet.of([1])]
        self.phi = identity_code(PN_SPACE, self.basics)

    def test_apply(self):
        assert apply(self.phi, finite(0), 2) == [basic_open([0])]
        assert apply(self.phi, finite(0, 1), 2) == [basic_open([0]), basic_open([1])]

    def test_preimage(self):
        U = preimage(self.phi, basic_open([1]))
        assert member_at(finite(1), U, 2) is Tri.YES
        with pytest.raises(SpaceMismatch):
            preimage(self.phi, BasicOpen("qm:cantor", "0"))

    def test_domain(self):
        assert in_domain_at(self.phi, finite(0), 2).verdict is Tri.YES
        conflicted = replace(self.phi, conflict=lambda V, W: True)
        result = in_domain_at(conflicted, finite(0, 1), 2)
        assert result.verdict is Tri.NO and result.witness is not None

    def test_domain_of_handy_image(self, chain3):
        _, iso = handyfy_uf(chain3)
        bounded = in_domain_at(iso.forward, FilterStream.from_list(chain3, [1]), 4)
        assert bounded.verdict is Tri.UNKNOWN
        assert "bounded filter" in bounded.witness
        unbounded = in_domain_at(iso.forward, FilterStream.from_list(chain3, [2]), 4)
        assert unbounded.verdict is Tri.YES
        assert unbounded.image(FilterStream.from_list(chain3, [2])).at(4)[0] == 2

    def test_compose(self):
        both = compose(self.phi, self.phi)
        assert len(both.triples) == 2
        assert apply(both, finite(1), 4) == [basic_open([1])]
        assert both.image(finite(1)) is not None

    def test_compose_mismatch(self):
        other = identity_code("qm:cantor", ["0"])
        with pytest.raises(SpaceMismatch):
            compose(self.phi, other)
