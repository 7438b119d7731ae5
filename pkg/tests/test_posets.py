import pytest

from codes import BasicOpen
from errors import NotAFilter, NotHandy, TooLarge
from posets import (ComparisonKind, FilterStream, antichain, check_poset, classify_filter, enumerate_filters,
                    existence_upcl_poset, filter_from_membership, filters_equal, finite_poset, handyfy_allfilters,
                    handyfy_uf, is_handy, is_maximal_filter, np_to_npuf, principal_filter, product, product_seq,
                    prune_iterate, random_poset, scan_filters, settle, strict_descent)
from verdicts import Tri


def labels_of(catalog, filters):
    return [catalog.labels(F) for F in filters]


class TestOrders:
    def test_closure(self, chain3):
        assert chain3.leq(2, 0)
        assert not chain3.leq(0, 2)
        assert chain3.lt(1, 0)

    def test_check_poset_finds_missing_transitivity(self):
        P = finite_poset("open", ["a", "b", "c"], [("b", "a"), ("c", "b")], close=False)
        assert ("transitive", 2, 1, 0) in check_poset(P, 3)

    def test_random_posets_are_preorders(self, rng):
        for n in range(1, 7):
            assert check_poset(random_poset(rng, n), n) == []

    def test_two_sorted_poset(self):
        P = existence_upcl_poset(lambda m: m % 2, 3)
        assert len(P) == 6
        assert P.leq((0, 1), (1, 1))
        assert not P.leq((0, 1), (1, 0))


class TestFilters:
    def test_chain(self, chain3):
        catalog = enumerate_filters(chain3)
        assert labels_of(catalog, catalog.filters) == [["a"], ["a", "b"], ["a", "b", "c"]]
        assert labels_of(catalog, catalog.uf) == [["a", "b", "c"]]
        assert labels_of(catalog, catalog.mf) == [["a", "b", "c"]]
        assert catalog.np == []

    def test_antichain(self, antichain2):
        catalog = enumerate_filters(antichain2)
        assert len(catalog.filters) == len(catalog.uf) == len(catalog.mf) == 2

    def test_diamond_matches_brute_force(self, diamond):
        catalog = enumerate_filters(diamond)
        assert catalog.filters == scan_filters(diamond)
        assert len(catalog.filters) == 4
        assert labels_of(catalog, catalog.mf) == [["bottom", "left", "right", "top"]]

    def test_random_match_brute_force(self, rng):
        for n in range(1, 7):
            P = random_poset(rng, n)
            assert enumerate_filters(P).filters == scan_filters(P)

    def test_infinite_refused(self, omega):
        with pytest.raises(TooLarge):
            enumerate_filters(omega)

    def test_membership_axioms(self, chain3, diamond):
        with pytest.raises(NotAFilter):
            filter_from_membership(chain3, lambda p: False, 3)
        with pytest.raises(NotAFilter):
            filter_from_membership(chain3, lambda p: p == 1, 3)
        with pytest.raises(NotAFilter):
            filter_from_membership(diamond, lambda p: p != 3, 4)

    def test_stream_from_membership(self, chain3):
        F = filter_from_membership(chain3, lambda p: True, 3)
        assert F.labels(4) == ["a", "b", "c", "c"]
        assert F.check(5) == []
        assert F.basic_verdict(2, F.support) is Tri.YES

    def test_settle(self, chain3):
        assert settle(chain3, principal_filter(chain3, 1), 1) == frozenset({0, 1})


class TestComparison:
    def test_finite(self, chain3):
        catalog = enumerate_filters(chain3)
        whole = catalog.stream(catalog.filters[-1])
        assert filters_equal(chain3, whole, principal_filter(chain3, 2), 4).kind is ComparisonKind.EQUAL_AT_DEPTH
        result = filters_equal(chain3, principal_filter(chain3, 0), principal_filter(chain3, 2), 4)
        assert result.kind is ComparisonKind.DISTINCT
        assert result.witness == "b"

    def test_infinite(self, omega):
        descent = strict_descent(omega, 0)
        evens = FilterStream(omega, at_fn=lambda n: 2 * n, strict=True)
        assert filters_equal(omega, descent, evens, 6).kind is ComparisonKind.EQUAL_AT_DEPTH
        assert filters_equal(omega, descent, principal_filter(omega, 3), 8).kind is ComparisonKind.UNKNOWN


class TestClassification:
    def test_finite(self, chain3):
        catalog = enumerate_filters(chain3)
        whole = classify_filter(chain3, catalog.stream(catalog.filters[-1]), 4)
        assert (whole.unbounded, whole.nonprincipal, whole.maximal) == (Tri.YES, Tri.NO, Tri.YES)
        top = classify_filter(chain3, principal_filter(chain3, 0), 4)
        assert top.unbounded is Tri.NO and top.maximal is Tri.NO

    def test_strict_stream(self, omega):
        c = classify_filter(omega, strict_descent(omega, 0), 4)
        assert c.as_dict() == {"unbounded": "yes", "nonprincipal": "yes", "maximal": "unknown"}

    def test_maximal_on_prefix(self, diamond):
        assert is_maximal_filter(diamond, principal_filter(diamond, 3), 4) is Tri.YES
        assert is_maximal_filter(diamond, principal_filter(diamond, 1), 4) is Tri.NO


class TestHandy:
    def test_is_handy(self, chain3, omega):
        assert is_handy(omega, 10) == (Tri.YES, None)
        assert is_handy(chain3, 3) == (Tri.NO, "c")

    def test_descent_runs_out(self, chain3):
        F = strict_descent(chain3, 0)
        assert F.labels(3) == ["a", "b", "c"]
        with pytest.raises(NotHandy):
            F.at(3)

    def test_handyfy_uf_round_trip(self, chain3):
        Q, iso = handyfy_uf(chain3)
        assert is_handy(Q, 12)[0] is Tri.YES
        catalog = enumerate_filters(chain3)
        F = catalog.stream(catalog.uf[0])
        G = iso.to_target(F)
        assert G.check(6) == []
        assert G.labels(4) == ["(a,0)", "(a,1)", "(b,2)", "(c,3)"]
        assert filters_equal(chain3, F, iso.to_source(G), 6).kind is ComparisonKind.EQUAL_AT_DEPTH

    def test_handyfy_allfilters_round_trip(self, chain3):
        Q, iso = handyfy_allfilters(chain3)
        catalog = enumerate_filters(chain3)
        for filt in catalog.filters:
            F = catalog.stream(filt)
            G = iso.to_target(F)
            assert G.check(6) == []
            assert filters_equal(chain3, F, iso.to_source(G), 6).kind is ComparisonKind.EQUAL_AT_DEPTH

    def test_np_to_npuf(self, omega):
        _, iso = np_to_npuf(omega)
        F = strict_descent(omega, 0)
        back = iso.to_source(iso.to_target(F))
        assert filters_equal(omega, F, back, 6).kind is ComparisonKind.EQUAL_AT_DEPTH


class TestConstructions:
    def test_product_projections(self, chain3):
        R, codes = product(chain3, antichain(2))
        assert R.handy
        left = enumerate_filters(chain3)
        right = enumerate_filters(antichain(2))
        F = left.stream(left.uf[0])
        G = right.stream(right.uf[1])
        H = codes.pair(F, G)
        assert H.check(5) == []
        assert filters_equal(chain3, F, codes.project(0, H), 5).kind is ComparisonKind.EQUAL_AT_DEPTH
        back = codes.project(1, H)
        assert filters_equal(right.poset, G, back, 5).kind is ComparisonKind.EQUAL_AT_DEPTH

    def test_product_codes_list_rules(self, chain3):
        R, codes = product(chain3, antichain(2))
        right = enumerate_filters(antichain(2))
        F = FilterStream.from_list(chain3, [2])
        G = right.stream(right.uf[1])
        H = codes.pair(F, G)
        e = H.at(3)
        _, V, U = codes.projections[1].triples.item_at(R.index_of(e))
        assert U == BasicOpen(R.space, e)
        assert G.basic_verdict(V.descriptor, 5) is Tri.YES
        _, V, U = codes.pairing.triples.item_at(R.index_of(e))
        assert V == BasicOpen(R.space, e)
        assert F.basic_verdict(U.descriptor[0], 5) is Tri.YES
        assert G.basic_verdict(U.descriptor[1], 5) is Tri.YES

    def test_sequence_product_codes(self, chain3):
        R, codes = product_seq([chain3, antichain(2)])
        right = enumerate_filters(antichain(2))
        F = FilterStream.from_list(chain3, [2])
        G = right.stream(right.uf[0])
        H = codes.pair(F, G)
        assert H.check(4) == []
        e = H.at(3)
        k = R.index_of(e)
        for i, stream in enumerate([F, G]):
            _, V, U = codes.projections[i].triples.item_at(k)
            assert U == BasicOpen(R.space, e)
            assert V.space == stream.space
            assert stream.basic_verdict(V.descriptor, 5) is Tri.YES
        _, V, U = codes.pairing.triples.item_at(k)
        assert V == BasicOpen(R.space, e)
        assert len(U.descriptor) == 2
        assert F.basic_verdict(U.descriptor[0], 5) is Tri.YES

    def test_prune(self, chain3):
        assert prune_iterate(chain3, 1, 3).carrier() == [0, 1]
        assert prune_iterate(chain3, 2, 3).carrier() == [0]
        assert prune_iterate(chain3, 5, 3).carrier() == []
