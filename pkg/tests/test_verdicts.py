import pytest
from hypothesis import given, strategies as st

import errors
from errors import NotAFilter, ParseError, QpkError, TooLarge, UnknownName
from verdicts import Tri, all_of, any_of

tris = st.sampled_from(list(Tri))


class TestKleene:
    @given(tris, tris)
    def test_and_commutes(self, a, b):
        assert a & b is b & a

    @given(tris, tris)
    def test_or_commutes(self, a, b):
        assert a | b is b | a

    @given(tris, tris)
    def test_de_morgan(self, a, b):
        assert ~(a & b) is (~a | ~b)

    @given(tris)
    def test_double_negation(self, a):
        assert ~~a is a

    def test_unknown_absorbs_only_undecided(self):
        assert Tri.UNKNOWN & Tri.NO is Tri.NO
        assert Tri.UNKNOWN | Tri.YES is Tri.YES
        assert Tri.UNKNOWN & Tri.YES is Tri.UNKNOWN

    def test_folds(self):
        assert all_of([]) is Tri.YES
        assert any_of([]) is Tri.NO
        assert all_of([Tri.YES, Tri.UNKNOWN]) is Tri.UNKNOWN
        assert any_of([Tri.NO, Tri.UNKNOWN, Tri.YES]) is Tri.YES

    def test_of_and_str(self):
        assert Tri.of(1) is Tri.YES
        assert str(Tri.of(0)) == "no"
        assert not Tri.UNKNOWN.decided


class TestErrors:
    def test_every_error_has_its_own_code_from_ten(self):
        classes = [c for c in vars(errors).values()
                   if isinstance(c, type) and issubclass(c, QpkError) and c is not QpkError]
        codes = [c.exit_code for c in classes]
        assert all(code >= 10 for code in codes)
        assert len(set(codes)) == len(codes)

    def test_structured_attributes(self):
        e = ParseError(3, 7, "name")
        assert (e.line, e.col, e.expected) == (3, 7, "name")
        assert e.details() == {"line": 3, "col": 7, "expected": "name"}
        assert "line 3, column 7" in str(e)

    def test_too_large_and_not_a_filter(self):
        assert TooLarge(30, 20).details() == {"size": 30, "bound": 20}
        assert NotAFilter("empty").witness is None
        with pytest.raises(QpkError):
            raise UnknownName("x")
