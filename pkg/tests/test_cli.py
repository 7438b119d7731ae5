import json
import os

import pytest

from cli import STANDARD_DOCUMENT, VERSION, Library, run

GOLDEN = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


@pytest.fixture
def qpk(isolated_settings, capsys):
    """Run the driver and return (exit code, stdout, stderr)."""
    def invoke(*argv):
        capsys.readouterr()
        _, code = run(list(argv))
        out, err = capsys.readouterr()
        return code, out, err
    return invoke


def golden(name):
    with open(os.path.join(GOLDEN, name), "r", encoding="utf-8") as f:
        return f.read()


class TestGolden:
    @pytest.mark.parametrize("argv,name", [
        (["version"], "version.txt"),
        (["enumerate", "filters", "chain3", "--kind", "uf", "--depth", "8"], "enumerate_filters_chain3_uf.txt"),
        (["enumerate", "points", "S", "--depth", "8"], "enumerate_points_S.txt"),
        (["enumerate", "points", "I", "--depth", "8"], "enumerate_points_I.txt"),
    ])
    def test_matches_golden_file_twice(self, qpk, argv, name):
        first = qpk(*argv)
        second = qpk(*argv)
        assert first == second
        assert first[0] == 0
        assert first[1] == golden(name)


class TestProve:
    def test_forced_generator_is_proved(self, qpk):
        code, out, _ = qpk("prove", "T", "top <= g", "--depth", "8")
        assert code == 0
        assert "derives: proved" in out
        assert "Cut: top |- g" in out

    def test_free_generator_is_refuted(self, qpk):
        code, out, _ = qpk("prove", "S", "top <= g")
        assert code == 1
        assert "derives: refuted" in out
        assert "point: {}" in out

    def test_goal_from_file(self, qpk, tmp_path):
        doc = tmp_path / "goals.qpk"
        doc.write_text("frame Q { gen p q r; rel p => q; rel q => r; }\n"
                       "goal G { frame Q; p <= r; }\n"
                       "goal H { frame Q; r <= p; }\n", encoding="utf-8")
        assert qpk("prove", "G", "--file", str(doc))[0] == 0
        assert qpk("prove", "H", "--file", str(doc))[0] == 1

    def test_file_shadows_standard_document(self, qpk, tmp_path):
        doc = tmp_path / "s.qpk"
        doc.write_text("frame S { gen g; rel top => g; }\n", encoding="utf-8")
        assert qpk("prove", "S", "top <= g", "--file", str(doc))[0] == 0

    def test_relation_only_reading(self, qpk):
        code, out, _ = qpk("prove", "I", "g0 <= g1", "--base-reading", "relation-only")
        assert code == 0
        assert "base_reading=relation-only" in out


class TestCheck:
    def test_exhaustive_universal_space(self, qpk):
        code, out, _ = qpk("check", "quasi-metric", "pn", "--exhaustive", "3", "--quiet")
        assert code == 0
        assert "result: pass" in out
        assert "checked: 4096 triples" in out

    def test_json_report(self, qpk):
        code, out, _ = qpk("check", "handy", "--samples", "3", "--seed", "9", "--format", "json", "--quiet")
        data = json.loads(out)
        assert code == 0
        assert data["command"] == "check handy"
        assert data["seed"] == 9
        assert data["verdicts"]["result"] == "pass"

    def test_same_seed_same_bytes(self, qpk):
        argv = ("check", "roundtrip", "uf-pi02", "--samples", "3", "--seed", "4", "--quiet")
        assert qpk(*argv) == qpk(*argv)
        argv = ("check", "frame-triad", "--samples", "10", "--format", "json", "--quiet")
        assert qpk(*argv) == qpk(*argv)

    def test_suites_listing(self, qpk):
        code, out, _ = qpk("suites")
        assert code == 0
        for name in ("quasi-metric", "handy", "roundtrip", "frame-triad"):
            assert f"  {name}: " in out


class TestConvert:
    @pytest.mark.parametrize("argv,verdict", [
        (["convert", "uf-pi02", "chain3"], "handyfied: yes"),
        (["convert", "handyfy", "omega", "--depth", "4"], "handy: yes"),
        (["convert", "np-pi02", "antichain2"], "conversion: np-pi02"),
        (["convert", "pi02-uf", "contains0"], "exact: yes"),
        (["convert", "pi02-npuf", "whole"], "conversion: pi02-npuf"),
        (["convert", "qm-uf", "cantor", "--depth", "4"], "conversion: qm-uf"),
        (["convert", "frame-pi02", "I"], "conversion: frame-pi02"),
        (["convert", "pi02-frame", "contains0"], "generators: 1"),
        (["convert", "dense", "contains0", "--kind", "Gdelta", "--depth", "4"], "conversion: dense"),
    ])
    def test_conversions(self, qpk, argv, verdict):
        code, out, _ = qpk(*argv)
        assert code == 0, out
        assert verdict in out

    def test_deterministic(self, qpk):
        argv = ("convert", "frame-pi02", "T", "--format", "json")
        assert qpk(*argv) == qpk(*argv)


class TestErrors:
    def test_unknown_block(self, qpk):
        code, out, err = qpk("enumerate", "filters", "nowhere")
        assert code == 25
        assert out == ""
        assert err.startswith("qpk: ")

    def test_unknown_conversion(self, qpk):
        assert qpk("convert", "teleport", "chain3")[0] == 25

    def test_malformed_file(self, qpk, tmp_path):
        doc = tmp_path / "bad.qpk"
        doc.write_text("poset P { elem a b; order a < ; }\n", encoding="utf-8")
        code, _, err = qpk("version", "--file", str(doc))
        assert code == 24
        assert "line 1" in err

    def test_kind_mismatch(self, qpk):
        assert qpk("convert", "dense", "contains0", "--kind", "closed")[0] == 22

    def test_unknown_suite(self, qpk):
        assert qpk("check", "everything")[0] == 25

    def test_bad_goal_text(self, qpk):
        assert qpk("prove", "T", "top <=")[0] == 24

    def test_usage_error(self, qpk):
        with pytest.raises(SystemExit) as exc:
            qpk("frobnicate")
        assert exc.value.code == 2


def test_version_constant(qpk):
    assert f"version: {VERSION}" in qpk("version")[1]


def test_standard_document_names(isolated_settings):
    lib = Library.load()
    assert [d.names() for d in lib.documents] == [
        ["chain3", "antichain2", "omega", "S", "T", "I", "contains0", "whole", "evens"]
    ]
    assert "poset chain3" in STANDARD_DOCUMENT
