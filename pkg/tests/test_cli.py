"""End-to-end checks of the spr command line."""

import json
from importlib import resources

import pytest

from spr.cli import run_cli

_DEFECTS = resources.files("spr") / "corpus" / "defects"
ACCEPT = str(_DEFECTS / "accept")
STUB = str(_DEFECTS / "stub")


def invoke(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_prints_outputs(self, capsys):
        code, out, err = invoke(capsys, "run", f"{ACCEPT}/program.spr", "5")
        assert code == 0 and out == "1\n"

    def test_fault_goes_to_stderr(self, capsys, tmp_path):
        src = tmp_path / "p.spr"
        src.write_text("L0: x = read\nL1: print x\nL2: stop\n")
        code, out, err = invoke(capsys, "run", str(src))
        assert code == 0 and out == ""
        assert "input-exhausted" in err

    def test_json_outcome(self, capsys):
        code, out, _ = invoke(capsys, "run", "--format", "json",
                              f"{ACCEPT}/program.spr", "3")
        assert code == 0
        assert json.loads(out) == {"output": [0], "fault": None}

    def test_missing_file_is_usage_error(self, capsys):
        code, _, err = invoke(capsys, "run", "no/such/file.spr")
        assert code == 2 and "error" in err


class TestLocalize:
    def test_tsv_columns(self, capsys):
        code, out, _ = invoke(capsys, "localize", ACCEPT)
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[0].split("\t") == ["label", "a", "b", "c", "rank"]
        first = lines[1].split("\t")
        assert first == ["L5", "1", "0", "5", "1"]

    def test_limit_truncates(self, capsys):
        _, full, _ = invoke(capsys, "localize", ACCEPT)
        _, cut, _ = invoke(capsys, "localize", ACCEPT, "--limit", "2")
        assert cut.strip().splitlines() == full.strip().splitlines()[:3]


class TestSpace:
    def test_schema_census(self, capsys):
        code, out, _ = invoke(capsys, "space", ACCEPT)
        rows = dict(line.split("\t") for line in out.strip().splitlines()[1:])
        assert code == 0
        assert rows["total"] == "74"
        assert rows["loosen"] == "1" and rows["tighten"] == "1"

    def test_dump_lists_each_template(self, capsys):
        code, out, _ = invoke(capsys, "space", ACCEPT, "--dump", "--format", "json")
        entries = json.loads(out)
        assert code == 0 and len(entries) == 74
        assert entries[0]["rank"] == 1 and entries[0]["tier"] == 1
        assert "abstc" in (e["kind"] for e in entries)

    def test_extensions_grow_the_census(self, capsys):
        _, base, _ = invoke(capsys, "space", ACCEPT)
        _, ext, _ = invoke(capsys, "space", ACCEPT, "--ext-cond", "--ext-rep")
        total = lambda out: int(out.strip().splitlines()[-1].split("\t")[1])
        assert total(ext) > total(base)


class TestRepair:
    def test_diff_and_stats(self, capsys):
        code, out, _ = invoke(capsys, "repair", ACCEPT)
        assert code == 0
        assert "-L2: if ((x == 5)) L3 L4" in out
        assert "+L2: if ((x == 5) || (x == 3)) L3 L4" in out
        assert "plausible_rank: 2" in out

    def test_json_stats(self, capsys):
        code, out, _ = invoke(capsys, "repair", ACCEPT, "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["stats"]["plausible_rank"] == 2
        assert doc["schema"] == "loosen" and doc["substitution"] == "(x == 3)"

    def test_emit_writes_patch_file(self, capsys, tmp_path):
        target = tmp_path / "patched.spr"
        code, _, _ = invoke(capsys, "repair", ACCEPT, "--emit", str(target))
        assert code == 0
        assert "(x == 3)" in target.read_text()

    def test_no_repair_exits_one(self, capsys):
        code, _, err = invoke(capsys, "repair", STUB)
        assert code == 1
        assert "no plausible patch" in err

    def test_extension_repairs_stub(self, capsys):
        code, out, _ = invoke(capsys, "repair", STUB, "--ext-rep", "--format", "json")
        assert code == 0
        assert "r = a * b" in json.loads(out)["patch"]

    def test_already_passing_program_is_usage_error(self, capsys, tmp_path):
        d = tmp_path / "ok"
        (d / "tests" / "neg").mkdir(parents=True)
        (d / "program.spr").write_text("L0: print 1\nL1: stop\n")
        (d / "tests" / "neg" / "a.txt").write_text("in:\nout: 1\n")
        code, _, err = invoke(capsys, "repair", str(d))
        assert code == 2
        assert "no negative case fails" in err

    def test_malformed_corpus_names_offending_file(self, capsys, tmp_path):
        d = tmp_path / "broken"
        (d / "tests" / "neg").mkdir(parents=True)
        (d / "program.spr").write_text("L0: print 1\nL1: stop\n")
        (d / "tests" / "neg" / "bad.txt").write_text("in 1 out 2\n")
        code, _, err = invoke(capsys, "repair", str(d))
        assert code == 2
        assert "bad.txt" in err


class TestReports:
    def test_analyze_defaults_to_bundled_corpus(self, capsys):
        code, out, _ = invoke(capsys, "analyze", "--format", "json")
        docs = json.loads(out)
        assert code == 0 and len(docs) == 10
        assert docs[0]["defect_id"] == "accept" and docs[0]["correct_rank"] == 2

    def test_analyze_single_defect_directory(self, capsys):
        code, out, _ = invoke(capsys, "analyze", ACCEPT)
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == 2
        assert lines[1].split("\t")[0] == "accept"

    def test_explore_is_seed_reproducible(self, capsys):
        args = ("explore", "--defect", "accept", "--order", "random", "--seed", "9")
        first = invoke(capsys, *args)
        second = invoke(capsys, *args)
        assert first == second and first[0] == 0

    def test_explore_budget_column(self, capsys):
        code, out, _ = invoke(capsys, "explore", "--defect", "accept",
                              "--template-budget", "2")
        header, row = (l.split("\t") for l in out.strip().splitlines())
        doc = dict(zip(header, row))
        assert code == 0
        assert doc["budget"] == "2" and doc["plausible_found"] == "2"
        assert doc["timed_out"] == "True"

    def test_compare_orders_display(self, capsys):
        code, out, _ = invoke(capsys, "compare-orders", "--seeds", "10")
        assert code == 0
        rows = {l.split("\t")[0]: l.split("\t") for l in out.strip().splitlines()[1:]}
        assert rows["spr_tiers"][3] == "7 / 7"
        assert float(rows["random"][1]) > 7

    def test_unknown_defect_id(self, capsys):
        code, _, err = invoke(capsys, "analyze", "--defect", "ghost")
        assert code == 2 and "ghost" in err


class TestUsage:
    def test_no_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli([])
        assert exc.value.code == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["repair", ACCEPT, "--warp-speed"])
        assert exc.value.code == 2
