import json

import pytest

from aitlab.cli import COMMANDS, main, parse_line, render, run_command
from aitlab.dispatch import const

SMALL = ["--max-len", "10", "--fuel", "200"]
INVOCATIONS = {
    "eval": ["eval", "--input", const(2), "--cond", "101", "--fuel", "100"],
    "search": ["search", "--input", "", "--machine", "base"] + SMALL,
    "table": ["table", "--machine", "base"] + SMALL,
    "omega": ["omega", "--machine", "prefix-base"] + SMALL,
    "alloc": ["alloc", "--lengths", "1,2,3,3"],
    "merge": ["merge", "--stages", "15", "--strings", "6", "--seed", "4"],
    "pvalue": ["pvalue", "--k", "100", "--prob", "1/2^1000"],
    "verify-constants": ["verify-constants", "--conds", ",01"] + SMALL,
    "demo-adder": ["demo-adder", "--bits", "4"],
    "demo-tournament": ["demo-tournament", "--n", "4", "--trials", "50"],
    "demo-projections": ["demo-projections", "--trials", "30"],
    "empirical": ["empirical", "--machine", "base", "--samples", "500"] + SMALL,
}


def test_every_subcommand_covered():
    assert set(INVOCATIONS) == set(COMMANDS)


@pytest.mark.parametrize("name", sorted(INVOCATIONS))
def test_lines_roundtrip(name):
    lines = run_command(INVOCATIONS[name])
    assert lines
    for line in lines:
        rec = parse_line(line)
        assert render(rec) == line
        assert all(" " not in v for v in rec.values())


def test_examples(capsys):
    assert main(INVOCATIONS["eval"]) == 0
    assert capsys.readouterr().out == "HALTED output=101 steps=1 consumed=10\n"
    assert main(INVOCATIONS["pvalue"]) == 0
    assert "p_value=1/2^900" in capsys.readouterr().out
    assert main(["pvalue", "--k", "100", "--prob", "1/2^1100"]) == 0
    assert "p_value=1/2^1000" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["pvalue", "--k", "3", "--prob", "0.25"],
    ["alloc", "--lengths", "1,1,1"],
    ["eval", "--input", "012"],
    ["table", "--max-len", "0"],
    ["table", "--bogus"],
    ["demo-tournament", "--n", "7", "--trials", "1"],
])
def test_precondition_exit_code(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_internal_error_exit_code(monkeypatch, capsys):
    def boom(cfg, args):
        raise RuntimeError("boom")
    monkeypatch.setitem(COMMANDS, "alloc", boom)
    assert main(["alloc", "--lengths", "1"]) == 1
    assert "internal error" in capsys.readouterr().err


def test_jsonl_and_out(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    assert main(INVOCATIONS["alloc"] + ["--format", "jsonl", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    recs = [json.loads(l) for l in out.read_text().splitlines()]
    assert recs[0] == {"request": "0", "length": "1", "codeword": "0"}
    assert recs[-1]["tag"] == "TOTAL"


def test_manifest(tmp_path):
    man = tmp_path / "m.txt"
    man.write_text("isa=bitvm-1\nmode=prefix\nfuel=5\nslot=3 name=swap\n")
    argv = ["eval", "--manifest", str(man), "--input", const(2) + "1"]
    assert run_command(argv)[0].startswith("DIVERGED")
    argv = ["eval", "--manifest", str(man), "--input", const(3) + const(2), "--cond", "0"]
    assert run_command(argv)[0].startswith("HALTED")
    man.write_text("isa=bitvm-2\n")
    assert main(["eval", "--manifest", str(man)]) == 2
    man.write_text("slot=5 name=identity\n")
    assert main(["eval", "--manifest", str(man)]) == 2


@pytest.mark.parametrize("name", ["table", "omega", "verify-constants", "empirical"])
def test_shard_determinism(name):
    base = INVOCATIONS[name]
    one = run_command(base + ["--shards", "1"])
    assert one == run_command(base + ["--shards", "4"])
    assert one == run_command(base)
