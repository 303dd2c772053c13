import json

import pytest

from bbzalg import bbzmult
from bbzalg.cli import EXIT_CAP, EXIT_DENOM_FAIL, EXIT_INVARIANT, EXIT_OK, EXIT_SCHEMA, main, run


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def rank2(tmp_path):
    return write(tmp_path, "rank2.json", {"vertices": [0, 1], "matrix": [[2, -2], [-2, -2]], "charge": {"1": 1}})


@pytest.fixture
def a2(tmp_path):
    return write(tmp_path, "a2.json", {"vertices": [1, 2], "arrows": [{"id": "x", "from": 1, "to": 2}]})


def test_mult_table(rank2):
    code, out = run(["mult", "--input", rank2, "--box", "4,4", "--J", "0"])
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "(4,4)\t19"


def test_mult_named_box_and_json(rank2):
    code, out = run(["mult", "--input", rank2, "--box", "0=1,1=1", "--format", "json"])
    assert code == EXIT_OK
    rows = {tuple(sorted(r["alpha"].items())): r["mult"] for r in json.loads(out)}
    assert rows[(("0", 1), ("1", 1))] == "1"


def test_empty_box(tmp_path):
    iso = write(tmp_path, "iso.json", {"vertices": ["a"], "matrix": [[0]]})
    assert run(["mult", "--input", iso, "--box", "0"]) == (EXIT_OK, "")


def test_denominator_pass_and_override(rank2):
    code, out = run(["denom-check", "--input", rank2, "--box", "3,3"])
    assert code == EXIT_OK and out.startswith("status\tpass")
    code, out = run(["denom-check", "--input", rank2, "--box", "3,3", "--override", "1,1:5"])
    assert code == EXIT_DENOM_FAIL
    tag, alpha, lhs, rhs = out.splitlines()[1].split("\t")
    assert (tag, alpha) == ("first_mismatch", "(1,1)") and lhs != rhs


def test_character_noniso(tmp_path):
    noniso = write(tmp_path, "n.json", {"vertices": ["a"], "matrix": [[-2]]})
    code, out = run(["character", "--input", noniso, "--box", "a=4", "--weight", "a=1"])
    assert code == EXIT_OK
    assert [line.split("\t")[1] for line in out.splitlines()] == ["1", "1", "2", "4", "8"]


def test_jcoeffs_and_monster():
    code, out = run(["jcoeffs", "--N", "2"])
    assert out.splitlines() == ["-1\t1", "0\t0", "1\t196884", "2\t21493760"]
    code, out = run(["monster", "--kind", "bozec", "--mn", "4,2"])
    assert code == EXIT_OK and out == "4\t2\t401490908149760"


def test_monster_preset_mult():
    code, out = run(["mult", "--preset", "monster", "--box=-1=1,1=1"])
    assert code == EXIT_OK
    assert "196884" in out


def test_quiver_commands(tmp_path, a2):
    code, out = run(["quiver-roots", "--input", a2, "--box", "1=1,2=1"])
    assert code == EXIT_OK
    loops = write(tmp_path, "l.json", {"vertices": [1], "arrows": [{"id": "a", "from": 1, "to": 1}, {"id": "b", "from": 1, "to": 1}]})
    code, out = run(["quiver-kac", "--input", loops, "--dims", "1=2"])
    assert code == EXIT_OK and "1 + 1*t^1" in out


def test_schofield_and_serre(tmp_path, a2):
    module = write(tmp_path, "m.json", {"dims": {"1": 1, "2": 1}, "maps": {"x": [[1]]}})
    code, out = run(["schofield-pair", "--input", a2, "--module", module, "--word", "S(2,1)S(1,1)"])
    assert code == EXIT_OK and out.splitlines()[-1] == "chi\t1"
    code, out = run(["serre-check", "--input", a2, "--i", "1", "--j", "2", "--fields", "2"])
    assert code == EXIT_OK and out.splitlines()[-1] == "passed\tTrue"


@pytest.mark.parametrize(
    "argv",
    [
        ["mult", "--input", "/nonexistent.json", "--box", "1"],
        ["mult"],
        ["no-such-command"],
        ["mult", "--box", "1,1", "--input", "{rank2}", "--J", "1"],
        ["mult", "--box", "1,x", "--input", "{rank2}"],
        ["serre-check", "--input", "{a2}", "--i", "1", "--j", "2", "--l", "0"],
        ["mult", "--input", "{rank2}", "--box", "1,1", "--cap", "0"],
    ],
)
def test_schema_errors(argv, rank2, a2):
    argv = [a.format(rank2=rank2, a2=a2) for a in argv]
    code, out = run(argv)
    assert code == EXIT_SCHEMA


def test_invalid_datum_is_schema_error(tmp_path):
    bad = write(tmp_path, "bad.json", {"vertices": [0], "matrix": [[1]]})
    assert run(["mult", "--input", bad, "--box", "1"])[0] == EXIT_SCHEMA


def test_cap_exit(tmp_path):
    loops = write(tmp_path, "l.json", {"vertices": [1], "arrows": [{"id": "a", "from": 1, "to": 1}, {"id": "b", "from": 1, "to": 1}]})
    code, out = run(["quiver-kac", "--input", loops, "--dims", "1=2", "--cap", "1"])
    assert code == EXIT_CAP and out.startswith("cap exceeded")


def test_invariant_exit(monkeypatch, rank2):
    def broken(self):
        raise bbzmult.InvariantBreach("forced")

    monkeypatch.setattr(bbzmult.MultiplicityEngine, "table", broken)
    code, out = run(["mult", "--input", rank2, "--box", "1,1"])
    assert code == EXIT_INVARIANT and "forced" in out


def test_main_writes_output_deterministically(tmp_path, rank2, capsys):
    paths = [tmp_path / "a.tsv", tmp_path / "b.tsv"]
    for p in paths:
        assert main(["mult", "--input", rank2, "--box", "3,3", "--output", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().endswith("\n")
    assert capsys.readouterr().out == ""


def test_main_errors_go_to_stderr(capsys):
    assert main(["mult", "--input", "/nonexistent.json", "--box", "1"]) == EXIT_SCHEMA
    captured = capsys.readouterr()
    assert captured.out == "" and "error" in captured.err
