import json
from pathlib import Path

import pytest

from stringhom.cli import main
from stringhom.io import algebra_document
from stringhom.spaces import sphere

DATA = Path(__file__).resolve().parent.parent / "examples_data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_shipped_file(capsys):
    code, out, _ = run(capsys, "check", str(DATA / "s3xs3.json"), "--format", "json")
    assert code == 0
    assert all(r["ok"] for r in json.loads(out)["checks"])


def test_sl2_command(capsys):
    code, out, _ = run(capsys, "string-bracket", "--space", "builtin:s3xs3", "--degree", "0", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["classes"]) == 3 and doc["abelian"] is False
    assert doc["sl2_basis"] is not None


def test_json_is_byte_identical(capsys):
    a = run(capsys, "hh", "--space", "builtin:s2", "--max-degree", "8", "--format", "json")
    b = run(capsys, "hh", "--space", "builtin:s2", "--max-degree", "8", "--format", "json")
    assert a == b and a[0] == 0


def test_json_rank_table_round_trips(capsys):
    _, out, _ = run(capsys, "hc", "--space", "builtin:s3", "--format", "json")
    doc = json.loads(out)
    assert json.loads(json.dumps(doc, sort_keys=True, indent=2)) == doc
    assert {r["degree"]: r["rank"] for r in doc["rows"]}[-3] == 1


def test_exit_code_validation(capsys, tmp_path):
    doc = algebra_document(sphere(2))
    doc["pairing"] = []
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    code, _, err = run(capsys, "check", str(p))
    assert code == 2 and "nondegeneracy" in err


def test_exit_code_parse_error(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    code, _, err = run(capsys, "hh", "--space", str(p))
    assert code == 2 and "bad.json:1:2" in err


def test_unknown_builtin(capsys):
    assert run(capsys, "hh", "--space", "builtin:torus")[0] == 2


def test_exit_code_truncation(capsys):
    code, _, err = run(capsys, "hh", "--space", "builtin:s3", "--weight-cap", "2")
    assert code == 3 and "needs weight cap >= " in err
    assert run(capsys, "hh", "--space", "builtin:s3", "--weight-cap", "2", "--force")[0] == 0


def test_exit_code_columns(capsys):
    code, _, err = run(capsys, "hc-minus", "--space", "builtin:s2", "--columns", "2")
    assert code == 3 and "needs columns" in err


def test_invariant_breach_exit_code(capsys, monkeypatch):
    from stringhom import hochschild as hh
    monkeypatch.setattr(hh, "bar_oracle", lambda spec, coeff, degrees: {n: 99 for n in degrees})
    assert run(capsys, "oracle", "--space", "builtin:s2")[0] == 4


@pytest.mark.parametrize("command", ["check", "hh", "hc", "hc-minus", "loop-homology", "string-homology", "oracle"])
def test_commands_succeed(capsys, command):
    code, out, _ = run(capsys, command, "--space", "builtin:cp2", "--format", "json")
    assert code == 0 and json.loads(out)


@pytest.mark.parametrize("command", ["loop-product", "loop-bracket", "string-bracket"])
def test_table_commands(capsys, command):
    code, out, _ = run(capsys, command, "--space", "builtin:s3", "--max-degree", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["entries"]


def test_table_output_renders_terms(capsys):
    code, out, _ = run(capsys, "hh", "--space", "builtin:s3", "--min-degree", "1", "--max-degree", "1")
    assert code == 0 and "d/dt_x" in out


def test_cache_hits_and_verification(capsys, tmp_path):
    args = ("oracle", "--space", "builtin:s3", "--cache-dir", str(tmp_path), "--format", "json")
    first = run(capsys, *args)
    assert any(tmp_path.rglob("*.json"))
    second = run(capsys, *args)
    third = run(capsys, *args, "--verify-cache")
    assert first == second == third


def test_stale_cache_is_caught(capsys, tmp_path):
    args = ("hc", "--space", "builtin:s3", "--cache-dir", str(tmp_path))
    assert run(capsys, *args)[0] == 0
    for p in tmp_path.rglob("*.json"):
        doc = json.loads(p.read_text())
        doc["rank"] += 1
        p.write_text(json.dumps(doc))
    assert run(capsys, *args, "--verify-cache")[0] == 4
    # without verification the deterministic spot check still notices
    assert run(capsys, *args)[0] == 4


def test_parallel_matches_sequential(capsys):
    a = run(capsys, "hh", "--space", "builtin:s3xs3", "--format", "json")
    b = run(capsys, "hh", "--space", "builtin:s3xs3", "--format", "json", "--jobs", "3")
    assert a == b
