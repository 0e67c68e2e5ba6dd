"""Command-line interface: serialization, determinism, exit codes, fixtures."""

import json
from fractions import Fraction

from click.testing import CliRunner

from gibbs.cli import main, run_jobspec, space_from_json, space_to_json

from conftest import toric_surface_space


def _strip_metadata(doc):
    doc = dict(doc)
    doc.pop("metadata", None)
    return doc


def _write_toric(tmp_path, name="space.json"):
    path = tmp_path / name
    path.write_text(json.dumps(space_to_json(toric_surface_space())))
    return str(path)


def test_space_serialization_round_trip():
    L = toric_surface_space()
    L2 = space_from_json(space_to_json(L))
    assert L2.n == L.n and L2.d == L.d
    assert L2.A0 == L.A0
    assert L2.basis == L.basis


def test_rational_strings_in_documents(tmp_path):
    doc = {
        "basis": [[["1/2", 0], [0, "1/3"]]],
        "A0": [[0, "2/7"], ["2/7", 0]],
    }
    L = space_from_json(doc)
    assert L.basis[0][0][0] == Fraction(1, 2)
    assert L.A0[0][1] == Fraction(2, 7)


def test_implicitize_symbolic_command(tmp_path):
    runner = CliRunner()
    space = _write_toric(tmp_path)
    result = runner.invoke(main, ["implicitize", "--input", space])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert sorted(doc["result"]["generators"]) == sorted(
        ["x_1_2", "x_1_3", "x_2_3", "x_2_2^2 - x_1_1*x_3_3"]
    )
    assert doc["jobspec"]["command"] == "implicitize"


def test_output_is_deterministic_up_to_metadata(tmp_path):
    runner = CliRunner()
    space = _write_toric(tmp_path)
    a = runner.invoke(main, ["implicitize", "--input", space])
    b = runner.invoke(main, ["implicitize", "--input", space])
    assert a.exit_code == b.exit_code == 0
    da = _strip_metadata(json.loads(a.output))
    db = _strip_metadata(json.loads(b.output))
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)


def test_input_error_exit_code(tmp_path):
    runner = CliRunner()
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    result = runner.invoke(main, ["implicitize", "--input", str(bad)])
    assert result.exit_code == 2
    doc = json.loads(result.output)
    assert doc["error"]["kind"] == "input"


def test_math_failure_exit_code(tmp_path):
    runner = CliRunner()
    space = _write_toric(tmp_path)
    result = runner.invoke(main, ["implicitize", "--input", space, "--budget", "3"])
    assert result.exit_code == 1
    doc = json.loads(result.output)
    assert doc["error"]["kind"] == "math"


def test_solve_command(tmp_path):
    runner = CliRunner()
    inst = tmp_path / "inst.json"
    inst.write_text(
        json.dumps({"space": space_to_json(toric_surface_space()), "b": [3.0, 2.0]})
    )
    result = runner.invoke(main, ["solve", "--input", str(inst)])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert float(doc["result"]["residual_primal"]) < 1e-9


def test_qot_command_point(tmp_path):
    runner = CliRunner()
    margins = tmp_path / "margins.json"
    margins.write_text(json.dumps({"Y": [[5, 1], [1, 6]], "Z": [[7, 2], [2, 4]]}))
    result = runner.invoke(main, ["qot", "--d1", "2", "--d2", "2", "--margins", str(margins)])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert doc["result"]["gibbs_point"][0][0] == "35/11"


def test_pencil_command():
    runner = CliRunner()
    result = runner.invoke(main, ["pencil", "--segre", "[(2,2)]"])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert "x_1_3" in doc["result"]["block_det_constraints"]
    result2 = runner.invoke(main, ["pencil", "--segre", "[oops"])
    assert result2.exit_code != 0


def _pencil_fixture(tmp_path, name, corrupt=False):
    jobspec = {"command": "pencil", "segre": "[3,1]", "alpha": None, "emit": "equations"}
    expected = run_jobspec(jobspec)
    if corrupt:
        expected = dict(expected, block_det_constraints=["x_9_9"])
    (tmp_path / name).write_text(json.dumps({"jobspec": jobspec, "expected": expected}))


def test_check_all_pass(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    _pencil_fixture(corpus, "a.json")
    _pencil_fixture(corpus, "b.json")
    runner = CliRunner()
    result = runner.invoke(main, ["check", str(corpus)])
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert all(e["passed"] for e in doc["result"]["fixtures"])


def test_check_reports_failure(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    _pencil_fixture(corpus, "good.json")
    _pencil_fixture(corpus, "bad.json", corrupt=True)
    runner = CliRunner()
    result = runner.invoke(main, ["check", str(corpus)])
    assert result.exit_code == 1
    doc = json.loads(result.output)
    status = {e["fixture"]: e["passed"] for e in doc["result"]["fixtures"]}
    assert status == {"good.json": True, "bad.json": False}


def test_bundled_corpus_passes():
    import pathlib

    from gibbs.cli import run_check

    corpus = pathlib.Path(__file__).resolve().parent.parent / "corpus"
    report = run_check(str(corpus))
    assert report and all(e["passed"] for e in report)


def test_check_empty_corpus(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    runner = CliRunner()
    result = runner.invoke(main, ["check", str(corpus)])
    assert result.exit_code == 0
