import json

import pytest

from ellipt_bethe.cli import parse_complex, parse_eta, run, to_json, UsageError


def _run(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parsers():
    assert parse_complex("0.8i") == 0.8j
    assert parse_complex("0.3+0.8i") == 0.3 + 0.8j
    assert parse_eta("2/3").denominator == 3
    with pytest.raises(UsageError):
        parse_eta("x/3")
    assert to_json({"z": 1 + 2j, "l": (1j,)}) == {"z": [1.0, 2.0], "l": [[0.0, 1.0]]}


def test_bethe_solve_two_sites(capsys):
    code, out, _ = _run(capsys, ["bethe-solve", "--N", "2", "--eta", "1/2", "--tau", "0.8i", "--xi", "0.1,-0.05"])
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1 and len(rep["states"]) == 4
    assert all(s["max_residual"] < 1e-12 for s in rep["states"])


def test_scalar_product_example(capsys):
    argv = ["scalar-product", "--N", "2", "--eta", "2/3", "--nu", "0", "--mu", "0", "--u", "random:seed=7",
            "--check-bruteforce"]
    code, out, _ = _run(capsys, argv)
    assert code == 0
    rep = json.loads(out)
    assert rep["rel_error"] <= 1e-8
    code2, out2, _ = _run(capsys, argv)
    assert out2 == out  # deterministic output


def test_verify_yang_baxter(capsys):
    code, out, _ = _run(capsys, ["verify", "--suite", "yang-baxter", "--samples", "100"])
    assert code == 0
    assert json.loads(out)["passed"]


def test_spectrum_qop_free_fermion(capsys, tmp_path):
    csv_path = tmp_path / "table.csv"
    code, out, _ = _run(capsys, ["spectrum", "--N", "2", "--eta", "2/3", "--csv", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "state,nu,rel_error" and len(lines) == 1 + 10 * 4
    code, out, _ = _run(capsys, ["qop", "--N", "2", "--eta", "1/2"])
    assert code == 0
    code, out, _ = _run(capsys, ["free-fermion", "--N", "4", "--eta", "1/2", "--samples", "1"])
    assert code == 0


def test_exit_codes(capsys, tmp_path):
    assert _run(capsys, ["bogus"])[0] == 2
    assert _run(capsys, ["bethe-solve", "--N", "3"])[0] == 2
    assert _run(capsys, ["scalar-product", "--N", "2", "--eta", "2/3", "--nu", "2", "--mu", "0"])[0] == 2
    assert _run(capsys, ["free-fermion", "--N", "2", "--eta", "2/3"])[0] == 2
    # an impossible tolerance is reported as a failure with exit code 1
    code, _, err = _run(capsys, ["bethe-solve", "--N", "2", "--tol", "1e-30"])
    assert code == 1 and "tolerance" in err


def test_output_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert run(["bethe-solve", "--N", "2", "--output", str(path)]) == 0
    assert json.loads(path.read_text())["command"] == "bethe-solve"


def test_thread_env_keeps_order(capsys, monkeypatch):
    argv = ["verify", "--suite", "two-site", "--suite", "inverse-problem", "--samples", "2"]
    _, serial, _ = _run(capsys, argv)
    monkeypatch.setenv("ELLIPT_BETHE_THREADS", "4")
    _, parallel, _ = _run(capsys, argv)
    assert serial == parallel
