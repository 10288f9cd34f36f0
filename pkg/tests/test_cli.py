import csv
import json

import pytest

from signorini_lab import cli
from signorini_lab.lcp import ConvergenceError


def run(argv, tmp_path, capsys):
    code = cli.cli_dispatch(list(argv) + ["--out", str(tmp_path)])
    out = capsys.readouterr()
    result = json.loads(out.out) if code == 0 and out.out else None
    return code, result, out.err


def test_upsilon_ball_member(tmp_path, capsys):
    code, res, _ = run(["upsilon", "--scene", "ball.json", "--omega", "0.1", "--c", "-Ap"], tmp_path, capsys)
    assert code == 0
    ball = res["obstacles"]["obstacle1"]
    assert res["member"] is True and ball["residual"] <= ball["tolerance"]


def test_solve_scalar_constant(tmp_path, capsys):
    code, res, _ = run(["solve-scalar", "--scene", "annulus.json", "--f", "0.5"], tmp_path, capsys)
    assert code == 0
    assert res["max_deviation_from_constant"] < 1e-10


def test_distinguish_pair(tmp_path, capsys):
    code, res, _ = run(["distinguish", "--scene", "pair.json", "--f", "x"], tmp_path, capsys)
    assert code == 0 and res["verdict"] == "DISTINGUISHED"


@pytest.mark.parametrize("argv", [
    ["geometry", "--scene", "crescents.json"],
    ["counterexample", "--scene", "rotation.json", "--levels", "1"],
    ["solve-elastic", "--scene", "annulus.json", "--f", "-0.05*x, -0.05*y"],
    ["convergence", "--scene", "annulus.json", "--levels", "1"],
    ["reconstruct", "--scene", "annulus.json", "--f", "x", "--radius", "0.3", "--init", "0.3"],
])
def test_other_subcommands(argv, tmp_path, capsys):
    code, res, err = run(argv, tmp_path, capsys)
    assert code == 0, err
    assert res["status"] == "ok"
    manifest = json.loads((tmp_path / f"{argv[0]}-{res['output_dir'].rsplit('-', 1)[1]}" / "manifest.json").read_text())
    assert manifest["command"] == argv[0]


def test_exit_codes(tmp_path, capsys, monkeypatch):
    assert run(["bogus"], tmp_path, capsys)[0] == 64
    assert cli.cli_dispatch([]) == 64
    assert "usage" in capsys.readouterr().err
    assert run(["solve-scalar", "--scene", "nowhere.json"], tmp_path, capsys)[0] == 1
    assert run(["solve-scalar", "--scene", "annulus.json", "--f", "x +"], tmp_path, capsys)[0] == 1
    assert run(["solve-scalar", "--scene", "annulus.json", "--h", "-1"], tmp_path, capsys)[0] == 1
    assert run(["solve-scalar", "--levels", "two"], tmp_path, capsys)[0] == 1

    def diverge(*a, **k):
        raise ConvergenceError("no convergence")

    monkeypatch.setattr(cli, "solve_scalar", diverge)
    assert run(["solve-scalar", "--scene", "annulus.json"], tmp_path, capsys)[0] == 2


def test_manifest_and_reproducibility(tmp_path, capsys):
    argv = ["solve-scalar", "--scene", "pair.json", "--f", "x"]
    code, res, _ = run(argv, tmp_path / "a", capsys)
    assert code == 0
    d1 = tmp_path / "a" / res["output_dir"].split("/")[-1]
    code, res2, _ = run(argv, tmp_path / "b", capsys)
    d2 = tmp_path / "b" / res2["output_dir"].split("/")[-1]
    assert d1.name == d2.name
    manifest = json.loads((d1 / "manifest.json").read_text())
    files = sorted(p.name for p in d1.iterdir())
    assert sorted(manifest["outputs"]) == files
    assert manifest["config_hash"] in d1.name
    for name in files:
        if name != "manifest.json":
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name
    text = (d1 / "result.json").read_text()
    keys = list(json.loads(text))
    assert keys == sorted(keys)
    raw = (d1 / "flux_gamma.csv").read_bytes()
    assert raw.count(b"\r\n") == raw.count(b"\n") > 1
    rows = list(csv.reader(raw.decode().splitlines()))
    assert rows[0] == ["arc_length", "flux"] and len(rows[1]) == 2
    float(rows[1][1])


def test_hash_changes_with_inputs(tmp_path, capsys):
    _, a, _ = run(["solve-scalar", "--scene", "annulus.json", "--f", "0.5"], tmp_path, capsys)
    _, b, _ = run(["solve-scalar", "--scene", "annulus.json", "--f", "0.25"], tmp_path, capsys)
    assert a["output_dir"] != b["output_dir"]
