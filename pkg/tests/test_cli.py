"""Command-line runs, manifests and error reporting."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from skmlab.cli import main
from skmlab.complex import load_complex
from skmlab.dynamics import SimplicialField, save_field


def _run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k3(tmp_path, capsys):
    path = tmp_path / "k3.json"
    assert _run(capsys, "gen", "clique", "--graph", "complete", "--n", "3", "--out", str(path))[0] == 0
    return path


def test_gen_multipartite(tmp_path, capsys):
    path = tmp_path / "mp.json"
    code, out, _ = _run(capsys, "gen", "multipartite", "--m", "3", "--k", "2", "--out", str(path))
    assert code == 0 and "n_2 = 27" in out.splitlines()
    assert load_complex(path).n == 9
    manifest = json.loads((tmp_path / "mp.json.manifest.json").read_text())
    assert manifest["config"]["seed"] == 0 and manifest["outputs"]["counts"]["n_2"] == 27


def test_gen_clique_triangle(k3, capsys):
    assert load_complex(k3).n_simplices(2) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "random", "--n", "5", "--p", "1.5", "--out", "x.json"],
        ["gen", "random", "--n", "5", "--out", "x.json"],
        ["gen", "--bogus"],
        [],
    ],
)
def test_errors_are_single_line(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = _run(capsys, *argv)
    assert code != 0
    assert err.startswith("error: ") and err.count("\n") == 1


def test_dynamics_zero_state_keeps_order_one(k3, tmp_path, capsys):
    traj, order = tmp_path / "t.csv", tmp_path / "r.csv"
    code, _, _ = _run(
        capsys, "dynamics", "--complex", str(k3), "--k", "1", "--init", "zero", "--omega-init", "zero",
        "--steps", "50", "--record-every", "5", "--out", str(traj), "--order-out", str(order),
    )
    assert code == 0
    rows = order.read_text().splitlines()[1:]
    assert len(rows) == 11 and all(float(r.split(",")[1]) == 1.0 for r in rows)


def test_dynamics_is_deterministic(k3, tmp_path, capsys):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        args = ["dynamics", "--complex", str(k3), "--k", "1", "--K-lower", "0", "--K-upper", "0",
                "--omega-init", "random", "--seed", "7", "--steps", "30", "--out", str(path)]
        assert _run(capsys, *args)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_dynamics_k5_strong_coupling(tmp_path, capsys):
    c = tmp_path / "k5.json"
    _run(capsys, "gen", "clique", "--n", "5", "--max-dim", "1", "--out", str(c))
    traj = tmp_path / "t.csv"
    code, _, _ = _run(
        capsys, "dynamics", "--complex", str(c), "--k", "0", "--K-upper", "5", "--steps", "2000",
        "--record-every", "2000", "--out", str(traj),
    )
    assert code == 0
    manifest = json.loads((tmp_path / "t.csv.manifest.json").read_text())
    assert manifest["outputs"]["km_classic_final"] >= 0.999


def test_dynamics_dimension_mismatch(k3, tmp_path, capsys):
    field = tmp_path / "f.json"
    save_field(SimplicialField(1, [0.0, 1.0]), field)
    code, _, err = _run(capsys, "dynamics", "--complex", str(k3), "--theta", str(field), "--out", str(tmp_path / "t.csv"))
    assert code == 1 and err.count("\n") == 1


def test_diag_reports(k3, tmp_path, capsys):
    om = tmp_path / "om.json"
    save_field(SimplicialField(1, [1.0, -0.5, 0.3], "frequency"), om)
    out = tmp_path / "d.json"
    code, _, _ = _run(capsys, "diag", "--complex", str(k3), "--omega", str(om), "--K", "0.1", "--gap", "0.05", "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())["npl"]
    assert rep["decision"] == int(0.1 < rep["K_q_s"])


def test_qt1_zero_phase(k3, tmp_path, capsys):
    out = tmp_path / "q1.json"
    code, _, _ = _run(capsys, "qt1", "--complex", str(k3), "--init", "zero", "--eps", "0.1", "--out", str(out))
    res = json.loads(out.read_text())["outputs"]
    assert code == 0 and res["R_hat"] == 1.0 and res["error"] == 0.0


def test_qt2_zero_omega(k3, tmp_path, capsys):
    out = tmp_path / "q2.json"
    code, _, _ = _run(
        capsys, "qt2", "--complex", str(k3), "--omega-init", "zero", "--K", "1", "--gap", "0.5", "--out", str(out)
    )
    res = json.loads(out.read_text())["outputs"]
    assert code == 0 and res["z"] == 0 and res["agrees"]


def test_qt2_budget_flag_recomputed(k3, tmp_path, capsys):
    out = tmp_path / "q2.json"
    code, _, _ = _run(
        capsys, "qt2", "--complex", str(k3), "--seed", "3", "--q", "lower", "--K", "0.05", "--gap", "0.02",
        "--mode", "sampled", "--out", str(out),
    )
    res = json.loads(out.read_text())["outputs"]
    a = res["audit"]
    assert code == 0
    recomputed = a["eps_AE"] + a["eps_enc"] + a["Delta_QSVT"] <= a["budget"] * (1 + 1e-12)
    assert res["budget_sum_ok"] is recomputed


def test_qt2_promise_violation_exits_zero(k3, tmp_path, capsys):
    om = tmp_path / "om.json"
    save_field(SimplicialField(1, [1.0, -0.5, 0.3], "frequency"), om)
    out = tmp_path / "q2.json"
    code, _, err = _run(capsys, "qt2", "--complex", str(k3), "--omega", str(om), "--K", "0.3", "--gap", "10", "--out", str(out))
    assert code == 0 and "promise" in err
    assert json.loads(out.read_text())["outputs"]["promise_ok"] is False


def test_qt1_rerun_and_manifest_round_trip(k3, tmp_path, capsys):
    first, second, third = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    args = ["qt1", "--complex", str(k3), "--seed", "11", "--mode", "sampled", "--eps", "0.1"]
    _run(capsys, *args, "--out", str(first))
    _run(capsys, *args, "--out", str(second))
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    assert a["outputs"] == b["outputs"]
    assert _run(capsys, "qt1", "--config", str(first), "--out", str(third))[0] == 0
    c = json.loads(third.read_text())
    assert c["outputs"] == a["outputs"]
    assert {key for key in a["config"] if a["config"][key] != c["config"][key]} == {"out"}
    # same config and same output path reproduce the file byte for byte
    _run(capsys, "qt1", "--config", str(first), "--out", str(first))
    rerun = first.read_bytes()
    _run(capsys, *args, "--out", str(first))
    assert first.read_bytes() == rerun


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps": 0.1, "colour": "red"}))
    code, _, err = _run(capsys, "qt1", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_cost_command(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = _run(capsys, "cost", "--task", "t1", "--n", "10:30:10", "--k", "6", "--a-exp", "2", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0 and len(lines) == 4 and lines[0].startswith("task,n,k,m")
    empty = tmp_path / "e.csv"
    assert _run(capsys, "cost", "--task", "t2", "--out", str(empty))[0] == 0
    assert len(empty.read_text().splitlines()) == 1


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.json"
    proc = subprocess.run(
        [sys.executable, "-m", "skmlab.cli", "gen", "clique", "--n", "4", "--out", str(out)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "n_3" not in proc.stdout and "n_2 = 4" in proc.stdout
