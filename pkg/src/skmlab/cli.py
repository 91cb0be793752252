"""Command-line entry point: ``skmlab {gen,dynamics,diag,qt1,qt2,cost}``.

Parameters resolve as built-in defaults < ``--config`` JSON < explicit flags.
Every run writes a JSON manifest echoing the resolved configuration; a
manifest can be passed back through ``--config`` to reproduce the run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import costmodel
from .complex import (
    SimplicialComplex,
    build_clique_complex,
    complete_graph,
    gen_multipartite_graph,
    gen_random_graph,
    load_complex,
    path_graph,
    save_complex,
)
from .diagnostics import (
    km_order_parameter,
    npl_critical,
    npl_report,
    order_parameter,
    write_diagnostics_csv,
)
from .dynamics import SimplicialField, integrate, load_field, write_trajectory_csv

__all__ = ["main", "build_parser"]

AE_MODES = ("ideal", "sampled", "adversarial_plus", "adversarial_minus")
WARN_N = 10
STREAMS = ("theta", "omega", "ae", "graph")

DEFAULTS: dict[str, dict[str, Any]] = {
    "gen": {
        "kind": None, "graph": "complete", "n": None, "m": None, "k": None, "p": None,
        "max_dim": None, "seed": 0, "out": None, "manifest": None,
    },
    "dynamics": {
        "complex": None, "theta": None, "omega": None, "k": 0, "init": "random",
        "omega_init": "zero", "K_lower": 0.0, "K_upper": 1.0, "dt": 0.01, "steps": 1000,
        "record_every": 10, "seed": 0, "out": None, "order_out": None, "manifest": None,
    },
    "diag": {
        "complex": None, "omega": None, "theta": None, "q": "lower", "K": None, "gap": None,
        "solver": "dense_svd", "seed": 0, "out": None, "manifest": None,
    },
    "qt1": {
        "complex": None, "theta": None, "k": 1, "init": "random", "eps": 0.05, "delta": 0.05,
        "mode": "ideal", "tier": "matrix", "seed": 0, "out": None, "manifest": None,
    },
    "qt2": {
        "complex": None, "omega": None, "k": 1, "omega_init": "random", "q": "lower", "K": None,
        "gap": None, "delta": 0.05, "mode": "ideal", "seed": 0, "out": None, "manifest": None,
    },
    "cost": {
        "task": "t1", "n": None, "k": None, "m": None, "a_exp": None, "c_exp": None, "grid": None,
        "seed": 0, "out": None, "manifest": None,
    },
}


class CliError(Exception):
    """Validation failure reported as a single line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # single line, exit 2
        raise CliError(f"usage: {message}")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in _split(text)]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in _split(text)]


def _split(text: str) -> list[str]:
    """'1,2,3' or 'start:stop:step' (stop inclusive)."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (int(x) for x in parts)
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        return [str(v) for v in range(start, stop + 1, step)]
    return [v for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    parser = _Parser(prog="skmlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=sup, help="JSON config or manifest; flags override it")
        p.add_argument("--seed", type=int, default=sup)
        p.add_argument("--out", default=sup)
        p.add_argument("--manifest", default=sup, help="manifest path (default: next to --out)")

    g = sub.add_parser("gen", help="generate a clique complex")
    g.add_argument("kind", nargs="?", choices=("clique", "multipartite", "random"), default=sup)
    g.add_argument("--graph", choices=("complete", "path"), default=sup)
    g.add_argument("--n", type=int, default=sup)
    g.add_argument("--m", type=int, default=sup)
    g.add_argument("--k", type=int, default=sup)
    g.add_argument("--p", type=float, default=sup)
    g.add_argument("--max-dim", dest="max_dim", type=int, default=sup)
    common(g)

    d = sub.add_parser("dynamics", help="integrate the simplicial Kuramoto model")
    d.add_argument("--complex", default=sup)
    d.add_argument("--theta", default=sup, help="initial phase field JSON")
    d.add_argument("--omega", default=sup, help="frequency field JSON")
    d.add_argument("--k", type=int, default=sup)
    d.add_argument("--init", choices=("random", "zero"), default=sup)
    d.add_argument("--omega-init", dest="omega_init", choices=("random", "zero"), default=sup)
    d.add_argument("--K-lower", dest="K_lower", type=float, default=sup)
    d.add_argument("--K-upper", dest="K_upper", type=float, default=sup)
    d.add_argument("--dt", type=float, default=sup)
    d.add_argument("--steps", type=int, default=sup)
    d.add_argument("--record-every", dest="record_every", type=int, default=sup)
    d.add_argument("--order-out", dest="order_out", default=sup)
    common(d)

    dg = sub.add_parser("diag", help="order parameter and no-phase-locking report")
    dg.add_argument("--complex", default=sup)
    dg.add_argument("--omega", default=sup)
    dg.add_argument("--theta", default=sup)
    dg.add_argument("--q", default=sup, help="'lower', 'upper' or the level k-1 / k+1")
    dg.add_argument("--K", type=float, default=sup)
    dg.add_argument("--gap", type=float, default=sup)
    dg.add_argument("--solver", choices=("dense_svd", "iterative"), default=sup)
    common(dg)

    q1 = sub.add_parser("qt1", help="simulated quantum order-parameter estimation")
    q1.add_argument("--complex", default=sup)
    q1.add_argument("--theta", default=sup)
    q1.add_argument("--k", type=int, default=sup)
    q1.add_argument("--init", choices=("random", "zero"), default=sup)
    q1.add_argument("--eps", type=float, default=sup)
    q1.add_argument("--delta", type=float, default=sup)
    q1.add_argument("--mode", choices=AE_MODES, default=sup)
    q1.add_argument("--tier", choices=("matrix", "gate_exact"), default=sup)
    common(q1)

    q2 = sub.add_parser("qt2", help="simulated no-phase-locking certification")
    q2.add_argument("--complex", default=sup)
    q2.add_argument("--omega", default=sup)
    q2.add_argument("--k", type=int, default=sup)
    q2.add_argument("--omega-init", dest="omega_init", choices=("random", "zero"), default=sup)
    q2.add_argument("--q", default=sup)
    q2.add_argument("--K", type=float, default=sup)
    q2.add_argument("--gap", type=float, default=sup)
    q2.add_argument("--delta", type=float, default=sup)
    q2.add_argument("--mode", choices=AE_MODES, default=sup)
    common(q2)

    co = sub.add_parser("cost", help="cost-model sweep to CSV")
    co.add_argument("--task", choices=("t1", "t2"), default=sup)
    co.add_argument("--n", type=_int_list, default=sup)
    co.add_argument("--k", type=_int_list, default=sup)
    co.add_argument("--m", type=_int_list, default=sup)
    co.add_argument("--a-exp", dest="a_exp", type=_float_list, default=sup)
    co.add_argument("--c-exp", dest="c_exp", type=_float_list, default=sup)
    co.add_argument("--grid", default=sup, help="JSON file with grid lists")
    common(co)
    return parser


def _resolve(command: str, ns: argparse.Namespace) -> dict[str, Any]:
    explicit = {key: val for key, val in vars(ns).items() if key not in ("command", "config")}
    file_cfg: dict[str, Any] = {}
    cfg_path = getattr(ns, "config", None)
    if cfg_path is not None:
        with open(cfg_path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise CliError("config must be a JSON object")
        if "config" in raw and isinstance(raw["config"], dict):
            if raw.get("command", command) != command:
                raise CliError(f"config is for command {raw.get('command')!r}, not {command!r}")
            raw = raw["config"]
        unknown = sorted(set(raw) - set(DEFAULTS[command]))
        if unknown:
            raise CliError(f"unknown config keys for {command}: {', '.join(unknown)}")
        file_cfg = raw
    return {**DEFAULTS[command], **file_cfg, **explicit}


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(STREAMS, children)}


def _require(cfg: dict[str, Any], *keys: str) -> None:
    missing = [key for key in keys if cfg.get(key) is None]
    if missing:
        raise CliError(f"missing required option(s): {', '.join('--' + m.replace('_', '-') for m in missing)}")


def _dump(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, int):
        return str(obj)
    return obj


def _write_manifest(command: str, cfg: dict[str, Any], outputs: dict[str, Any]) -> str:
    text = _dump({"command": command, "config": cfg, "outputs": outputs})
    target = cfg.get("manifest")
    if target is None and cfg.get("out") is not None:
        target = str(cfg["out"]) + ".manifest.json"
    if target is None:
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")
    return text


def _load_field_or_init(
    cfg: dict[str, Any], key: str, init_key: str, c: SimplicialComplex, k: int,
    role: str, rng: np.random.Generator,
) -> SimplicialField:
    if cfg.get(key) is not None:
        x = load_field(cfg[key], role)
        x.check(c)
        return x
    size = c.n_simplices(k)
    if size == 0:
        raise CliError(f"complex has no {k}-simplices")
    init = cfg[init_key]
    if init == "zero":
        vals = np.zeros(size)
    elif role == "phase":
        vals = rng.uniform(-math.pi, math.pi, size)
    else:
        vals = rng.normal(0.0, 1.0, size)
    return SimplicialField(k, vals, role)


def _counts(c: SimplicialComplex) -> dict[str, int]:
    return {f"n_{k}": c.n_simplices(k) for k in range(c.max_dim + 1)}


def cmd_gen(cfg: dict[str, Any]) -> int:
    _require(cfg, "kind", "out")
    rng = _streams(cfg["seed"])["graph"]
    kind = cfg["kind"]
    if kind == "multipartite":
        _require(cfg, "m", "k")
        g = gen_multipartite_graph(cfg["m"], cfg["k"])
        max_dim = cfg["max_dim"] if cfg["max_dim"] is not None else cfg["k"]
    elif kind == "random":
        _require(cfg, "n", "p")
        g = gen_random_graph(cfg["n"], cfg["p"], rng)
        max_dim = cfg["max_dim"] if cfg["max_dim"] is not None else 2
    else:
        _require(cfg, "n")
        g = complete_graph(cfg["n"]) if cfg["graph"] == "complete" else path_graph(cfg["n"])
        max_dim = cfg["max_dim"] if cfg["max_dim"] is not None else 2
    c = build_clique_complex(g, max_dim)
    save_complex(c, cfg["out"])
    counts = _counts(c)
    for key, val in counts.items():
        print(f"{key} = {val}")
    _write_manifest("gen", cfg, {"n": c.n, "counts": counts})
    return 0


def cmd_dynamics(cfg: dict[str, Any]) -> int:
    _require(cfg, "complex", "out")
    c = load_complex(cfg["complex"])
    rngs = _streams(cfg["seed"])
    theta0 = _load_field_or_init(cfg, "theta", "init", c, cfg["k"], "phase", rngs["theta"])
    k = theta0.k
    omega = _load_field_or_init(cfg, "omega", "omega_init", c, k, "frequency", rngs["omega"])
    omega = SimplicialField(omega.k, omega.values, "frequency")
    times, snaps = integrate(
        theta0, omega, cfg["K_lower"], cfg["K_upper"], cfg["dt"], cfg["steps"], cfg["record_every"], c
    )
    write_trajectory_csv(cfg["out"], times, snaps)
    outputs: dict[str, Any] = {"records": len(times)}
    if cfg.get("order_out") is not None:
        reports = [order_parameter(s, c) for s in snaps]
        write_diagnostics_csv(cfg["order_out"], times, reports)
        outputs["R_final"] = reports[-1].R
    if k == 0:
        outputs["km_classic_final"] = km_order_parameter(snaps[-1].values, "classic", c.graph())
    _write_manifest("dynamics", cfg, outputs)
    return 0


def _parse_q(q: Any) -> int | str:
    if isinstance(q, str) and q.lstrip("-").isdigit():
        return int(q)
    return q


def cmd_diag(cfg: dict[str, Any]) -> int:
    _require(cfg, "complex")
    c = load_complex(cfg["complex"])
    outputs: dict[str, Any] = {}
    if cfg.get("theta") is not None:
        th = load_field(cfg["theta"], "phase")
        outputs["order_parameter"] = order_parameter(th, c).__dict__
    if cfg.get("omega") is not None:
        om = load_field(cfg["omega"], "frequency")
        if cfg.get("K") is not None:
            _require(cfg, "gap")
            rep = npl_report(om, _parse_q(cfg["q"]), c, cfg["K"], cfg["gap"], cfg["solver"])
        else:
            rep = npl_critical(om, _parse_q(cfg["q"]), c, cfg["solver"])
        outputs["npl"] = rep.to_dict()
    if not outputs:
        raise CliError("diag needs --theta and/or --omega")
    if cfg.get("out") is not None:
        Path(cfg["out"]).write_text(_dump(outputs), encoding="utf-8")
    _write_manifest("diag", cfg, outputs)
    return 0


def _warn_size(c: SimplicialComplex) -> None:
    if c.n > WARN_N:
        print(f"warning: n = {c.n} exceeds the desk-scale guideline of {WARN_N}", file=sys.stderr)


def cmd_qt1(cfg: dict[str, Any]) -> int:
    from .qsim import run_t1

    _require(cfg, "complex")
    c = load_complex(cfg["complex"])
    _warn_size(c)
    rngs = _streams(cfg["seed"])
    th = _load_field_or_init(cfg, "theta", "init", c, cfg["k"], "phase", rngs["theta"])
    ae_seed = int(rngs["ae"].integers(0, 2**63 - 1))
    res = run_t1(th, c, cfg["eps"], cfg["delta"], cfg["mode"], ae_seed, cfg["tier"])
    classical = order_parameter(th, c).R
    outputs = {
        "R_hat": res.R_hat,
        "R_classical": classical,
        "error": abs(res.R_hat - classical),
        "within_eps": bool(abs(res.R_hat - classical) <= cfg["eps"]),
        "branches": res.branches,
        "budget": {"eps_cos": cfg["eps"] / 4, "delta_per_branch": cfg["delta"] / 2},
        "ledger": res.ledger.to_dict(),
    }
    return _emit_result("qt1", cfg, outputs)


def cmd_qt2(cfg: dict[str, Any]) -> int:
    from .qsim import run_t2

    _require(cfg, "complex", "K", "gap")
    c = load_complex(cfg["complex"])
    _warn_size(c)
    rngs = _streams(cfg["seed"])
    om = _load_field_or_init(cfg, "omega", "omega_init", c, cfg["k"], "frequency", rngs["omega"])
    ae_seed = int(rngs["ae"].integers(0, 2**63 - 1))
    res = run_t2(om, c, _parse_q(cfg["q"]), cfg["K"], cfg["gap"], cfg["delta"], cfg["mode"], ae_seed)
    audit = dict(res.audit)
    classical_z = int(cfg["K"] < audit["K_q_s_classical"])
    outputs = {
        "z": res.z,
        "z_classical": classical_z,
        "agrees": res.z == classical_z,
        "K_q_s": audit["K_q_s_classical"],
        "promise_ok": audit["promise_ok"],
        "budget_sum_ok": audit["budget_sum_ok"],
        "audit": audit,
        "ledger": res.ledger.to_dict(),
    }
    if not audit["promise_ok"]:
        print("warning: promise |K - K_s| >= gap is violated", file=sys.stderr)
    return _emit_result("qt2", cfg, outputs)


def _emit_result(command: str, cfg: dict[str, Any], outputs: dict[str, Any]) -> int:
    text = _dump({"command": command, "config": cfg, "outputs": outputs})
    if cfg.get("out") is not None:
        Path(cfg["out"]).write_text(text, encoding="utf-8")
        if cfg.get("manifest") is not None:
            Path(cfg["manifest"]).write_text(text, encoding="utf-8")
    elif cfg.get("manifest") is not None:
        Path(cfg["manifest"]).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_cost(cfg: dict[str, Any]) -> int:
    _require(cfg, "out")
    grid: dict[str, Any] = {}
    if cfg.get("grid") is not None:
        with open(cfg["grid"], encoding="utf-8") as fh:
            grid = json.load(fh)
        if not isinstance(grid, dict):
            raise CliError("grid file must hold a JSON object")
    for key in ("n", "k", "m", "a_exp", "c_exp"):
        if cfg.get(key) is not None:
            grid[key] = cfg[key]
    rows = costmodel.sweep(cfg["task"], grid, cfg["out"])
    _write_manifest("cost", cfg, {"rows": len(rows)})
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "dynamics": cmd_dynamics,
    "diag": cmd_diag,
    "qt1": cmd_qt1,
    "qt2": cmd_qt2,
    "cost": cmd_cost,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise CliError("usage: a command is required (gen, dynamics, diag, qt1, qt2, cost)")
        cfg = _resolve(ns.command, ns)
        return COMMANDS[ns.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError, FloatingPointError, KeyError, TypeError) as exc:
        msg = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
