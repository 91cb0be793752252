"""Query and gate cost formulas with all asymptotic constants set to one.

Outputs are in model units: ratios are trend objects, not predictions.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Any, Iterable, Mapping

__all__ = [
    "CostParams",
    "CostReport",
    "SWEEP_HEADER",
    "log_comb",
    "multipartite_params",
    "r_exponent",
    "sweep",
    "sweep_rows",
    "t1_cost_ratio",
    "t1_query_counts",
    "t2_classical_cost",
    "t2_cost_ratio",
    "t2_query_counts",
]

SWEEP_HEADER = ("task", "n", "k", "m", "c_exp", "a_exp", "T_C", "T_Q", "ratio", "log10_ratio", "g", "p")


def log_comb(n: int, r: int) -> float:
    """Natural log of C(n, r) via lgamma."""
    if not (0 <= r <= n):
        raise ValueError(f"C({n}, {r}) is zero")
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


@dataclass(frozen=True)
class CostParams:
    n: int
    k: int
    m: int | None = None
    n_k: int = 1
    n_lower: int = 0
    n_upper: int = 0
    alpha: float = 1.0
    beta: float = 1.0
    mu_lower: float = 1.0
    mu_upper: float = 1.0
    norm_theta: float = 1.0
    norm_omega: float = 1.0
    kappa: float = 1.0
    eps: float = 0.1
    delta: float = 0.1
    Delta: float = 0.1
    a_exp: float = 2.0
    c_exp: float = 1.0
    zeta_min: float | None = None
    n_q: int = 1
    K_s: float = 1.0

    def __post_init__(self) -> None:
        for name in ("n", "alpha", "beta", "norm_theta", "norm_omega", "kappa", "Delta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.alpha < 1 or self.beta < 1 or self.kappa < 1:
            raise ValueError("alpha, beta and kappa must be >= 1")
        if self.zeta_min is not None and not (self.kappa >= math.sqrt(self.n) / self.zeta_min * (1 - 1e-12)):
            raise ValueError("kappa must satisfy 1/kappa <= zeta_min / sqrt(n)")

    @property
    def b_lower(self) -> float:
        return self.n_lower / (self.n_lower + self.n_upper)

    @property
    def b_upper(self) -> float:
        return self.n_upper / (self.n_lower + self.n_upper)


@dataclass(frozen=True)
class CostReport:
    quantum_cost: float
    classical_cost: float
    ratio: float
    components: dict[str, Any] = field(default_factory=dict)
    log_ratio: float | None = None


def _check_unit(name: str, x: float) -> None:
    if not (0 < x < 0.5):
        raise ValueError(f"{name} must lie in (0, 1/2), got {x}")


def t1_query_counts(p: CostParams) -> tuple[float, float]:
    """(gamma_1, r_1) with gamma_1 = alpha sqrt(n) N(theta).

    r_1 = (b_- mu_-^2 + b_+ mu_+^2) log(1/delta) / eps.
    """
    _check_unit("eps", p.eps)
    _check_unit("delta", p.delta)
    if p.n_lower + p.n_upper == 0:
        raise ValueError("need n_{k-1} + n_{k+1} > 0")
    gamma1 = p.alpha * math.sqrt(p.n) * p.norm_theta
    weight = p.b_lower * p.mu_lower**2 + p.b_upper * p.mu_upper**2
    return gamma1, weight * math.log(1.0 / p.delta) / p.eps


def r_exponent(k: int, a_exp: float | Fraction) -> Fraction:
    """Scaling-advantage exponent (k+2)/2 - max(a, 2), exact."""
    a = Fraction(a_exp) if not isinstance(a_exp, Fraction) else a_exp
    return Fraction(k + 2, 2) - max(a, Fraction(2))


def t1_cost_ratio(n: int, k: int, G_theta: float, a_exp: float | None = None) -> CostReport:
    """T_C = n C(n, k+1), T_Q = (G_theta + n^2) sqrt(n C(n, k+1))."""
    if n < k + 2:
        raise ValueError(f"need n >= k + 2, got n={n}, k={k}")
    if G_theta < 0:
        raise ValueError("G_theta must be non-negative")
    log_tc = math.log(n) + log_comb(n, k + 1)
    log_tq = math.log(G_theta + n * n) + 0.5 * log_tc
    log_ratio = log_tc - log_tq
    comps: dict[str, Any] = {"log_T_C": log_tc, "log_T_Q": log_tq}
    if a_exp is not None:
        comps["r_exponent"] = r_exponent(k, a_exp)
    return CostReport(_safe_exp(log_tq), _safe_exp(log_tc), _safe_exp(log_ratio), comps, log_ratio)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709 else math.inf


def t2_query_counts(p: CostParams) -> tuple[float, float]:
    """(r_m, d_m).

    r_m = kappa^2 beta^2 N^2 / (n n_q Delta^2) log(1/delta),
    d_m = kappa^2 log(N / min(Delta^2/(6 K_s), Delta/12) sqrt(n / n_q)).
    """
    _check_unit("delta", p.delta)
    if p.n_q < 1:
        raise ValueError("n_q must be positive")
    r_m = (p.kappa * p.beta * p.norm_omega) ** 2 / (p.n * p.n_q * p.Delta**2) * math.log(1 / p.delta)
    floor = min(p.Delta**2 / (6 * p.K_s), p.Delta / 12) if p.K_s > 0 else p.Delta / 12
    arg = p.norm_omega / floor * math.sqrt(p.n / p.n_q)
    d_m = p.kappa**2 * (math.log(arg) if arg > 1 else 1.0)
    return r_m, d_m


def _t2_logs(m: int, k: int, c_exp: float) -> dict[str, float]:
    log_m = math.log(m)
    log_log_m = math.log(log_m)
    log_g = 2 * math.log(k) - k + (k - 1) * log_m - log_log_m
    log_p = -math.log1p(math.exp((c_exp - 1) * math.log(k) - 2 * log_m))
    log_tc = 2.5 * math.log(k) + (k + 1) * log_m
    a = 2 * log_m + 0.5 * math.log(k)
    b = (c_exp - 0.5) * math.log(k)
    log_tq = max(a, b) + math.log1p(math.exp(-abs(a - b))) + k + log_log_m
    return {"log_g": log_g, "log_p": log_p, "log_T_C": log_tc, "log_T_Q": log_tq}


def t2_cost_ratio(m: int, k: int, c_exp: float) -> CostReport:
    """g(m,k) = (k^2/e^k) m^(k-1)/log m, p(m,k) = 1/(1 + k^(c-1)/m^2), ratio = g p.

    T_C = k^(5/2) m^(k+1) and T_Q = (m^2 k^(1/2) + k^(c-1/2)) e^k log m, so
    T_C / T_Q equals g p identically.
    """
    if m < 2 or k < 1:
        raise ValueError(f"need m >= 2 and k >= 1, got m={m}, k={k}")
    logs = _t2_logs(m, k, c_exp)
    log_ratio = logs["log_T_C"] - logs["log_T_Q"]
    comps = {
        "g": _safe_exp(logs["log_g"]),
        "p": math.exp(logs["log_p"]),
        "log_g": logs["log_g"],
        "log_p": logs["log_p"],
        "log_ratio_gp": logs["log_g"] + logs["log_p"],
        "log_T_C": logs["log_T_C"],
        "log_T_Q": logs["log_T_Q"],
    }
    return CostReport(
        _safe_exp(logs["log_T_Q"]), _safe_exp(logs["log_T_C"]), _safe_exp(log_ratio), comps, log_ratio
    )


def t2_classical_cost(n_lower: int, n_k: int, k: int) -> int:
    """Nonzeros of the Laplacian baseline: n_{k-1} + k (k+1) n_k."""
    if min(n_lower, n_k, k) < 0:
        raise ValueError("counts must be non-negative")
    return n_lower + k * (k + 1) * n_k


def multipartite_params(m: int, k: int, Delta: float = 0.1, delta: float = 0.1) -> CostParams:
    """Parameters of the complete (k+1)-partite graph with parts of size m.

    Top-dimensional level k: n = m(k+1), n_k = m^(k+1), lower level n_{k-1} =
    (k+1) m^k, kappa^2 = k+1, and the uniform field gives beta N = sqrt(C(n, k+1)).
    """
    if m < 1 or k < 1:
        raise ValueError("need m >= 1 and k >= 1")
    n = m * (k + 1)
    n_k = m ** (k + 1)
    n_q = (k + 1) * m**k
    log_norm = 0.5 * log_comb(n, k + 1)
    return CostParams(
        n=n, k=k, m=m, n_k=n_k, n_lower=n_q, n_upper=0, kappa=math.sqrt(k + 1),
        zeta_min=math.sqrt(m), norm_omega=math.exp(log_norm), Delta=Delta, delta=delta, n_q=n_q,
    )


def _row_t1(n: int, k: int, a_exp: float) -> dict[str, Any]:
    rep = t1_cost_ratio(n, k, float(n) ** a_exp, a_exp)
    return {
        "task": "t1", "n": n, "k": k, "m": "", "c_exp": "", "a_exp": a_exp,
        "T_C": rep.classical_cost, "T_Q": rep.quantum_cost, "ratio": rep.ratio,
        "log10_ratio": rep.log_ratio / math.log(10), "g": "", "p": "",
    }


def _row_t2(m: int, k: int, c_exp: float, n: int | None = None) -> dict[str, Any]:
    rep = t2_cost_ratio(m, k, c_exp)
    return {
        "task": "t2", "n": n if n is not None else m * (k + 1), "k": k, "m": m, "c_exp": c_exp,
        "a_exp": "", "T_C": rep.classical_cost, "T_Q": rep.quantum_cost, "ratio": rep.ratio,
        "log10_ratio": rep.log_ratio / math.log(10), "g": rep.components["g"], "p": rep.components["p"],
    }


def _grid_points(task: str, grid: Mapping[str, Iterable]) -> list[tuple]:
    if task == "t1":
        ns = list(grid.get("n", []))
        ks = list(grid.get("k", []))
        aa = list(grid.get("a_exp", [2.0]))
        return [("t1", n, k, a) for n, k, a in product(ns, ks, aa)]
    if task == "t2":
        cc = list(grid.get("c_exp", [1.0]))
        if "n" in grid:
            # k = ceil(log n), m = round(n / (k+1))
            pts = []
            for n, c_exp in product(list(grid["n"]), cc):
                k = max(1, math.ceil(math.log(n)))
                m = max(2, round(n / (k + 1)))
                pts.append(("t2", m, k, c_exp, n))
            return pts
        ms = list(grid.get("m", []))
        ks = list(grid.get("k", []))
        return [("t2", m, k, c, None) for m, k, c in product(ms, ks, cc)]
    raise ValueError(f"task must be 't1' or 't2', got {task!r}")


def _eval(pt: tuple) -> dict[str, Any]:
    if pt[0] == "t1":
        return _row_t1(int(pt[1]), int(pt[2]), float(pt[3]))
    return _row_t2(int(pt[1]), int(pt[2]), float(pt[3]), pt[4])


def _threads() -> int:
    raw = os.environ.get("SKMLAB_THREADS", "")
    try:
        return max(1, int(raw)) if raw else min(8, os.cpu_count() or 1)
    except ValueError:
        raise ValueError(f"SKMLAB_THREADS must be an integer, got {raw!r}") from None


def sweep_rows(task: str, grid: Mapping[str, Iterable]) -> list[dict[str, Any]]:
    """Rows in grid order; evaluation is parallel over rows, output order is fixed."""
    pts = _grid_points(task, grid)
    workers = _threads()
    if workers == 1 or len(pts) < 64:
        return [_eval(pt) for pt in pts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_eval, pts))


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def sweep(task: str, grid: Mapping[str, Iterable], out: str | Path) -> list[dict[str, Any]]:
    """Write the sweep CSV (fixed header) and return its rows."""
    rows = sweep_rows(task, grid)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_HEADER)
        for row in rows:
            w.writerow([_fmt(row[key]) for key in SWEEP_HEADER])
    return rows

