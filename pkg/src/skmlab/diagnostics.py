"""Order parameters and the no-phase-locking critical coupling."""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse.linalg as spla

from .complex import Graph, SimplicialComplex
from .dynamics import LOWER, UPPER, SimplicialField, _lower_b, _upper_b, project_field

__all__ = [
    "OrderParameterReport",
    "NplReport",
    "NplDecision",
    "order_parameter",
    "km_order_parameter",
    "npl_critical",
    "npl_decide",
    "npl_report",
    "resolve_branch",
    "pinv_dense",
    "write_diagnostics_csv",
]

PINV_RTOL = 1e-10


@dataclass(frozen=True)
class OrderParameterReport:
    R: float
    R_lower: float
    R_upper: float
    b_lower: float
    b_upper: float
    n_lower: int
    n_upper: int


def order_parameter(theta: SimplicialField, c: SimplicialComplex) -> OrderParameterReport:
    """Weighted mean of cos over the lower and upper projected phases."""
    theta.check(c)
    k = theta.k
    n_lo = c.n_simplices(k - 1) if k >= 1 else 0
    n_up = c.n_simplices(k + 1)
    total = n_lo + n_up
    if total == 0:
        raise ValueError(f"order parameter undefined: no ({k}-1)- or ({k}+1)-simplices")
    r_lo = r_up = 0.0
    if n_lo:
        r_lo = float(np.cos(project_field(theta, LOWER, c).values).mean())
    if n_up:
        r_up = float(np.cos(project_field(theta, UPPER, c).values).mean())
    b_lo, b_up = n_lo / total, n_up / total
    return OrderParameterReport(b_lo * r_lo + b_up * r_up, r_lo, r_up, b_lo, b_up, n_lo, n_up)


def km_order_parameter(theta: np.ndarray, variant: str, g: Graph) -> float:
    """Node order parameter: ``classic`` modulus or the ``topology_aware`` formula."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != g.n:
        raise ValueError(f"expected {g.n} phases, got {theta.size}")
    n = g.n
    if variant == "classic":
        return float(abs(np.exp(1j * theta).sum()) / n)
    if variant == "topology_aware":
        edges = np.asarray(sorted(g.edges), dtype=np.int64).reshape(-1, 2)
        diffs = theta[edges[:, 1]] - theta[edges[:, 0]]
        return float(1.0 - 2.0 * (g.n_edges / n**2 + np.cos(diffs).sum() / n**2))
    raise ValueError(f"variant must be 'classic' or 'topology_aware', got {variant!r}")


def resolve_branch(q: int | str, k: int) -> str:
    """Map q in {k-1, k+1} (or 'lower'/'upper') to a branch name."""
    if q in (LOWER, UPPER):
        return q
    if q == k - 1:
        return LOWER
    if q == k + 1:
        return UPPER
    raise ValueError(f"q must be k-1={k - 1} or k+1={k + 1}, got {q!r}")


def pinv_dense(a: np.ndarray, rtol: float = PINV_RTOL) -> np.ndarray:
    """Moore-Penrose inverse with singular values below rtol * s_max dropped."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return np.zeros(a.shape[::-1])
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    keep = s > rtol * (s[0] if s.size else 0.0)
    return (vt[keep].T / s[keep]) @ u[:, keep].T


@dataclass(frozen=True)
class NplReport:
    q: int
    branch: str
    K_q_s: float
    solver: str
    solver_residual: float
    n_q: int
    K_q: float | None = None
    gap: float | None = None
    decision: int | None = None
    promise_ok: bool | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _system(omega: SimplicialField, branch: str, c: SimplicialComplex):
    k = omega.k
    if branch == LOWER:
        if k < 1:
            raise ValueError("lower branch needs k >= 1")
        b = _lower_b(c, k)  # n_{k-1} x n_k
        # (B_k^T)^+ omega solves B_k B_k^T x = B_k omega
        return b.T, (b @ b.T).tocsr(), b @ omega.values
    b = _upper_b(c, k)  # n_k x n_{k+1}
    return b, (b.T @ b).tocsr(), b.T @ omega.values


def npl_critical(
    omega: SimplicialField,
    q: int | str,
    c: SimplicialComplex,
    solver: str = "dense_svd",
    tol: float = 1e-12,
) -> NplReport:
    """K_q^s = |omega_*^q| / sqrt(n_q) with omega_*^q the least-squares field."""
    omega.check(c)
    k = omega.k
    branch = resolve_branch(q, k)
    q_level = k - 1 if branch == LOWER else k + 1
    n_q = c.n_simplices(q_level) if q_level >= 0 else 0
    if n_q == 0:
        raise ValueError(f"no {q_level}-simplices: critical coupling undefined")
    a, lap, rhs = _system(omega, branch, c)
    if solver == "dense_svd":
        star = pinv_dense(a.toarray()) @ omega.values
    elif solver == "iterative":
        dim = lap.shape[0]
        if not np.any(rhs):
            star = np.zeros(dim)
        else:
            star, info = spla.cg(lap, rhs, rtol=tol, atol=0.0, maxiter=10 * dim)
            if info != 0:
                raise RuntimeError(f"conjugate gradient did not converge in {10 * dim} iterations")
    else:
        raise ValueError(f"solver must be 'dense_svd' or 'iterative', got {solver!r}")
    residual = float(np.linalg.norm(lap @ star - rhs))
    ks = float(np.linalg.norm(star) / math.sqrt(n_q))
    return NplReport(q_level, branch, ks, solver, residual, n_q)


class NplDecision(NamedTuple):
    z: int
    promise_ok: bool


def npl_decide(K_q: float, K_q_s: float, Delta: float) -> NplDecision:
    """z = 1 iff K_q < K_q_s; the gap promise is checked, not enforced."""
    if not Delta > 0:
        raise ValueError(f"Delta must be positive, got {Delta}")
    return NplDecision(int(K_q < K_q_s), bool(abs(K_q - K_q_s) >= Delta))


def npl_report(
    omega: SimplicialField,
    q: int | str,
    c: SimplicialComplex,
    K_q: float,
    Delta: float,
    solver: str = "dense_svd",
    tol: float = 1e-12,
) -> NplReport:
    base = npl_critical(omega, q, c, solver, tol)
    d = npl_decide(K_q, base.K_q_s, Delta)
    return NplReport(
        base.q, base.branch, base.K_q_s, base.solver, base.solver_residual, base.n_q,
        K_q, Delta, d.z, d.promise_ok,
    )


def write_diagnostics_csv(
    path: str | Path, times: Sequence[float], reports: Sequence[OrderParameterReport]
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "R", "R_lower", "R_upper"])
        for t, r in zip(times, reports):
            w.writerow([repr(float(t)), repr(r.R), repr(r.R_lower), repr(r.R_upper)])
