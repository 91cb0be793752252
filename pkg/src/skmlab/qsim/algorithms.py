"""End-to-end order-parameter estimation and no-phase-locking certification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..complex import SimplicialComplex, boundary_matrix
from ..diagnostics import npl_critical, resolve_branch
from ..dynamics import LOWER, UPPER, SimplicialField
from .estimation import amplitude_estimate
from .gates import pue_boundary, simplex_indices
from .polynomials import cheb_cos, cheb_pseudo_inverse
from .states import dicke_prep, prepare_field_state, round_fixed
from .transforms import amplitude_block_encoding, hadamard_test_prob, qsvt_apply
from .types import BlockEncoding, QueryLedger

__all__ = ["T1Result", "T2Result", "alg_t1", "alg_t2", "run_t1", "run_t2"]

KAPPA_MARGIN = 1e-6
SV_RTOL = 1e-10
MAX_POLY_EPS = 0.49


@dataclass
class T1Result:
    R_hat: float
    ledger: QueryLedger
    branches: list[dict[str, Any]] = field(default_factory=list)


@dataclass
class T2Result:
    z: int
    ledger: QueryLedger
    audit: dict[str, Any] = field(default_factory=dict)


def _zero_block(c: SimplicialComplex, level: int, n: int, ancillas: int) -> BlockEncoding:
    basis = simplex_indices(c, level)
    return BlockEncoding(
        np.zeros((basis.size, basis.size)), 0.0, ancillas, basis, basis, n, "matrix", None,
        {}, {"kind": "amplitude", "gamma": 0.0},
    )


def run_t1(
    theta: SimplicialField,
    c: SimplicialComplex,
    eps: float,
    delta: float,
    ae_mode: str = "ideal",
    seed: int = 0,
    tier: str = "matrix",
) -> T1Result:
    """Quantum estimate of the simplicial order parameter.

    Error split: eps/4 for the cosine polynomial, eps/4 per branch for
    amplitude estimation (eps / (8 b mu^2) on the Hadamard probability), and
    delta/2 failure probability per branch.
    """
    if not (0 < eps < 0.5) or not (0 < delta < 0.5):
        raise ValueError("eps and delta must lie in (0, 1/2)")
    theta.check(c)
    k = theta.k
    n = c.n
    counts = {
        LOWER: c.n_simplices(k - 1) if k >= 1 else 0,
        UPPER: c.n_simplices(k + 1),
    }
    total = counts[LOWER] + counts[UPPER]
    if total == 0:
        raise ValueError(f"degenerate complex: no ({k}-1)- or ({k}+1)-simplices")
    seeds = np.random.SeedSequence(seed).spawn(2)
    ledger = QueryLedger()
    r_hat = 0.0
    branches = []
    zero_field = theta.norm == 0
    state = None if zero_field else prepare_field_state(theta, c)
    for (direction, n_q), ss in zip(counts.items(), seeds):
        if n_q == 0:
            continue
        level = k - 1 if direction == LOWER else k + 1
        b = n_q / total
        if zero_field:
            be = _zero_block(c, level, n, n + 5)
            gamma = 0.0
        else:
            be = amplitude_block_encoding(state, c, direction, tier)
            gamma = be.scale
        poly = cheb_cos(gamma, eps / 4)
        qbe = qsvt_apply(be, poly)
        ref = dicke_prep(c, level)
        mu2 = ref.meta["mu"] ** 2
        p = hadamard_test_prob(ref, qbe)
        eps_had = eps / (8 * b * mu2)
        p_hat, queries = amplitude_estimate(p, eps_had, delta / 2, ae_mode, ss)
        r_branch = mu2 * (2 * p_hat - 1)
        r_hat += b * r_branch
        d = max(1, poly.degree)
        ledger.add("U_Sigma", queries)
        ledger.add("block_encoding", queries * d)
        ledger.add_cost(be.cost, queries * d)
        ledger.add("extra_gates", (n + be.ancillas) * d * queries)
        branches.append({
            "direction": direction, "level": level, "b": b, "mu2": mu2, "gamma1": gamma,
            "degree": poly.degree, "cos_error": poly.certified_error, "p": p, "p_hat": p_hat,
            "eps_had": eps_had, "queries": queries, "R_branch": r_branch,
        })
    return T1Result(float(r_hat), ledger, branches)


def alg_t1(
    theta: SimplicialField,
    c: SimplicialComplex,
    eps: float,
    delta: float,
    ae_mode: str = "ideal",
    seed: int = 0,
) -> tuple[float, QueryLedger]:
    res = run_t1(theta, c, eps, delta, ae_mode, seed)
    return res.R_hat, res.ledger


def _boundary_for(c: SimplicialComplex, k: int, branch: str) -> tuple[BlockEncoding, np.ndarray]:
    if branch == LOWER:
        be = pue_boundary(c, k, "matrix")
        mat = boundary_matrix(c, k).to_dense(np.float64)
    else:
        be = pue_boundary(c, k + 1, "matrix", transpose=True)
        mat = boundary_matrix(c, k + 1).to_dense(np.float64)
    return be, mat


def _zeta_min(mat: np.ndarray) -> float:
    s = np.linalg.svd(mat, compute_uv=False) if mat.size else np.zeros(0)
    if s.size == 0 or s[0] == 0:
        return 0.0
    return float(s[s > SV_RTOL * s[0]].min())


def _enc_bits(scale: float, K: float, eps_enc: float) -> int:
    """Fewest fractional bits t with scale * 2^-(t+1) (2K + 2^-(t+1)) <= eps_enc."""
    t = 0
    while scale * 2.0 ** (-t - 1) * (2 * K + 2.0 ** (-t - 1)) > eps_enc:
        t += 1
        if t > 200:
            raise ValueError("fixed-point encoding of K_q needs more than 200 bits")
    return t


def run_t2(
    omega: SimplicialField,
    c: SimplicialComplex,
    q: int | str,
    K_q: float,
    Delta: float,
    delta: float,
    ae_mode: str = "ideal",
    seed: int = 0,
    beta: float = 1.0,
) -> T2Result:
    """Certify no phase locking (z = 1) by comparing a QSVT success probability to a threshold.

    p ~ C K_s^2 with C = n n_q / (4 kappa^4 beta^2 N^2).  Amplitude
    estimation, coupling encoding and the polynomial error each get CDelta^2/3.
    """
    if not Delta > 0:
        raise ValueError(f"Delta must be positive, got {Delta}")
    if not (0 < delta < 0.5):
        raise ValueError("delta must lie in (0, 1/2)")
    if K_q < 0:
        raise ValueError("K_q must be non-negative")
    omega.check(c)
    k = omega.k
    branch = resolve_branch(q, k)
    level = k - 1 if branch == LOWER else k + 1
    n_q = c.n_simplices(level) if level >= 0 else 0
    if n_q == 0:
        raise ValueError(f"no {level}-simplices: branch {branch} undefined")
    n = c.n
    ledger = QueryLedger()
    classical = npl_critical(omega, branch, c)
    norm = omega.norm
    audit: dict[str, Any] = {
        "branch": branch, "q": level, "n": n, "n_q": n_q, "K_q": K_q, "Delta": Delta,
        "K_q_s_classical": classical.K_q_s,
        "promise_ok": bool(abs(K_q - classical.K_q_s) >= Delta),
    }
    if norm == 0:
        audit.update({"degenerate": "zero omega", "budget_sum_ok": True, "z": 0})
        return T2Result(0, ledger, audit)
    be, mat = _boundary_for(c, k, branch)
    zeta = _zeta_min(mat)
    if zeta == 0:
        audit.update({"degenerate": "zero boundary", "budget_sum_ok": True, "z": 0})
        return T2Result(0, ledger, audit)
    kappa = max(1.0, math.sqrt(n) / zeta) * (1 + KAPPA_MARGIN)
    scale = n * n_q / (4 * kappa**4 * beta**2 * norm**2)
    budget = scale * Delta**2
    eps_ae = eps_enc = budget / 3
    k_ub = kappa * norm / (math.sqrt(n) * math.sqrt(n_q))
    a = math.sqrt(n_q) * k_ub / norm
    eps_line = math.sqrt(n_q) / norm * min(Delta**2 / (6 * k_ub), Delta / 12)
    eps_root = -a + math.sqrt(a * a + n_q * Delta**2 / (3 * norm**2))
    eps_qsvt = min(eps_line, eps_root)
    eps_poly = min(math.sqrt(n) * eps_qsvt, MAX_POLY_EPS)
    poly = cheb_pseudo_inverse(kappa, eps_poly)
    qbe = qsvt_apply(be, poly)
    alpha = beta
    state = prepare_field_state(omega, c, alpha, 1 if alpha > 1 else 0)
    t = state.target
    p = float(np.linalg.norm(qbe.block @ t) ** 2)
    # pointwise error of p(s) against 1/(2 kappa^2 s) on the singular values
    e_vec = poly.certified_error * float(np.linalg.norm(t))
    x_ub = math.sqrt(n) * math.sqrt(n_q) * k_ub / (2 * kappa**2 * beta * norm)
    delta_qsvt = 2 * x_ub * e_vec + e_vec**2
    p_ideal = scale * classical.K_q_s**2
    ae_eps = min(eps_ae, 0.999)
    p_hat, queries = amplitude_estimate(min(1.0, p), ae_eps, delta, ae_mode, seed)
    bits = _enc_bits(scale, K_q, eps_enc)
    k_tilde = float(round_fixed(K_q, bits))
    tau = scale * k_tilde**2
    z = int(p_hat > tau)
    d = max(1, poly.degree)
    ledger.add("U_Omega", queries)
    ledger.add("block_encoding", queries * d)
    ledger.add_cost(be.cost, queries * d)
    ledger.add("extra_gates", (n + qbe.ancillas + bits) * d * queries)
    audit.update({
        "kappa": kappa, "zeta_min": zeta, "threshold_scale": scale, "budget": budget,
        "eps_AE": eps_ae, "eps_enc": eps_enc, "eps_QSVT": eps_qsvt, "eps_poly": eps_poly,
        "Delta_QSVT": delta_qsvt, "poly_error": poly.certified_error, "degree": poly.degree,
        "p": p, "p_ideal": p_ideal, "p_error": abs(p - p_ideal), "p_hat": p_hat,
        "enc_bits": bits, "K_tilde": k_tilde, "tau": tau, "queries": queries,
        "budget_sum_ok": bool(delta_qsvt + eps_ae + eps_enc <= budget * (1 + 1e-12)),
        "qsvt_error_ok": bool(abs(p - p_ideal) <= delta_qsvt + 1e-15),
        "z": z,
    })
    return T2Result(z, ledger, audit)


def alg_t2(
    omega: SimplicialField,
    c: SimplicialComplex,
    q: int | str,
    K_q: float,
    Delta: float,
    delta: float,
    ae_mode: str = "ideal",
    seed: int = 0,
) -> tuple[int, QueryLedger]:
    res = run_t2(omega, c, q, K_q, Delta, delta, ae_mode, seed)
    return res.z, res.ledger
