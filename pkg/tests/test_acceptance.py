"""Acceptance suite: twelve criteria, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from typing import Callable

import numpy as np
import pytest

from skmlab.complex import (
    boundary_matrix,
    build_clique_complex,
    complete_graph,
    gen_random_graph,
)
from skmlab.costmodel import r_exponent, sweep_rows, t2_cost_ratio
from skmlab.diagnostics import npl_critical, npl_decide, order_parameter
from skmlab.dynamics import (
    LOWER,
    UPPER,
    SimplicialField,
    aggregate_node_frequencies,
    mean_aggregation,
    node_kuramoto_rhs,
    project_field,
    projected_rhs,
    skm_rhs,
)
from skmlab.qsim import (
    amplitude_block_encoding,
    amplitude_estimate,
    cheb_cos,
    cheb_pseudo_inverse,
    dirac_unitary,
    prepare_field_state,
    pue_boundary,
    run_t1,
    run_t2,
    sim_node_aggregated_prep,
)
from skmlab.qsim.polynomials import cos_degree_estimate, g_of, pinv_degree_estimate

SEED = 20240601


def _random_complex(rng: np.random.Generator, n_min: int, n_max: int, max_dim: int | None = None):
    n = int(rng.integers(n_min, n_max + 1))
    g = gen_random_graph(n, float(rng.uniform(0.3, 1.0)), rng)
    return build_clique_complex(g, n - 1 if max_dim is None else max_dim)


def criterion_1() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    checked = 0
    for _ in range(200):
        c = _random_complex(rng, 2, 8)
        c.check_closure()
        for k in range(1, c.max_dim):
            prod = boundary_matrix(c, k).to_dense(np.int64) @ boundary_matrix(c, k + 1).to_dense(np.int64)
            if np.any(prod):
                return False, f"B_{k} B_{k + 1} != 0 on a complex with n = {c.n}"
            checked += 1
    elapsed = time.perf_counter() - start
    return elapsed < 10, f"{checked} products exact, closure holds, {elapsed:.2f} s (limit 10 s)"


def criterion_2() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for _ in range(120):
        c = _random_complex(rng, 2, 7)
        for k in range(1, c.max_dim + 2):
            be = pue_boundary(c, k, "gate_exact")
            corner = be.corner()
            want = np.zeros_like(corner)
            want[np.ix_(be.row_basis, be.col_basis)] = boundary_matrix(c, k).to_dense(float) / math.sqrt(c.n)
            # full 2^n system space, so stray entries outside the simplex basis count too
            err = float(np.max(np.abs(corner - want)))
            worst = max(worst, err)
            cases += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 60
    return ok, f"{cases} (complex, k) cases, max |corner - B_k/sqrt(n)| = {worst:.1e}, {elapsed:.2f} s"


def criterion_3() -> tuple[bool, str]:
    e = np.zeros(8)
    e[0b110] = 1.0
    want = np.zeros(8)
    want[0b010], want[0b100], want[0b111] = 1.0, -1.0, 1.0
    want /= math.sqrt(3)
    out = dirac_unitary(3) @ e
    return bool(np.array_equal(out, want)), f"V|110> = {np.round(out * math.sqrt(3), 12).tolist()} / sqrt(3)"


def _sparse_projection(theta: SimplicialField, c, direction: str) -> np.ndarray:
    if direction == LOWER:
        return boundary_matrix(c, theta.k).to_sparse() @ theta.values
    return boundary_matrix(c, theta.k + 1).to_sparse().T @ theta.values


def criterion_4() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 4)
    worst_diag = worst_tier = 0.0
    pairs = 0
    while pairs < 100:
        c = _random_complex(rng, 3, 6)
        k = int(rng.integers(0, c.max_dim + 1))
        direction = LOWER if rng.random() < 0.5 else UPPER
        level = k - 1 if direction == LOWER else k + 1
        if level < 0 or level > c.max_dim or c.n_simplices(level) == 0:
            continue
        theta = SimplicialField(k, rng.uniform(-math.pi, math.pi, c.n_simplices(k)))
        proj = _sparse_projection(theta, c, direction)
        if np.linalg.norm(proj) < 1e-9:
            continue
        p = prepare_field_state(theta, c)
        m = amplitude_block_encoding(p, c, direction, "matrix")
        want = proj / (math.sqrt(c.n) * theta.norm)
        worst_diag = max(worst_diag, float(np.max(np.abs(np.diag(m.block) - want))))
        g = amplitude_block_encoding(p, c, direction, "gate_exact")
        worst_tier = max(worst_tier, float(np.max(np.abs(g.block - m.block))))
        pairs += 1
    ok = worst_diag <= 1e-10 and worst_tier <= 1e-10
    return ok, f"{pairs} pairs: diagonal error {worst_diag:.1e}, tier gap {worst_tier:.1e}, both tiers on every pair"


def criterion_5() -> tuple[bool, str]:
    grid = np.linspace(-1.0, 1.0, 10_001)
    ok = True
    worst_ratio = 0.0
    for gamma in (1.0, 5.0, 20.0, 50.0):
        for eps in (1e-3, 1e-6):
            p = cheb_cos(gamma, eps)
            err = float(np.max(np.abs(np.cos(gamma * grid) - p(grid))))
            ratio = p.degree / cos_degree_estimate(gamma, eps)
            worst_ratio = max(worst_ratio, ratio, 1 / ratio)
            ok &= err <= eps and 1 / 3 <= ratio <= 3
    for kappa in (2.0, 5.0, 10.0):
        for eps in (1e-3, 1e-6):
            p = cheb_pseudo_inverse(kappa, eps)
            x = np.linspace(1 / kappa, 1.0, 10_001)
            y = np.linspace(1 / kappa**2, 1.0, 10_001)
            err_x = float(np.max(np.abs(p(x) - 1 / (2 * kappa**2 * x))))
            err_y = float(np.max(np.abs(g_of(p, y) - 1 / (2 * kappa**2 * y))))
            ratio = p.degree / pinv_degree_estimate(kappa, eps)
            worst_ratio = max(worst_ratio, ratio, 1 / ratio)
            ok &= max(err_x, err_y) <= eps / (2 * kappa**2) and 1 / 3 <= ratio <= 3
    return bool(ok), f"14 certificates checked, worst degree/estimate factor {worst_ratio:.2f} (limit 3)"


def criterion_6() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 6)
    eps, delta = 0.05, 0.05
    start = time.perf_counter()
    worst, runs = 0.0, 0
    instances = 0
    while instances < 50:
        c = _random_complex(rng, 3, 7, 4)
        k = int(rng.integers(0, c.max_dim + 1))
        lower = c.n_simplices(k - 1) if k >= 1 else 0
        if c.n_simplices(k) == 0 or lower + c.n_simplices(k + 1) == 0:
            continue
        theta = SimplicialField(k, rng.uniform(-math.pi, math.pi, c.n_simplices(k)))
        r = order_parameter(theta, c).R
        for mode in ("ideal", "adversarial_plus", "adversarial_minus"):
            worst = max(worst, abs(run_t1(theta, c, eps, delta, mode).R_hat - r))
            runs += 1
        instances += 1
    k3 = build_clique_complex(complete_graph(3), 2)
    k3_err = abs(run_t1(SimplicialField(1, [math.pi / 2, 0.0, 0.0]), k3, eps, delta).R_hat - 0.25)
    elapsed = time.perf_counter() - start
    ok = worst <= eps and k3_err <= eps and elapsed < 300
    return ok, f"{runs} runs, max |R_hat - R| = {worst:.4f}, K_3 error {k3_err:.4f} (eps {eps}), {elapsed:.2f} s"


def criterion_7() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 7)
    start = time.perf_counter()
    modes = ("ideal", "sampled", "adversarial_plus", "adversarial_minus")
    instances = runs = mismatches = budget_bad = 0
    while instances < 100:
        c = _random_complex(rng, 3, 6, 3)
        k = int(rng.integers(0, c.max_dim + 1))
        if c.n_simplices(k) == 0:
            continue
        om = SimplicialField(k, rng.normal(size=c.n_simplices(k)), "frequency")
        usable = False
        for branch in (LOWER, UPPER):
            level = k - 1 if branch == LOWER else k + 1
            if level < 0 or level > c.max_dim or c.n_simplices(level) == 0:
                continue
            ks = npl_critical(om, branch, c).K_q_s
            if ks < 1e-6:
                continue
            ratio = rng.uniform(0.2, 0.8) if rng.random() < 0.5 else rng.uniform(1.25, 2.0)
            K = ks * ratio
            gap = 0.9 * abs(K - ks)
            want = npl_decide(K, ks, gap).z
            res = run_t2(om, c, branch, K, gap, 0.05, modes[runs % 4], seed=runs)
            a = res.audit
            mismatches += int(res.z != want)
            recomputed = a["eps_AE"] + a["eps_enc"] + a["Delta_QSVT"] <= a["budget"] * (1 + 1e-12)
            budget_bad += int(not (recomputed and a["budget_sum_ok"]))
            runs += 1
            usable = True
        instances += int(usable)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and budget_bad == 0 and elapsed < 300
    return ok, f"{instances} instances, {runs} branch runs, {mismatches} mismatches, {budget_bad} budget failures, {elapsed:.2f} s"


def criterion_8() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 8)
    worst_solver = worst_scale = 0.0
    count = 0
    while count < 100:
        c = _random_complex(rng, 3, 8, 3)
        k = int(rng.integers(0, c.max_dim + 1))
        branch = LOWER if rng.random() < 0.5 else UPPER
        level = k - 1 if branch == LOWER else k + 1
        if c.n_simplices(k) == 0 or level < 0 or level > c.max_dim or c.n_simplices(level) == 0:
            continue
        om = SimplicialField(k, rng.normal(size=c.n_simplices(k)), "frequency")
        dense = npl_critical(om, branch, c).K_q_s
        it = npl_critical(om, branch, c, "iterative").K_q_s
        worst_solver = max(worst_solver, abs(dense - it) / max(1.0, dense))
        s = float(rng.uniform(0.01, 100.0))
        scaled = npl_critical(SimplicialField(k, s * om.values, "frequency"), branch, c).K_q_s
        worst_scale = max(worst_scale, abs(scaled - s * dense) / max(1.0, s * dense))
        count += 1
    ok = worst_solver <= 1e-8 and worst_scale <= 1e-12
    return ok, f"100 instances: solver gap {worst_solver:.1e} (1e-8), scale error {worst_scale:.1e} (1e-12)"


def criterion_9() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 9)
    worst_rhs = worst_comm = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = gen_random_graph(n, float(rng.uniform(0.2, 1.0)), rng)
        c = build_clique_complex(g, 3)
        th, om = rng.uniform(-math.pi, math.pi, n), rng.normal(size=n)
        K = float(rng.uniform(0.1, 3.0))
        got = skm_rhs(SimplicialField(0, th), SimplicialField(0, om, "frequency"), 0.0, K, c)
        ref = node_kuramoto_rhs(th, om, -K, g.adjacency(), "reversed")
        worst_rhs = max(worst_rhs, float(np.max(np.abs(got - ref))))
        for k in range(c.max_dim + 1):
            nk = c.n_simplices(k)
            if nk == 0:
                continue
            theta = SimplicialField(k, rng.uniform(-math.pi, math.pi, nk))
            omega = SimplicialField(k, rng.normal(size=nk), "frequency")
            kl, ku = rng.uniform(0, 2, size=2)
            rhs = SimplicialField(k, skm_rhs(theta, omega, kl, ku, c))
            for direction, coupling in ((LOWER, kl), (UPPER, ku)):
                if direction == LOWER and k == 0:
                    continue
                lhs = project_field(rhs, direction, c).values
                if lhs.size == 0:
                    continue
                rhs_p = projected_rhs(
                    project_field(theta, direction, c), project_field(omega, direction, c), coupling, c
                )
                worst_comm = max(worst_comm, float(np.max(np.abs(lhs - rhs_p))))
    ok = worst_rhs <= 1e-12 and worst_comm <= 1e-10
    return ok, f"k=0 reduction error {worst_rhs:.1e} (1e-12), projection commutation {worst_comm:.1e} (1e-10)"


def criterion_10() -> tuple[bool, str]:
    r62 = r_exponent(6, 2)
    worst = 0.0
    for m in range(2, 52):
        for k in range(1, 11):
            rep = t2_cost_ratio(m, k, 1.5)
            gp = rep.components["g"] * rep.components["p"]
            worst = max(worst, abs(rep.ratio - gp) / gp)
    ns = np.unique(np.logspace(2, 5, 40).astype(int)).tolist()
    rows = sweep_rows("t2", {"n": ns, "c_exp": [1.0]})
    x = np.log([row["n"] for row in rows])
    y = np.array([row["log10_ratio"] for row in rows]) * math.log(10)
    lead = float(np.polyfit(x, y, 2)[0])
    ok = r62 == 2 and worst <= 1e-12 and lead > 0
    return ok, f"r(6,2) = {r62}, max |ratio - g p|/(g p) = {worst:.1e} on 50x10, quadratic lead {lead:.3f} > 0"


def criterion_11() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 11)
    worst_exact = 0.0
    k5 = build_clique_complex(complete_graph(5), 3)
    for k in (1, 2):
        node = rng.uniform(-1, 1, 5)
        f = mean_aggregation(k + 1, m=53)
        p = sim_node_aggregated_prep(f, node, k5, k)
        exact = aggregate_node_frequencies(f, node, k5, k)
        ref = prepare_field_state(exact, k5)
        t = p.target / np.linalg.norm(p.target)
        worst_exact = max(worst_exact, float(np.max(np.abs(t - ref.target / np.linalg.norm(ref.target)))))
    k3 = build_clique_complex(complete_graph(3), 2)
    f8 = mean_aggregation(2, m=8)
    worst_excess = -math.inf
    for _ in range(50):
        p = sim_node_aggregated_prep(f8, rng.uniform(-1, 1, 3), k3, 1)
        bound = 2.0 ** -f8.m_prime + f8.lipschitz * 2.0**-8
        worst_excess = max(worst_excess, float(np.max(np.abs(p.meta["values"] - p.meta["exact"]))) - bound)
    ok = worst_exact <= 1e-12 and worst_excess <= 0
    return ok, f"m=53 state error {worst_exact:.1e} (1e-12); m=8 worst error minus bound {worst_excess:.2e} <= 0"


def criterion_12() -> tuple[bool, str]:
    eps, delta, trials = 0.02, 0.05, 1000
    rng = np.random.default_rng(SEED + 12)
    ps = rng.uniform(0.0, 1.0, trials)
    fails = sum(abs(amplitude_estimate(p, eps, delta, "sampled", SEED + i)[0] - p) > eps for i, p in enumerate(ps))
    rate = fails / trials
    return rate <= delta, f"{fails}/{trials} failures, rate {rate:.3f} (delta {delta})"


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, str]]]] = {
    1: ("boundary exactness", criterion_1),
    2: ("PUE corner", criterion_2),
    3: ("Dirac sign case", criterion_3),
    4: ("amplitude block encoding", criterion_4),
    5: ("polynomial certificates", criterion_5),
    6: ("T1 end to end", criterion_6),
    7: ("T2 end to end", criterion_7),
    8: ("NPL solver equivalence", criterion_8),
    9: ("dynamics reduction", criterion_9),
    10: ("cost-model spot checks", criterion_10),
    11: ("node-aggregated prep", criterion_11),
    12: ("sampled amplitude estimation", criterion_12),
}


def _line(number: int) -> tuple[bool, str]:
    name, check = CRITERIA[number]
    ok, detail = check()
    return bool(ok), f"{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = _line(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
