"""Probabilistic state preparation simulated at the state-vector level."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ..complex import SimplicialComplex, simplex_to_index
from ..dynamics import LOWER, UPPER, AggregationFunction, SimplicialField, simplex_node_values
from .gates import pue_boundary, simplex_indices
from .types import PreparedState

__all__ = [
    "dicke_prep",
    "prepare_field_state",
    "projected_phase_prep",
    "sim_node_aggregated_prep",
    "round_fixed",
]

MAX_STATE_QUBITS = 22


def _check_size(qubits: int) -> None:
    if qubits > MAX_STATE_QUBITS:
        raise ValueError(f"{qubits} qubits exceed the desk-scale limit of {MAX_STATE_QUBITS}")


def round_fixed(x: np.ndarray, bits: int) -> np.ndarray:
    """Round to a multiple of 2**-bits, ties to even."""
    scale = math.ldexp(1.0, bits)
    return np.rint(np.asarray(x, dtype=float) * scale) / scale


def dicke_prep(c: SimplicialComplex, k: int) -> PreparedState:
    """Dicke state |D(n, k+1)> flagged by the membership oracle.

    One ancilla: 0 on valid k-simplices (target), 1 on the other weight-(k+1)
    strings.  The rescale is mu_k = sqrt(C(n, k+1) / n_k).
    """
    n = c.n
    n_k = c.n_simplices(k)
    if n_k == 0:
        raise ValueError(f"no {k}-simplices to prepare")
    _check_size(n + 1)
    total = math.comb(n, k + 1)
    amp = 1.0 / math.sqrt(total)
    state = np.zeros(1 << (n + 1))
    valid = set(c.simplices[k])
    for s in combinations(range(n), k + 1):
        flag = 0 if s in valid else 1
        state[simplex_to_index(s, n) * 2 + flag] = amp
    return PreparedState(
        n, 1, state, k, simplex_indices(c, k), 1.0,
        {"kind": "dicke", "mu": math.sqrt(total / n_k)},
    )


def prepare_field_state(
    x: SimplicialField, c: SimplicialComplex, alpha: float = 1.0, a: int = 0
) -> PreparedState:
    """Amplitude encoding of ``x`` with rescale ``alpha`` and ``a`` ancillas.

    The orthogonal mass sqrt(1 - 1/alpha**2) sits on ancilla |0..01>.
    """
    x.check(c)
    norm = x.norm
    if norm == 0:
        raise ValueError("cannot amplitude-encode the zero field")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if alpha > 1 and a < 1:
        raise ValueError("alpha > 1 needs at least one ancilla for the garbage")
    _check_size(c.n + a)
    sup = simplex_indices(c, x.k)
    reg = np.zeros((1 << c.n, 1 << a))
    unit = x.values / norm
    reg[sup, 0] = unit / alpha
    if alpha > 1:
        reg[sup, 1] = unit * math.sqrt(1.0 - 1.0 / alpha**2)
    return PreparedState(c.n, a, reg.reshape(-1), x.k, sup, norm, {"kind": "field"})


def projected_phase_prep(
    p: PreparedState, c: SimplicialComplex, direction: str, tier: str = "gate_exact"
) -> PreparedState:
    """Apply the boundary PUE to a prepared k-field state.

    Lower uses U_{B_k}, upper uses the adjoint of U_{B_{k+1}}.  The new
    ancillas (two) are appended after the existing ones.
    """
    k = p.k
    if direction == LOWER:
        if k < 1:
            raise ValueError("lower projection needs k >= 1")
        be = pue_boundary(c, k, tier)
        new_k = k - 1
    elif direction == UPPER:
        be = pue_boundary(c, k + 1, tier, transpose=True)
        new_k = k + 1
    else:
        raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")
    n, a = p.n, p.ancillas
    _check_size(n + a + 2)
    reg = p.register  # (2^n, 2^a)
    if be.unitary is not None:
        u = be.unitary  # index sys*4 + pue_anc
        src = np.zeros((1 << n, 4, 1 << a))
        src[:, 0, :] = reg
        flat = src.reshape((1 << n) * 4, 1 << a)
        out = (u @ flat).reshape(1 << n, 4, 1 << a)
        new = np.transpose(out, (0, 2, 1)).reshape(-1)
    else:
        # matrix tier: only the ancilla-zero action is known, so the garbage
        # is completed on the first PUE ancilla to keep the state normalized
        new_reg = np.zeros((1 << n, 1 << a, 4))
        new_reg[:, :, 0] = 0.0
        col_amp = reg[be.col_basis, :]
        new_reg[be.row_basis, :, 0] = be.block @ col_amp
        moved = np.linalg.norm(new_reg)
        rest = math.sqrt(max(0.0, 1.0 - moved**2))
        leftover = reg.copy()
        leftover_norm = np.linalg.norm(leftover)
        if rest > 0 and leftover_norm > 0:
            new_reg[:, :, 2] = leftover / leftover_norm * rest
        new = new_reg.reshape(-1)
    support = simplex_indices(c, new_k)
    out_state = PreparedState(
        n, a + 2, new, new_k, support, p.field_norm,
        {"kind": "projected", "direction": direction, "source_alpha": p.alpha, "tier": tier},
    )
    if out_state.success_probability == 0:
        raise ValueError("projected field vanishes: rescale is infinite")
    return out_state


def sim_node_aggregated_prep(
    f: AggregationFunction, node_omega: np.ndarray, c: SimplicialComplex, k: int
) -> PreparedState:
    """Node-aggregated frequency state with fixed-point arithmetic.

    Node data are rounded to ``f.m`` fractional bits and f is evaluated and
    rounded to ``f.m_prime`` bits.  Ancilla 0 is the membership flag of the
    Dicke step and ancilla 1 the rotation qubit of the amplitude step.
    """
    if f.arity != k + 1:
        raise ValueError(f"aggregation arity {f.arity} does not match k+1 = {k + 1}")
    n = c.n
    n_k = c.n_simplices(k)
    if n_k == 0:
        raise ValueError(f"no {k}-simplices to prepare")
    _check_size(n + 2)
    rows = simplex_node_values(node_omega, c, k)
    exact = f(rows)
    node_bar = round_fixed(rows, f.m)
    f_bar = round_fixed(f(node_bar), f.m_prime)
    worst = max(np.max(np.abs(exact)), np.max(np.abs(f_bar)))
    if worst > f.bound * (1 + 1e-12):
        raise ValueError(f"|f| reaches {worst:g}, above the declared bound {f.bound:g}")
    total = math.comb(n, k + 1)
    amp = 1.0 / math.sqrt(total)
    reg = np.zeros((1 << n, 4))
    sup = simplex_indices(c, k)
    ratio = np.clip(f_bar / f.bound, -1.0, 1.0)
    reg[sup, 0] = amp * ratio
    reg[sup, 1] = amp * np.sqrt(1.0 - ratio**2)
    valid = set(c.simplices[k])
    for s in combinations(range(n), k + 1):
        if s not in valid:
            reg[simplex_to_index(s, n), 2] = amp
    norm_bar = float(np.linalg.norm(f_bar))
    mu = math.sqrt(total / n_k)
    beta_bar = mu * f.bound * math.sqrt(n_k) / norm_bar if norm_bar > 0 else float("inf")
    return PreparedState(
        n, 2, reg.reshape(-1), k, sup, norm_bar,
        {
            "kind": "node_aggregated",
            "values": f_bar,
            "exact": exact,
            "beta": beta_bar,
            "error_bound": 2.0 ** (-f.m_prime) + f.lipschitz * 2.0 ** (-f.m),
        },
    )
