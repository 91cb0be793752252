"""Explicit unitaries: Dirac operator, membership oracle, boundary PUE."""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from ..complex import SimplicialComplex, boundary_matrix, simplex_to_index
from .types import BlockEncoding, full_index

__all__ = [
    "dirac_unitary",
    "membership_oracle_unitary",
    "projection_not",
    "pue_boundary",
    "simplex_indices",
    "popcount",
]

MAX_QUBITS_DIRAC = 12
MAX_GATE_EXACT_PUE = 10


def popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    while np.any(x):
        out += x & 1
        x = x >> 1
    return out


def simplex_indices(c: SimplicialComplex, k: int) -> np.ndarray:
    """System basis indices of the k-simplices, in simplex order."""
    if not (0 <= k <= c.max_dim):
        return np.zeros(0, dtype=np.int64)
    return np.asarray([simplex_to_index(s, c.n) for s in c.simplices[k]], dtype=np.int64)


def dirac_unitary(n: int) -> sp.csr_matrix:
    """V = n**-1/2 sum_i Z^(i-1) X 1 on n qubits (qubit 1 = vertex 0 = MSB).

    The term for vertex v flips bit v with sign (-1)**(number of occupied
    vertices before v).
    """
    if not (1 <= n <= MAX_QUBITS_DIRAC):
        raise ValueError(f"Dirac operator supports 1 <= n <= {MAX_QUBITS_DIRAC}, got {n}")
    dim = 1 << n
    cols = np.arange(dim, dtype=np.int64)
    rows, data, cc = [], [], []
    for v in range(n):
        bit = 1 << (n - 1 - v)
        higher = cols >> (n - v)  # bits of vertices 0..v-1
        sign = 1.0 - 2.0 * (popcount(higher) & 1)
        rows.append(cols ^ bit)
        cc.append(cols)
        data.append(sign / math.sqrt(n))
    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cc))), shape=(dim, dim)
    )


def _flip_where(valid: np.ndarray, n_sys: int, ancillas: int, target: int) -> sp.csr_matrix:
    """Permutation flipping ancilla ``target`` (0 = most significant) where valid."""
    dim = 1 << (n_sys + ancillas)
    idx = np.arange(dim, dtype=np.int64)
    sys_part = idx >> ancillas
    flip = valid[sys_part]
    bit = 1 << (ancillas - 1 - target)
    dest = np.where(flip, idx ^ bit, idx)
    return sp.csr_matrix((np.ones(dim), (dest, idx)), shape=(dim, dim))


def _valid_mask(c: SimplicialComplex, k: int) -> np.ndarray:
    mask = np.zeros(1 << c.n, dtype=bool)
    mask[simplex_indices(c, k)] = True
    return mask


def membership_oracle_unitary(c: SimplicialComplex, k: int) -> sp.csr_matrix:
    """O_{m_k}|sigma>|a> = |sigma>|a XOR 1[sigma is a k-simplex]>, flag last."""
    if c.n > MAX_QUBITS_DIRAC:
        raise ValueError(f"membership oracle supports n <= {MAX_QUBITS_DIRAC}, got {c.n}")
    return _flip_where(_valid_mask(c, k), c.n, 1, 0)


def projection_not(c: SimplicialComplex, k: int, ancillas: int, target: int) -> sp.csr_matrix:
    """C_{Pi_k^perp}NOT: (1 x X) O_{m_k}, flipping ``target`` off the k-simplices."""
    valid = _valid_mask(c, k)
    oracle = _flip_where(valid, c.n, ancillas, target)
    always = _flip_where(np.ones_like(valid), c.n, ancillas, target)
    return (always @ oracle).tocsr()


def pue_boundary(
    c: SimplicialComplex, k: int, tier: str = "gate_exact", transpose: bool = False
) -> BlockEncoding:
    """Projected unitary encoding of B_k / sqrt(n) with two ancillas.

    Gate-exact tier: U = C_{Pi_{k-1}^perp}NOT (V x 1) C_{Pi_k^perp}NOT, ancilla 0
    guarding the input dimension and ancilla 1 the output dimension.  With
    ``transpose`` the adjoint is used, whose corner is B_k^T / sqrt(n).
    """
    if not (1 <= k <= c.max_dim + 1):
        raise ValueError(f"boundary dimension {k} is not available (max dim {c.max_dim})")
    n = c.n
    rows = simplex_indices(c, k - 1)
    cols = simplex_indices(c, k)
    cost = {f"O_m{k}": 1, f"O_m{k - 1}": 1}
    if tier == "gate_exact":
        if n > MAX_GATE_EXACT_PUE:
            raise ValueError(f"gate-exact PUE supports n <= {MAX_GATE_EXACT_PUE}, got {n}")
        v = sp.kron(dirac_unitary(n), sp.identity(4), format="csr")
        u = (projection_not(c, k - 1, 2, 1) @ v @ projection_not(c, k, 2, 0)).tocsr()
        if transpose:
            u = u.conj().T.tocsr()
            rows, cols = cols, rows
        sub = u[full_index(rows, 0, 2)][:, full_index(cols, 0, 2)]
        block = sub.toarray().real
    elif tier == "matrix":
        u = None
        b = boundary_matrix(c, k).to_dense(np.float64) / math.sqrt(n)
        block = b.T if transpose else b
        if transpose:
            rows, cols = cols, rows
    else:
        raise ValueError(f"tier must be 'gate_exact' or 'matrix', got {tier!r}")
    return BlockEncoding(
        block, math.sqrt(n), 2, rows, cols, n, tier, u, cost,
        {"kind": "pue_boundary", "k": k, "transpose": transpose},
    )
