"""Amplitude block encoding, singular value transformation, Hadamard test."""

from __future__ import annotations

import math

import numpy as np

from ..complex import SimplicialComplex
from ..dynamics import LOWER, UPPER
from .gates import simplex_indices
from .states import projected_phase_prep
from .types import BlockEncoding, ChebyshevPolynomial, PreparedState

__all__ = [
    "amplitude_block_encoding",
    "amplitude_be_corner",
    "amplitude_be_unitary",
    "qsvt_apply",
    "hadamard_test_prob",
    "halmos_dilation",
]

MAX_GATE_EXACT_AMPLITUDE = 6
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


class _AmplitudeCircuit:
    """U_A for one copy-register basis state i, applied to vectors.

    Data register: the (n + a + 2)-qubit projected-phase register.  Layout of
    the working vector: (control, data, q) with q the least significant.
    U_Theta is the Householder reflection sending |0> to the prepared state,
    so it is real, symmetric and self-inverse; P_i is the X-string writing
    |i, 0> into the data register.
    """

    def __init__(self, psi: np.ndarray, i_data: int) -> None:
        self.psi = np.asarray(psi, dtype=float)
        self.dim = self.psi.size
        self.i_data = int(i_data)
        e0 = np.zeros(self.dim)
        e0[0] = 1.0
        v = e0 - self.psi
        nv = np.linalg.norm(v)
        self.v = v / nv if nv > 1e-15 else None

    def u_theta(self, x: np.ndarray) -> np.ndarray:
        if self.v is None:
            return x.copy()
        return x - 2.0 * np.outer(self.v, self.v @ x) if x.ndim == 2 else x - 2.0 * self.v * (self.v @ x)

    def p_i(self, x: np.ndarray) -> np.ndarray:
        perm = np.arange(self.dim) ^ self.i_data
        return x[perm]

    def u_w(self, x: np.ndarray) -> np.ndarray:
        """(1 x H)(U_Theta x |0><0| + P_i x |1><1|)(1 x H) on (data, q)."""
        y = x.reshape(self.dim, 2) @ _H.T
        y = np.stack([self.u_theta(y[:, 0]), self.p_i(y[:, 1])], axis=1)
        return (y @ _H.T).reshape(-1)

    def s0(self, x: np.ndarray) -> np.ndarray:
        y = x.copy()
        y[0] = -y[0]
        return y

    def z_q(self, x: np.ndarray) -> np.ndarray:
        y = x.reshape(self.dim, 2).copy()
        y[:, 1] = -y[:, 1]
        return y.reshape(-1)

    def g(self, x: np.ndarray) -> np.ndarray:
        # U_W is self-inverse, so U_W^dagger = U_W
        return self.u_w(self.s0(self.u_w(self.z_q(x))))

    def g_dag(self, x: np.ndarray) -> np.ndarray:
        return self.z_q(self.u_w(self.s0(self.u_w(x))))

    def u_a(self, x: np.ndarray) -> np.ndarray:
        """(H x 1) U_G (H ZXZX x 1); ZXZX = -1 fixes the sign of the corner."""
        half = 2 * self.dim
        y = x.reshape(2, half)
        y = -(_H @ y)
        y = np.stack([self.u_w(y[0]), self.u_w(y[1])])
        y = np.stack([self.g(y[0]), self.g_dag(y[1])])
        y = np.stack([self.u_w(y[0]), self.u_w(y[1])])
        return (_H @ y).reshape(-1)

    def w_state(self) -> np.ndarray:
        e = np.zeros(2 * self.dim)
        e[0] = 1.0
        return self.u_w(e)

    def g_eigenphases(self) -> tuple[np.ndarray, float]:
        """Eigenvalues of G on span{|W>, Z|W>} and the overlap <W|Z|W>."""
        w = self.w_state()
        zw = self.z_q(w)
        c = float(w @ zw)
        perp = zw - c * w
        npp = np.linalg.norm(perp)
        if npp < 1e-12:
            return np.array([complex(self._apply_scalar(w))]), c
        basis = np.stack([w, perp / npp], axis=1)
        gb = np.stack([self.g(basis[:, 0]), self.g(basis[:, 1])], axis=1)
        small = basis.T @ gb
        return np.linalg.eigvals(small), c

    def _apply_scalar(self, w: np.ndarray) -> float:
        return float(w @ self.g(w))


def _check_amplitude_inputs(p: PreparedState, c: SimplicialComplex, direction: str) -> None:
    if direction not in (LOWER, UPPER):
        raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")
    if p.meta.get("kind") == "projected":
        raise ValueError("pass the k-field state; the projection is applied here")


def _gamma(p: PreparedState) -> float:
    return p.alpha * math.sqrt(p.n) * p.field_norm


def amplitude_block_encoding(
    p: PreparedState, c: SimplicialComplex, direction: str, tier: str = "matrix"
) -> BlockEncoding:
    """Diagonal block (theta_pm)_i / gamma_1 with gamma_1 = alpha sqrt(n) N(theta).

    The matrix tier reads the projected amplitudes directly.  The gate-exact
    tier (n <= 6) evaluates the ancilla-zero corner of U_A for every basis
    state of the copy register, and records the eigenphase check of the
    Grover-like iterate.
    """
    _check_amplitude_inputs(p, c, direction)
    gamma = _gamma(p)
    if not gamma > 0 or not math.isfinite(gamma):
        raise ValueError(f"gamma_1 must be positive and finite, got {gamma}")
    level = p.k - 1 if direction == LOWER else p.k + 1
    basis = simplex_indices(c, level)
    if basis.size == 0:
        raise ValueError(f"no {level}-simplices: projected field undefined")
    # U_A holds four copies of the projected preparation, each one PUE
    cost = {"U_Theta": 4, f"O_m{p.k}": 4, f"O_m{level}": 4}
    if tier == "matrix":
        proj = projected_phase_prep(p, c, direction, "matrix")
        diag = proj.target
        meta = {"kind": "amplitude", "gamma": gamma}
    elif tier == "gate_exact":
        if c.n > MAX_GATE_EXACT_AMPLITUDE:
            raise ValueError(f"gate-exact amplitude encoding supports n <= {MAX_GATE_EXACT_AMPLITUDE}")
        proj = projected_phase_prep(p, c, direction, "gate_exact")
        diag = np.zeros(basis.size)
        worst_phase = 0.0
        for j, idx in enumerate(basis):
            corner, phase_err = amplitude_be_corner(proj, int(idx))
            diag[j] = corner
            worst_phase = max(worst_phase, phase_err)
        meta = {"kind": "amplitude", "gamma": gamma, "eigenphase_error": worst_phase}
    else:
        raise ValueError(f"tier must be 'gate_exact' or 'matrix', got {tier!r}")
    ancillas = p.n + p.ancillas + 5
    return BlockEncoding(np.diag(diag), gamma, ancillas, basis, basis, p.n, tier, None, cost, meta)


def amplitude_be_corner(proj: PreparedState, sys_index: int) -> tuple[float, float]:
    """<0|U_A|0> for copy-register state ``sys_index`` and the eigenphase error."""
    psi = np.asarray(proj.state, dtype=complex)
    if np.max(np.abs(psi.imag)) > 1e-14:
        raise ValueError("gate-exact amplitude encoding expects a real state")
    circ = _AmplitudeCircuit(psi.real, sys_index << proj.ancillas)
    x = np.zeros(4 * circ.dim)
    x[0] = 1.0
    corner = float(circ.u_a(x)[0])
    eig, c = circ.g_eigenphases()
    expected = -np.exp(1j * np.array([1.0, -1.0]) * math.acos(max(-1.0, min(1.0, c))))
    err = max(float(np.min(np.abs(expected - e))) for e in eig)
    return corner, err


def amplitude_be_unitary(proj: PreparedState, sys_index: int) -> np.ndarray:
    """Dense U_A for one copy-register state; small registers only."""
    circ = _AmplitudeCircuit(np.asarray(proj.state, dtype=float), sys_index << proj.ancillas)
    dim = 4 * circ.dim
    if dim > 4096:
        raise ValueError("register too large for a dense unitary")
    return np.stack([circ.u_a(col) for col in np.eye(dim)], axis=1)


def qsvt_apply(be: BlockEncoding, poly: ChebyshevPolynomial) -> BlockEncoding:
    """Singular value transformation of ``be.block`` by ``poly``.

    Even: V q(Sigma) V^H on the column space (zero singular values padded).
    Odd: U p(Sigma) V^H.  The resulting block is taken at face value (scale 1).
    """
    if poly.parity not in ("even", "odd"):
        raise ValueError("QSVT needs a polynomial of definite parity")
    a = np.asarray(be.block)
    n_rows, n_cols = a.shape
    if a.size and np.linalg.norm(a, 2) > 1 + 1e-10:
        raise ValueError("block norm exceeds 1")
    if poly.parity == "even":
        if n_cols == 0:
            out = np.zeros((0, 0))
        else:
            _, s, vh = np.linalg.svd(a, full_matrices=True) if n_rows else (None, np.zeros(0), np.eye(n_cols))
            s_ext = np.zeros(n_cols)
            s_ext[: s.size] = s
            out = (vh.conj().T * poly(s_ext)) @ vh
        rows = be.col_basis
    else:
        if a.size == 0:
            out = np.zeros_like(a)
        else:
            u, s, vh = np.linalg.svd(a, full_matrices=False)
            out = (u * poly(s)) @ vh
        rows = be.row_basis
    if np.isrealobj(a):
        out = np.real_if_close(out, tol=1e6)
        out = out.real if np.iscomplexobj(out) else out
    d = poly.degree
    cost = {key: val * d for key, val in be.cost.items()}
    cost["block_encoding"] = d
    return BlockEncoding(
        out, 1.0, be.ancillas + 1, rows, be.col_basis, be.n, be.tier, None, cost,
        {"kind": "qsvt", "degree": d, "source": be.meta.get("kind"), "parity": poly.parity},
    )


def halmos_dilation(m: np.ndarray) -> np.ndarray:
    """[[M, sqrt(1 - M M^H)], [sqrt(1 - M^H M), -M^H]] for ||M|| <= 1."""
    m = np.asarray(m)
    r, c = m.shape

    def psd_sqrt(h: np.ndarray) -> np.ndarray:
        w, v = np.linalg.eigh((h + h.conj().T) / 2)
        return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T

    top = np.hstack([m, psd_sqrt(np.eye(r) - m @ m.conj().T)])
    bottom = np.hstack([psd_sqrt(np.eye(c) - m.conj().T @ m), -m.conj().T])
    return np.vstack([top, bottom])


def hadamard_test_prob(reference: PreparedState, be: BlockEncoding) -> float:
    """Probability of reading 0 on the Hadamard-test control qubit.

    The controlled unitary is the dilation of ``be.block`` on the block
    coordinates and sends the reference garbage to a fresh orthogonal
    coordinate, so p = (1 + <Sigma|M|Sigma>) / 2 with |Sigma> the reference's
    ancilla-zero block.
    """
    m = np.asarray(be.block)
    if m.shape[0] != m.shape[1] or not np.array_equal(be.row_basis, be.col_basis):
        raise ValueError("Hadamard test needs a square block on a single basis")
    if reference.n != be.n:
        raise ValueError(f"reference has {reference.n} system qubits, block has {be.n}")
    dim = m.shape[0]
    blk = reference.block
    t = blk[be.col_basis]
    leak = np.linalg.norm(blk) ** 2 - np.linalg.norm(t) ** 2
    if leak > 1e-12:
        raise ValueError("reference target has weight outside the block basis")
    g = math.sqrt(max(0.0, 1.0 - float(np.vdot(t, t).real)))
    w = halmos_dilation(m)
    full = np.zeros((2 * dim + 2, 2 * dim + 2), dtype=w.dtype)
    full[: 2 * dim, : 2 * dim] = w
    full[2 * dim + 1, 2 * dim] = 1.0
    full[2 * dim, 2 * dim + 1] = 1.0
    psi = np.zeros(2 * dim + 2, dtype=complex)
    psi[:dim] = t
    psi[2 * dim] = g
    branch0 = (psi + full @ psi) / 2.0
    return float(np.vdot(branch0, branch0).real)
