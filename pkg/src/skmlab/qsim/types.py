"""Data types shared by the simulator."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import chebyshev as C

__all__ = [
    "PreparedState",
    "BlockEncoding",
    "ChebyshevPolynomial",
    "QueryLedger",
    "full_index",
]

NORM_TOL = 1e-12


def full_index(sys_index: np.ndarray | int, anc_index: np.ndarray | int, ancillas: int):
    """Register layout: system bits first, ancillas last."""
    return np.asarray(sys_index) * (1 << ancillas) + np.asarray(anc_index)


@dataclass(frozen=True)
class PreparedState:
    """Output of a probabilistic state-preparation unitary applied to |0>.

    ``state`` is the full (n + ancillas)-qubit vector.  The target block is the
    ancilla-zero slice; it carries squared norm 1/alpha**2.  ``support`` lists
    the system basis indices (simplices of dimension ``k``) the target lives on.
    """

    n: int
    ancillas: int
    state: np.ndarray
    k: int
    support: np.ndarray
    field_norm: float = 1.0
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        vec = np.asarray(self.state)
        if vec.shape != (1 << (self.n + self.ancillas),):
            raise ValueError(
                f"state has shape {vec.shape}, expected {(1 << (self.n + self.ancillas),)}"
            )
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm is {norm}, expected 1")
        vec = vec.copy()
        vec.setflags(write=False)
        object.__setattr__(self, "state", vec)
        sup = np.asarray(self.support, dtype=np.int64)
        sup.setflags(write=False)
        object.__setattr__(self, "support", sup)

    @property
    def register(self) -> np.ndarray:
        """State reshaped to (system, ancilla)."""
        return self.state.reshape(1 << self.n, 1 << self.ancillas)

    @property
    def block(self) -> np.ndarray:
        """Ancilla-zero block over all 2**n system states."""
        return self.register[:, 0]

    @property
    def target(self) -> np.ndarray:
        """Ancilla-zero amplitudes on ``support`` (unnormalized)."""
        return self.block[self.support]

    @property
    def success_probability(self) -> float:
        return float(np.vdot(self.block, self.block).real)

    @property
    def alpha(self) -> float:
        p = self.success_probability
        return float("inf") if p == 0 else float(1.0 / np.sqrt(p))

    @property
    def garbage(self) -> np.ndarray:
        """Component orthogonal to the ancilla-zero subspace."""
        g = self.register.copy()
        g[:, 0] = 0
        return g.reshape(-1)

    def off_support_leak(self) -> float:
        mask = np.ones(1 << self.n, dtype=bool)
        mask[self.support] = False
        return float(np.linalg.norm(self.block[mask]))


@dataclass(frozen=True)
class BlockEncoding:
    """``scale * block`` is the encoded operator.

    Rows and columns of ``block`` are labelled by system basis indices in
    ``row_basis`` and ``col_basis``.  ``unitary`` (gate-exact tier) is the full
    matrix on (n + ancillas) qubits with ancillas as the low bits.
    ``cost`` counts oracle calls per application.
    """

    block: np.ndarray
    scale: float
    ancillas: int
    row_basis: np.ndarray
    col_basis: np.ndarray
    n: int
    tier: str = "matrix"
    unitary: sp.spmatrix | np.ndarray | None = None
    cost: dict[str, int] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        blk = np.asarray(self.block)
        if blk.shape != (len(self.row_basis), len(self.col_basis)):
            raise ValueError("block shape does not match its bases")
        if blk.size:
            nrm = np.linalg.norm(blk, 2)
            if nrm > 1 + 1e-10:
                raise ValueError(f"block norm {nrm} exceeds 1")

    @property
    def operator(self) -> np.ndarray:
        return self.scale * np.asarray(self.block)

    def corner(self) -> np.ndarray:
        """Ancilla-zero corner of ``unitary`` on all 2**n system states."""
        if self.unitary is None:
            raise ValueError("no explicit unitary stored for this block encoding")
        idx = full_index(np.arange(1 << self.n), 0, self.ancillas)
        u = self.unitary
        sub = u[idx][:, idx]
        return sub.toarray() if sp.issparse(sub) else np.asarray(sub)


@dataclass(frozen=True)
class ChebyshevPolynomial:
    """Polynomial in the Chebyshev basis with a declared parity.

    Evaluation enforces parity exactly: even polynomials are evaluated at |x|
    and odd ones as sign(x) p(|x|).
    """

    coeffs: np.ndarray
    parity: str
    target: str
    certified_error: float
    domain: tuple[tuple[float, float], ...] = ((-1.0, 1.0),)
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.parity not in ("even", "odd", "none"):
            raise ValueError(f"parity must be even, odd or none, got {self.parity!r}")
        cf = np.asarray(self.coeffs, dtype=float).copy()
        if self.parity == "even":
            cf[1::2] = 0.0
        elif self.parity == "odd":
            cf[0::2] = 0.0
        cf.setflags(write=False)
        object.__setattr__(self, "coeffs", cf)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.parity == "even":
            return C.chebval(np.abs(x), self.coeffs)
        if self.parity == "odd":
            return np.sign(x) * C.chebval(np.abs(x), self.coeffs)
        return C.chebval(x, self.coeffs)

    def sup_norm(self, points: int = 10_001) -> float:
        grid = np.linspace(-1.0, 1.0, points)
        return float(np.max(np.abs(self(grid))))


class QueryLedger:
    """Monotone oracle-call counters for one run."""

    KEYS = ("U_Theta", "U_Omega", "U_Sigma", "block_encoding", "extra_gates")

    def __init__(self) -> None:
        self._counts: Counter[str] = Counter({key: 0 for key in self.KEYS})
        self._oracle: Counter[int] = Counter()

    def add(self, key: str, count: int = 1) -> None:
        if count < 0:
            raise ValueError("ledger counters never decrease")
        if key not in self.KEYS:
            raise KeyError(f"unknown ledger counter {key!r}")
        self._counts[key] += int(count)

    def add_membership(self, p: int, count: int = 1) -> None:
        if count < 0:
            raise ValueError("ledger counters never decrease")
        self._oracle[int(p)] += int(count)

    def add_cost(self, cost: dict[str, int], times: int = 1) -> None:
        for key, val in cost.items():
            if key.startswith("O_m"):
                self.add_membership(int(key[3:]), val * times)
            else:
                self.add(key, val * times)

    def __getitem__(self, key: str) -> int:
        return self._counts[key]

    def membership_calls(self, p: int | None = None) -> int:
        if p is None:
            return sum(self._oracle.values())
        return self._oracle[p]

    def to_dict(self) -> dict:
        out: dict[str, Any] = {key: self._counts[key] for key in self.KEYS}
        out["O_m"] = {str(p): self._oracle[p] for p in sorted(self._oracle)}
        return out
