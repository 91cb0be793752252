"""Simplicial Kuramoto dynamics, projections and node-aggregated frequencies."""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .complex import SimplicialComplex, boundary_matrix

__all__ = [
    "SimplicialField",
    "ProjectedField",
    "AggregationFunction",
    "wrap_phase",
    "skm_rhs",
    "node_kuramoto_rhs",
    "integrate",
    "project_field",
    "projected_rhs",
    "projected_laplacian",
    "aggregate_node_frequencies",
    "mean_aggregation",
    "sum_aggregation",
    "product_aggregation",
    "affine_aggregation",
    "load_field",
    "save_field",
    "write_trajectory_csv",
]

LOWER = "lower"
UPPER = "upper"


def wrap_phase(x: np.ndarray) -> np.ndarray:
    """Reduce phases to [-pi, pi)."""
    return (np.asarray(x, dtype=float) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class SimplicialField:
    """Real vector indexed by the k-simplices of a complex."""

    k: int
    values: np.ndarray
    role: str = "phase"

    def __post_init__(self) -> None:
        if self.role not in ("phase", "frequency"):
            raise ValueError(f"role must be 'phase' or 'frequency', got {self.role!r}")
        vals = np.array(self.values, dtype=float).reshape(-1)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __len__(self) -> int:
        return self.values.size

    def check(self, c: SimplicialComplex) -> None:
        if len(self) != c.n_simplices(self.k):
            raise ValueError(
                f"field has {len(self)} entries but the complex has "
                f"{c.n_simplices(self.k)} simplices of dimension {self.k}"
            )

    def wrapped(self) -> SimplicialField:
        return SimplicialField(self.k, wrap_phase(self.values), self.role)


@dataclass(frozen=True)
class ProjectedField:
    """B_k x (lower, on (k-1)-simplices) or B_{k+1}^T x (upper, on (k+1)-simplices)."""

    k: int
    direction: str
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.direction not in (LOWER, UPPER):
            raise ValueError(f"direction must be 'lower' or 'upper', got {self.direction!r}")
        vals = np.array(self.values, dtype=float).reshape(-1)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def level(self) -> int:
        return self.k - 1 if self.direction == LOWER else self.k + 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _lower_b(c: SimplicialComplex, k: int):
    return boundary_matrix(c, k).to_sparse(np.float64)


def _upper_b(c: SimplicialComplex, k: int):
    if k + 1 > c.max_dim + 1:
        return sp.csc_matrix((c.n_simplices(k), 0))
    return boundary_matrix(c, k + 1).to_sparse(np.float64)


def _skm_operator(
    c: SimplicialComplex, k: int, omega: np.ndarray, K_lower: float, K_upper: float
) -> Callable[[np.ndarray], np.ndarray]:
    lower = _lower_b(c, k) if k >= 1 and K_lower != 0.0 else None
    upper = _upper_b(c, k) if K_upper != 0.0 else None
    if upper is not None and upper.shape[1] == 0:
        upper = None
    lower_t = lower.T.tocsr() if lower is not None else None
    upper_t = upper.T.tocsr() if upper is not None else None

    def rhs(x: np.ndarray) -> np.ndarray:
        out = omega.copy()
        if lower is not None:
            out -= K_lower * (lower_t @ np.sin(lower @ x))
        if upper is not None:
            out -= K_upper * (upper @ np.sin(upper_t @ x))
        return out

    return rhs


def skm_rhs(
    theta: SimplicialField,
    omega: SimplicialField,
    K_lower: float,
    K_upper: float,
    c: SimplicialComplex,
) -> np.ndarray:
    """omega - K_lower B_k^T sin(B_k theta) - K_upper B_{k+1} sin(B_{k+1}^T theta).

    For k = 0 the lower term does not exist and ``K_lower`` is ignored.
    """
    if theta.k != omega.k:
        raise ValueError(f"phase is a {theta.k}-field but frequency is a {omega.k}-field")
    theta.check(c)
    omega.check(c)
    return _skm_operator(c, theta.k, omega.values, K_lower, K_upper)(theta.values)


def node_kuramoto_rhs(
    theta: np.ndarray,
    omega: np.ndarray,
    K: float,
    adjacency: np.ndarray,
    convention: str = "reversed",
) -> np.ndarray:
    """Node Kuramoto right-hand side from an adjacency matrix.

    ``convention="reversed"`` evaluates omega_i - K sum_j A_ij sin(theta_j - theta_i);
    ``convention="standard"`` evaluates omega_i + K sum_j A_ij sin(theta_j - theta_i).
    """
    theta = np.asarray(theta, dtype=float)
    diff = theta[None, :] - theta[:, None]
    coupling = (np.asarray(adjacency, dtype=float) * np.sin(diff)).sum(axis=1)
    if convention == "reversed":
        return np.asarray(omega, dtype=float) - K * coupling
    if convention == "standard":
        return np.asarray(omega, dtype=float) + K * coupling
    raise ValueError(f"convention must be 'reversed' or 'standard', got {convention!r}")


def integrate(
    theta0: SimplicialField,
    omega: SimplicialField,
    K_lower: float,
    K_upper: float,
    dt: float,
    steps: int,
    record_every: int,
    c: SimplicialComplex,
) -> tuple[np.ndarray, list[SimplicialField]]:
    """Fixed-step RK4; returns record times and wrapped phase snapshots."""
    if not (dt > 0 and math.isfinite(dt)):
        raise ValueError(f"dt must be positive and finite, got {dt}")
    if steps < 0 or record_every < 1:
        raise ValueError("steps must be >= 0 and record_every >= 1")
    if not math.isfinite(dt * steps):
        raise ValueError("dt * steps is not finite")
    if theta0.k != omega.k:
        raise ValueError(f"phase is a {theta0.k}-field but frequency is a {omega.k}-field")
    theta0.check(c)
    omega.check(c)
    k = theta0.k
    f = _skm_operator(c, k, omega.values, K_lower, K_upper)

    x = theta0.values.copy()
    times = [0.0]
    snaps = [SimplicialField(k, wrap_phase(x))]
    for step in range(1, steps + 1):
        # divergence is detected below, so overflow is not warned about twice
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = f(x)
            k2 = f(x + 0.5 * dt * k1)
            k3 = f(x + 0.5 * dt * k2)
            k4 = f(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError(f"state diverged at step {step} (t={step * dt:g})")
        if step % record_every == 0:
            times.append(step * dt)
            snaps.append(SimplicialField(k, wrap_phase(x)))
    return np.asarray(times), snaps


def project_field(x: SimplicialField, direction: str, c: SimplicialComplex) -> ProjectedField:
    """Lower projection B_k x or upper projection B_{k+1}^T x."""
    x.check(c)
    if direction == LOWER:
        if x.k < 1:
            raise ValueError("lower projection needs k >= 1")
        return ProjectedField(x.k, LOWER, _lower_b(c, x.k) @ x.values)
    if direction == UPPER:
        return ProjectedField(x.k, UPPER, _upper_b(c, x.k).T @ x.values)
    raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")


def projected_laplacian(c: SimplicialComplex, k: int, direction: str):
    """B_k B_k^T for the lower branch, B_{k+1}^T B_{k+1} for the upper branch."""
    if direction == LOWER:
        b = _lower_b(c, k)
        return (b @ b.T).tocsr()
    if direction == UPPER:
        b = _upper_b(c, k)
        return (b.T @ b).tocsr()
    raise ValueError(f"direction must be 'lower' or 'upper', got {direction!r}")


def projected_rhs(
    x: ProjectedField, omega_proj: ProjectedField, K: float, c: SimplicialComplex
) -> np.ndarray:
    """omega_proj - K L sin(x) with L the Laplacian on the projected level."""
    if x.direction != omega_proj.direction or x.k != omega_proj.k:
        raise ValueError("projected phase and frequency must share k and direction")
    if x.values.size != omega_proj.values.size:
        raise ValueError(
            f"length mismatch: {x.values.size} phases vs {omega_proj.values.size} frequencies"
        )
    lap = projected_laplacian(c, x.k, x.direction)
    if lap.shape[0] != x.values.size:
        raise ValueError(f"projected field has length {x.values.size}, expected {lap.shape[0]}")
    return omega_proj.values - K * (lap @ np.sin(x.values))


@dataclass(frozen=True)
class AggregationFunction:
    """Node-to-simplex aggregation with declared bound and Lipschitz constant.

    ``lipschitz`` is the sum over arguments of sup |df/dx_t| on the input box
    ``[-box, box]**arity``.  ``m`` is the node-data bit width and ``m_prime``
    the arithmetic bit width (defaults to m - ceil(log2 L_f)).
    """

    arity: int
    func: Callable[[np.ndarray], np.ndarray]
    bound: float
    lipschitz: float
    box: float = 1.0
    m: int = 53
    m_prime: int | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")
        if not self.bound > 0:
            raise ValueError(f"bound must be positive, got {self.bound}")
        if self.lipschitz < 0:
            raise ValueError(f"Lipschitz constant must be non-negative, got {self.lipschitz}")
        cap = self.m - self.lipschitz_bits
        if self.m_prime is None:
            object.__setattr__(self, "m_prime", cap)
        elif self.m_prime > cap:
            raise ValueError(f"m_prime={self.m_prime} exceeds m - ceil(log2 L_f) = {cap}")

    @property
    def lipschitz_bits(self) -> int:
        if self.lipschitz <= 1.0:
            return 0
        return math.ceil(math.log2(self.lipschitz))

    def with_bits(self, m: int, m_prime: int | None = None) -> AggregationFunction:
        return AggregationFunction(
            self.arity, self.func, self.bound, self.lipschitz, self.box, m, m_prime,
            self.name, dict(self.params),
        )

    def __call__(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if rows.shape[1] != self.arity:
            raise ValueError(f"aggregation expects {self.arity} arguments, got {rows.shape[1]}")
        return np.asarray(self.func(rows), dtype=float).reshape(-1)


def mean_aggregation(arity: int, box: float = 1.0, m: int = 53) -> AggregationFunction:
    return AggregationFunction(arity, lambda r: r.mean(axis=1), box, 1.0, box, m, name="mean")


def sum_aggregation(arity: int, box: float = 1.0, m: int = 53) -> AggregationFunction:
    return AggregationFunction(
        arity, lambda r: r.sum(axis=1), arity * box, float(arity), box, m, name="sum"
    )


def product_aggregation(arity: int, box: float = 1.0, m: int = 53) -> AggregationFunction:
    return AggregationFunction(
        arity,
        lambda r: r.prod(axis=1),
        box**arity,
        arity * box ** (arity - 1),
        box,
        m,
        name="product",
    )


def affine_aggregation(
    weights: Sequence[float], offset: float = 0.0, box: float = 1.0, m: int = 53
) -> AggregationFunction:
    w = np.asarray(weights, dtype=float)
    total = float(np.abs(w).sum())
    bound = total * box + abs(offset)
    return AggregationFunction(
        w.size,
        lambda r: r @ w + offset,
        bound if bound > 0 else 1.0,
        total,
        box,
        m,
        name="affine",
        params={"weights": w.tolist(), "offset": offset},
    )


def simplex_node_values(node_omega: np.ndarray, c: SimplicialComplex, k: int) -> np.ndarray:
    """Rows of node values for every k-simplex, in increasing vertex order."""
    node_omega = np.asarray(node_omega, dtype=float).reshape(-1)
    if node_omega.size != c.n:
        raise ValueError(f"expected {c.n} node values, got {node_omega.size}")
    simplices = c.simplices[k] if 0 <= k <= c.max_dim else ()
    if not simplices:
        return np.zeros((0, k + 1))
    return node_omega[np.asarray(simplices, dtype=np.int64)]


def aggregate_node_frequencies(
    f: AggregationFunction, node_omega: np.ndarray, c: SimplicialComplex, k: int
) -> SimplicialField:
    """Simplicial frequency whose i-th entry is f over the vertices of sigma_k^i."""
    if f.arity != k + 1:
        raise ValueError(f"aggregation arity {f.arity} does not match k+1 = {k + 1}")
    rows = simplex_node_values(node_omega, c, k)
    vals = f(rows) if rows.shape[0] else np.zeros(0)
    return SimplicialField(k, vals, "frequency")


def load_field(path: str | Path, role: str = "phase") -> SimplicialField:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "k" not in data or "values" not in data:
        raise ValueError("field file needs 'k' and 'values'")
    return SimplicialField(int(data["k"]), np.asarray(data["values"], dtype=float), data.get("role", role))


def save_field(x: SimplicialField, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"k": x.k, "values": [float(v) for v in x.values], "role": x.role}, fh)
        fh.write("\n")


def write_trajectory_csv(path: str | Path, times: np.ndarray, snaps: Sequence[SimplicialField]) -> None:
    width = len(snaps[0]) if snaps else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"theta_{i}" for i in range(width)])
        for t, s in zip(times, snaps):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in s.values])
