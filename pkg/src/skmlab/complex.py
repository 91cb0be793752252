"""Clique complexes, boundary matrices and Hodge Laplacians.

Simplices are strictly increasing vertex tuples, stored per dimension in
lexicographic order.  Orientation is the canonical one induced by that order,
so deleting the j-th vertex of a simplex contributes the sign (-1)**j.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Graph",
    "SimplicialComplex",
    "BoundaryMatrix",
    "build_clique_complex",
    "gen_multipartite_graph",
    "gen_random_graph",
    "complete_graph",
    "path_graph",
    "boundary_matrix",
    "hodge_laplacian",
    "membership",
    "simplex_to_index",
    "index_to_simplex",
    "load_complex",
    "save_complex",
    "complex_from_dict",
    "complex_to_dict",
]

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        clean = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} has a vertex outside [0, {self.n})")
            clean.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        pairs = [tuple(int(v) for v in e) for e in edges]
        for e in pairs:
            if len(e) != 2:
                raise ValueError(f"edge {e} must have two endpoints")
        normalized = [(min(e), max(e)) for e in pairs]
        if len(set(normalized)) != len(normalized):
            raise ValueError("duplicate edges")
        return cls(n, frozenset(normalized))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_non_edges(self) -> int:
        return self.n * (self.n - 1) // 2 - len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1.0
        return a

    def neighbors(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            nb[i].add(j)
            nb[j].add(i)
        return nb


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(n), 2)))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def gen_multipartite_graph(m: int, k: int) -> Graph:
    """Complete (k+1)-partite graph with ``m`` vertices per part.

    Part ``p`` holds vertices ``p*m .. p*m + m - 1``.
    """
    if m < 1 or k < 0:
        raise ValueError(f"need m >= 1 and k >= 0, got m={m}, k={k}")
    n = m * (k + 1)
    part = [v // m for v in range(n)]
    edges = frozenset(
        (i, j) for i, j in combinations(range(n), 2) if part[i] != part[j]
    )
    return Graph(n, edges)


def gen_random_graph(n: int, edge_prob: float, seed: int | np.random.Generator) -> Graph:
    """Erdos-Renyi graph G(n, edge_prob); deterministic for a fixed seed."""
    if n < 0:
        raise ValueError(f"vertex count must be non-negative, got {n}")
    if not (0.0 <= edge_prob <= 1.0) or math.isnan(edge_prob):
        raise ValueError(f"edge probability must lie in [0, 1], got {edge_prob}")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    draws = rng.random(len(pairs))
    return Graph(n, frozenset(e for e, u in zip(pairs, draws) if u < edge_prob))


@dataclass(frozen=True)
class SimplicialComplex:
    """Simplicial complex stored densely per dimension.

    ``simplices[k]`` is the lexicographically sorted tuple of k-simplices and
    ``index[k]`` maps each of them back to its position.
    """

    n: int
    simplices: tuple[tuple[Simplex, ...], ...]
    index: tuple[Mapping[Simplex, int], ...] = field(repr=False, compare=False)

    @classmethod
    def from_simplices(
        cls, n: int, by_dim: Sequence[Iterable[Sequence[int]]], *, check: bool = True
    ) -> SimplicialComplex:
        dims: list[tuple[Simplex, ...]] = []
        for k, group in enumerate(by_dim):
            items = sorted({tuple(int(v) for v in s) for s in group})
            for s in items:
                if len(s) != k + 1:
                    raise ValueError(f"simplex {s} listed in dimension {k}")
                if any(b <= a for a, b in zip(s, s[1:])):
                    raise ValueError(f"simplex {s} is not strictly increasing")
                if s and not (0 <= s[0] and s[-1] < n):
                    raise ValueError(f"simplex {s} has a vertex outside [0, {n})")
            dims.append(tuple(items))
        if not dims:
            dims = [tuple((v,) for v in range(n))]
        while len(dims) > 1 and not dims[-1]:
            dims.pop()
        index = tuple({s: i for i, s in enumerate(group)} for group in dims)
        out = cls(n, tuple(dims), index)
        if check:
            out.check_closure()
        return out

    @property
    def max_dim(self) -> int:
        return len(self.simplices) - 1

    def n_simplices(self, k: int) -> int:
        """n_k; zero for dimensions that are not stored (including k < 0)."""
        if 0 <= k < len(self.simplices):
            return len(self.simplices[k])
        return 0

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.simplices)

    def check_closure(self) -> None:
        for k in range(1, len(self.simplices)):
            lower = self.index[k - 1]
            for s in self.simplices[k]:
                for j in range(k + 1):
                    face = s[:j] + s[j + 1 :]
                    if face not in lower:
                        raise ValueError(f"face {face} of simplex {s} is missing")

    def graph(self) -> Graph:
        edges = self.simplices[1] if self.max_dim >= 1 else ()
        return Graph(self.n, frozenset(edges))


def _cliques(g: Graph, max_dim: int) -> list[list[Simplex]]:
    nb = g.neighbors()
    out: list[list[Simplex]] = [[(v,) for v in range(g.n)]]
    frontier = out[0]
    for _ in range(max_dim):
        nxt = [
            s + (w,)
            for s in frontier
            for w in range(s[-1] + 1, g.n)
            if all(w in nb[v] for v in s)
        ]
        if not nxt:
            break
        out.append(nxt)
        frontier = nxt
    return out


def build_clique_complex(g: Graph, max_dim: int) -> SimplicialComplex:
    """Clique complex of ``g`` truncated at dimension ``max_dim``."""
    if max_dim < 0:
        raise ValueError(f"max_dim must be non-negative, got {max_dim}")
    # extension in increasing vertex order keeps every level lexicographic
    return SimplicialComplex.from_simplices(g.n, _cliques(g, max_dim), check=False)


@dataclass(frozen=True)
class BoundaryMatrix:
    """Signed incidence of k-simplices onto (k-1)-faces, column-major triplets."""

    k: int
    rows: int
    cols: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    signs: np.ndarray

    def to_sparse(self, dtype=np.int64) -> sp.csc_matrix:
        return sp.csc_matrix(
            (self.signs.astype(dtype), (self.row_idx, self.col_idx)),
            shape=(self.rows, self.cols),
        )

    def to_dense(self, dtype=np.int64) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=dtype)
        out[self.row_idx, self.col_idx] = self.signs
        return out

    @property
    def T(self) -> sp.csr_matrix:
        return self.to_sparse().T.tocsr()


def boundary_matrix(c: SimplicialComplex, k: int) -> BoundaryMatrix:
    """B_k with sign (-1)**j for the face that drops the j-th vertex.

    Dimensions above the stored top dimension give an empty map (n_k = 0).
    """
    if k < 1:
        raise ValueError(f"boundary dimension must be >= 1, got {k}")
    if k > c.max_dim + 1:
        raise ValueError(f"dimension {k} exceeds stored dimension {c.max_dim}")
    upper = c.simplices[k] if k <= c.max_dim else ()
    lower = c.index[k - 1]
    rows, cols, signs = [], [], []
    for col, s in enumerate(upper):
        for j in range(k + 1):
            rows.append(lower[s[:j] + s[j + 1 :]])
            cols.append(col)
            signs.append(-1 if j % 2 else 1)
    return BoundaryMatrix(
        k,
        len(c.simplices[k - 1]),
        len(upper),
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(signs, dtype=np.int64),
    )


def hodge_laplacian(c: SimplicialComplex, level: int, kind: str) -> sp.csr_matrix:
    """Hodge Laplacian acting on ``level``-simplices.

    ``kind="up"`` gives B_{l+1} B_{l+1}^T and ``kind="down"`` gives
    B_l^T B_l, with l = ``level``.
    """
    if kind == "up":
        b = boundary_matrix(c, level + 1).to_sparse(np.float64)
        return (b @ b.T).tocsr()
    if kind == "down":
        b = boundary_matrix(c, level).to_sparse(np.float64)
        return (b.T @ b).tocsr()
    raise ValueError(f"kind must be 'up' or 'down', got {kind!r}")


def simplex_to_index(s: Iterable[int], n: int) -> int:
    """Basis index of a simplex; vertex 0 is the most significant bit."""
    return sum(1 << (n - 1 - v) for v in s)


def index_to_simplex(idx: int, n: int) -> Simplex:
    return tuple(v for v in range(n) if (idx >> (n - 1 - v)) & 1)


def membership(c: SimplicialComplex, bits: str | Sequence[int], k: int) -> bool:
    """True iff ``bits`` has weight k+1 and its support is a stored k-simplex."""
    vals = [int(b) for b in bits]
    if len(vals) != c.n:
        raise ValueError(f"bit string has length {len(vals)}, expected {c.n}")
    support = tuple(v for v, b in enumerate(vals) if b)
    if len(support) != k + 1 or not (0 <= k <= c.max_dim):
        return False
    return support in c.index[k]


def complex_to_dict(c: SimplicialComplex) -> dict:
    return {
        "n": c.n,
        "simplices": {str(k): [list(s) for s in g] for k, g in enumerate(c.simplices)},
    }


def complex_from_dict(data: Mapping) -> SimplicialComplex:
    if "n" not in data:
        raise ValueError("complex description needs an 'n' field")
    n = int(data["n"])
    if "simplices" in data:
        raw = data["simplices"]
        top = max((int(k) for k in raw), default=0)
        by_dim = [raw.get(str(k), raw.get(k, [])) for k in range(top + 1)]
        if not by_dim[0]:
            by_dim[0] = [[v] for v in range(n)]
        return SimplicialComplex.from_simplices(n, by_dim, check=True)
    if "edges" in data:
        g = Graph.from_edges(n, data["edges"])
        return build_clique_complex(g, int(data.get("max_dim", 2)))
    raise ValueError("complex description needs 'edges' or 'simplices'")


def load_complex(path: str | Path) -> SimplicialComplex:
    with open(path, encoding="utf-8") as fh:
        return complex_from_dict(json.load(fh))


def save_complex(c: SimplicialComplex, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(complex_to_dict(c), fh, indent=2)
        fh.write("\n")
