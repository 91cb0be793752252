"""Shared builders and hypothesis strategies."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from skmlab.complex import SimplicialComplex, build_clique_complex, gen_random_graph


def random_complex(rng: np.random.Generator, n_min: int = 3, n_max: int = 7, max_dim: int = 3) -> SimplicialComplex:
    n = int(rng.integers(n_min, n_max + 1))
    p = float(rng.uniform(0.3, 1.0))
    return build_clique_complex(gen_random_graph(n, p, rng), max_dim)


@st.composite
def clique_complexes(draw, n_min: int = 2, n_max: int = 7, max_dim: int = 3) -> SimplicialComplex:
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.floats(0.2, 1.0))
    return build_clique_complex(gen_random_graph(n, p, seed), max_dim)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20261014)
