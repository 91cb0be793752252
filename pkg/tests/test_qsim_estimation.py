"""Amplitude estimation oracle modes and the sampled outcome distribution."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skmlab.qsim.estimation import (
    MAX_EXACT_DEPTH,
    ae_depth,
    ae_outcome_distribution,
    ae_repetitions,
    amplitude_estimate,
)


def test_ideal_returns_input():
    p_hat, queries = amplitude_estimate(0.5, 0.01, 0.05, "ideal")
    assert p_hat == 0.5
    assert queries == ae_repetitions(0.05) * ae_depth(0.01)


def test_adversarial_clipping():
    assert amplitude_estimate(0.9, 0.2, 0.1, "adversarial_plus")[0] == 1.0
    assert amplitude_estimate(0.1, 0.2, 0.1, "adversarial_minus")[0] == 0.0
    assert amplitude_estimate(0.5, 0.2, 0.1, "adversarial_minus")[0] == pytest.approx(0.3)


def test_queries_scale_like_log_over_eps():
    q1 = amplitude_estimate(0.3, 0.02, 0.05, "ideal")[1]
    q2 = amplitude_estimate(0.3, 0.01, 0.05, "ideal")[1]
    q3 = amplitude_estimate(0.3, 0.01, 0.05**2, "ideal")[1]
    assert 1.8 <= q2 / q1 <= 2.2
    assert 1.8 <= q3 / q2 <= 2.2


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.02, 1e-3, 1e-5])
def test_depth_is_minimal(eps):
    m = ae_depth(eps)
    assert math.pi / m + math.pi**2 / m**2 <= eps
    if m > 1:
        assert math.pi / (m - 1) + math.pi**2 / (m - 1) ** 2 > eps


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(1, 300))
def test_distribution_normalized(p, depth):
    y, prob = ae_outcome_distribution(p, depth)
    assert prob.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(prob >= 0) and y.size == depth


def test_windowed_distribution_keeps_the_peaks():
    depth = 4 * MAX_EXACT_DEPTH
    y, prob = ae_outcome_distribution(0.3, depth)
    assert y.size < depth and prob.sum() == pytest.approx(1.0)
    best = y[np.argmax(prob)]
    assert abs(math.sin(math.pi * best / depth) ** 2 - 0.3) <= 1e-4


def test_sampled_is_seeded():
    a = amplitude_estimate(0.37, 0.05, 0.1, "sampled", 5)
    b = amplitude_estimate(0.37, 0.05, 0.1, "sampled", 5)
    assert a == b


def test_sampled_failure_rate():
    eps, delta = 0.05, 0.1
    rng = np.random.default_rng(2024)
    ps = rng.uniform(0, 1, 300)
    fails = sum(abs(amplitude_estimate(p, eps, delta, "sampled", i)[0] - p) > eps for i, p in enumerate(ps))
    assert fails / ps.size <= delta


def test_sampled_small_eps_uses_window():
    p_hat, _ = amplitude_estimate(0.61, 1e-5, 0.2, "sampled", 1)
    assert abs(p_hat - 0.61) <= 1e-5


@pytest.mark.parametrize(
    "args",
    [(1.5, 0.1, 0.1, "ideal"), (0.5, 0.0, 0.1, "ideal"), (0.5, 0.1, 1.0, "ideal"), (0.5, 0.1, 0.1, "magic")],
)
def test_argument_checks(args):
    with pytest.raises(ValueError):
        amplitude_estimate(*args)
