"""Amplitude estimation by phase estimation on the Grover iterate."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["amplitude_estimate", "ae_depth", "ae_repetitions", "ae_outcome_distribution"]

MODES = ("ideal", "sampled", "adversarial_plus", "adversarial_minus")
MAX_EXACT_DEPTH = 1 << 16
WINDOW = 4096


def ae_depth(eps: float) -> int:
    """Smallest M with pi/M + pi**2/M**2 <= eps.

    That is the worst-case error |a~ - a| of a single run whose phase lands
    within one grid step of the true phase, uniformly in a.
    """
    u = (-1.0 + math.sqrt(1.0 + 4.0 * eps)) / 2.0
    return max(1, math.ceil(math.pi / u))


def ae_repetitions(delta: float) -> int:
    """Median of this many runs fails with probability <= delta (success 8/pi^2 each)."""
    return max(1, math.ceil(18.0 * math.log(1.0 / delta)))


def _fejer(delta: np.ndarray, depth: int) -> np.ndarray:
    s = np.sin(math.pi * delta)
    num = np.sin(depth * math.pi * delta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / (depth**2 * s**2)
    return np.where(np.abs(s) < 1e-15, 1.0, out)


def ae_outcome_distribution(p: float, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Outcomes y and their probabilities for one phase-estimation run.

    For large depth only a window around the two peaks is kept and the
    result renormalized; the dropped mass is below 1e-3 for WINDOW = 4096.
    """
    theta = math.asin(math.sqrt(min(1.0, max(0.0, p))))
    if depth <= MAX_EXACT_DEPTH:
        y = np.arange(depth)
    else:
        centres = [theta / math.pi * depth, (1.0 - theta / math.pi) * depth]
        parts = [np.arange(int(cc) - WINDOW, int(cc) + WINDOW + 1) % depth for cc in centres]
        y = np.unique(np.concatenate(parts))
    frac = y / depth
    prob = 0.5 * (_fejer(frac - theta / math.pi, depth) + _fejer(frac + theta / math.pi, depth))
    return y, prob / prob.sum()


def amplitude_estimate(
    p_true: float,
    eps: float,
    delta: float,
    mode: str = "sampled",
    seed: int | np.random.Generator | np.random.SeedSequence = 0,
) -> tuple[float, int]:
    """Estimate p_true to additive ``eps`` with failure probability ``delta``.

    Returns (p_hat, queries).  ``ideal`` returns p_true, ``sampled`` takes the
    median of phase-estimation outcomes, and the adversarial modes return
    p_true +- eps clipped to [0, 1].  Queries = repetitions * depth in every
    mode.
    """
    if not (0.0 <= p_true <= 1.0 + 1e-12):
        raise ValueError(f"p must lie in [0, 1], got {p_true}")
    if not (0 < eps < 1):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not (0 < delta < 1):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    p = min(1.0, float(p_true))
    depth = ae_depth(eps)
    reps = ae_repetitions(delta)
    if mode == "ideal":
        est = p
    elif mode == "adversarial_plus":
        est = min(1.0, p + eps)
    elif mode == "adversarial_minus":
        est = max(0.0, p - eps)
    else:
        rng = np.random.default_rng(seed)
        y, prob = ae_outcome_distribution(p, depth)
        draws = rng.choice(y, size=reps, p=prob)
        est = float(np.median(np.sin(math.pi * draws / depth) ** 2))
    return float(est), reps * depth
