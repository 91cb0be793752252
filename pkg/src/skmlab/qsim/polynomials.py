"""Chebyshev approximations used by the QSVT steps."""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import chebyshev as C

from .types import ChebyshevPolynomial

__all__ = [
    "bessel_j_sequence",
    "cheb_cos",
    "cheb_pseudo_inverse",
    "cos_degree_estimate",
    "pinv_degree_estimate",
    "pinv_exponent",
]

GRID_POINTS = 10_001
_BIG = 1e250
_TINY = 1e-30
_LOG2 = math.log(2.0)


def bessel_j_sequence(x: float, nmax: int) -> np.ndarray:
    """J_0(x) .. J_nmax(x) by Miller's backward recurrence.

    Normalized with J_0 + 2 sum_j J_2j = 1; valid for x >= 0.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    out = np.zeros(nmax + 1)
    if x == 0:
        out[0] = 1.0
        return out
    if x < _TINY:
        # leading series term; relative error O(x**2)
        nu = np.arange(nmax + 1)
        with np.errstate(under="ignore"):
            return np.exp(nu * (math.log(x) - _LOG2) - np.array([math.lgamma(v + 1) for v in nu]))
    top = max(nmax, int(x))
    start = 2 * ((top + 16 + int(math.sqrt(40.0 * top + 40.0))) // 2)
    vals = np.zeros(start + 2)
    vals[start] = 1e-300
    for nu in range(start, 0, -1):
        vals[nu - 1] = (2.0 * nu / x) * vals[nu] - vals[nu + 1]
        if abs(vals[nu - 1]) > _BIG:
            vals[nu - 1 :] *= 1.0 / _BIG
    norm = vals[0] + 2.0 * vals[2 : start + 1 : 2].sum()
    return vals[: nmax + 1] / norm


def cos_degree_estimate(gamma: float, eps: float) -> float:
    """gamma + L / log(e + L / gamma), L = log(1/eps)."""
    big_l = math.log(1.0 / eps)
    if gamma == 0:
        return 0.0
    return gamma + big_l / math.log(math.e + big_l / gamma)


def _bessel_tail_bound(x: float, nu: int) -> float:
    # |J_nu(x)| <= (x/2)**nu / nu!; the series beyond nu is geometric once nu > x
    log_term = nu * (math.log(x) - _LOG2) - math.lgamma(nu + 1) if x > 0 else -math.inf
    ratio = (x / 2.0) ** 2 / ((nu + 1) * (nu + 2))
    return 2.0 * math.exp(log_term) / max(1e-300, 1.0 - ratio) if ratio < 1 else math.inf


def cheb_cos(gamma: float, eps: float) -> ChebyshevPolynomial:
    """Even Chebyshev approximation of cos(gamma x) on [-1, 1].

    Jacobi-Anger: cos(gamma x) = J_0 + 2 sum_j (-1)**j J_2j(gamma) T_2j(x),
    truncated once the coefficient tail is below eps/2, then divided by
    1 + tail so that |q| <= 1 on [-1, 1]; the total error is at most eps.
    """
    if not (0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    if not (gamma >= 0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be finite and non-negative, got {gamma}")
    if gamma == 0:
        return ChebyshevPolynomial(np.array([1.0]), "even", "cos", 0.0, meta={"gamma": 0.0})
    nmax = 2 * (int(gamma) + 40 + int(4 * math.log(1.0 / eps)))
    while _bessel_tail_bound(gamma, nmax + 2) > 1e-18:
        nmax *= 2
    jv = bessel_j_sequence(gamma, nmax)
    coeffs = np.zeros(nmax + 1)
    coeffs[0] = jv[0]
    j = np.arange(2, nmax + 1, 2)
    coeffs[j] = 2.0 * np.where((j // 2) % 2 == 0, 1.0, -1.0) * jv[j]
    far = _bessel_tail_bound(gamma, nmax + 2)
    # tails[d] = sum of |c_i| for even i > d
    mags = np.abs(coeffs[::2])
    rev = np.cumsum(mags[::-1])[::-1]
    tails = np.append(rev[1:], 0.0) + far
    deg = None
    for idx, t in enumerate(tails):
        if t <= eps / 2:
            deg = 2 * idx
            break
    if deg is None:
        raise RuntimeError("Jacobi-Anger series did not reach the requested accuracy")
    cf = coeffs[: deg + 1].copy()
    tail = float(tails[deg // 2])
    # |q| <= |cos| + tail, so dividing by 1 + tail bounds q by 1 everywhere
    scale = 1.0 + tail
    cf /= scale
    bound = 2.0 * tail / scale
    return ChebyshevPolynomial(
        cf, "even", "cos", bound, meta={"gamma": gamma, "eps": eps, "rescale": scale}
    )


def pinv_exponent(kappa: float, eps: float) -> int:
    """Smallest b with kappa**2 (1 - 1/kappa**2)**b <= eps."""
    if kappa <= 1:
        return 1
    b = math.log(eps / kappa**2) / math.log1p(-1.0 / kappa**2)
    return max(1, math.ceil(b - 1e-12))


def pinv_degree_estimate(kappa: float, eps: float, n: int = 1) -> float:
    """kappa**2 log(sqrt(n) kappa / eps)."""
    return kappa**2 * math.log(math.sqrt(n) * kappa / eps)


def cheb_pseudo_inverse(kappa: float, eps: float) -> ChebyshevPolynomial:
    """Odd p(x) = x g(x**2) with g(y) = (1 - (1-y)**b) / (2 kappa**2 y).

    g is a polynomial of degree b - 1 and |1/(2 kappa**2 y) - g(y)| =
    (1-y)**b / (2 kappa**2 y) <= eps / (2 kappa**2) on [1/kappa**2, 1] by the
    choice of b.  The Chebyshev coefficients of p are recovered by
    interpolation, which is exact up to rounding.
    """
    if not kappa > 1:
        raise ValueError(f"kappa must exceed 1, got {kappa}")
    if not (0 < eps < 0.5):
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    b = pinv_exponent(kappa, eps)
    k2 = kappa**2

    def p_exact(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = -np.expm1(b * np.log1p(-(s * s))) / (2.0 * k2 * s)
        return np.where(s == 0, 0.0, val)

    deg = 2 * b - 1
    cf = C.chebinterpolate(p_exact, deg)
    cf[0::2] = 0.0
    poly = ChebyshevPolynomial(cf, "odd", "pseudo_inverse", 0.0)
    grid = np.linspace(-1.0, 1.0, GRID_POINTS)
    peak = float(np.max(np.abs(poly(grid))))
    if peak > 1 + 1e-9:
        raise RuntimeError(f"pseudo-inverse polynomial reaches {peak:g} > 1")
    y = np.linspace(1.0 / k2, 1.0, GRID_POINTS)
    err = float(np.max(np.abs(1.0 / (2 * k2 * y) - poly(np.sqrt(y)) / np.sqrt(y))))
    return ChebyshevPolynomial(
        cf, "odd", "pseudo_inverse", err,
        domain=((-1.0, -1.0 / k2), (1.0 / k2, 1.0)),
        meta={"kappa": kappa, "eps": eps, "b": b, "sup_norm": peak},
    )


def g_of(poly: ChebyshevPolynomial, y: np.ndarray) -> np.ndarray:
    """g(y) = p(sqrt|y|) / sqrt|y| with odd extension, for y != 0."""
    y = np.asarray(y, dtype=float)
    r = np.sqrt(np.abs(y))
    return np.sign(y) * poly(r) / r
