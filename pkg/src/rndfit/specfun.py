"""Special functions underlying the density expansions.

Probabilists' Hermite polynomials H_n (three-term recurrence
H_{n+1}(x) = x H_n(x) - n H_{n-1}(x)) and the Hermite functions

    h_n(x) = H_n(sqrt(2) x) exp(-x^2 / 2),

which are orthogonal on the real line with ||h_n||^2 = n! sqrt(pi).
Gaussian cdf/pdf, the modified Bessel function K_nu and the regularized
lower incomplete gamma function are thin wrappers over scipy.special,
kept behind this module so callers never touch scipy directly.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sp

__all__ = [
    "hermite_poly",
    "hermite_poly_all",
    "hermite_fn",
    "hermite_fn_all",
    "hermite_fn_deriv",
    "hermite_norm_sq",
    "gauss_pdf",
    "gauss_cdf",
    "bessel_k",
    "log_bessel_k",
    "reg_lower_gamma",
]

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)

#: largest order for which n! sqrt(pi) stays inside double range is ~170,
#: but expansions degrade numerically long before; callers cap at 64.
MAX_ORDER = 170


def _check_order(n: int) -> int:
    n = int(n)
    if n < 0:
        raise ValueError(f"Hermite order must be >= 0, got {n}")
    return n


def hermite_poly_all(n: int, x):
    """All probabilists' Hermite polynomials H_0..H_n at x, shape (n+1,) + x.shape."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for k in range(1, n):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def hermite_poly(n: int, x):
    """Probabilists' Hermite polynomial H_n(x)."""
    return hermite_poly_all(n, x)[-1]


def hermite_fn_all(n: int, x):
    """All Hermite functions h_0..h_n at x, shape (n+1,) + x.shape."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    return hermite_poly_all(n, SQRT2 * x) * np.exp(-0.5 * x * x)


def hermite_fn(n: int, x):
    """Hermite function h_n(x) = H_n(sqrt(2) x) exp(-x^2/2)."""
    return hermite_fn_all(n, x)[-1]


def hermite_fn_deriv(n: int, x):
    """Derivative h_n'(x) = sqrt(2) n h_{n-1}(x) - x h_n(x)."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    h = hermite_fn_all(n, x)
    if n == 0:
        return -x * h[0]
    return SQRT2 * n * h[n - 1] - x * h[n]


def hermite_norm_sq(n: int) -> float:
    """Squared L2 norm of h_n: ||h_n||^2 = n! sqrt(pi).

    Computed in log space; raises OverflowError once the value leaves
    double range.
    """
    n = _check_order(n)
    log_val = sp.gammaln(n + 1) + 0.5 * math.log(math.pi)
    if log_val >= math.log(np.finfo(float).max):
        raise OverflowError(f"n! sqrt(pi) overflows double precision for n = {n}")
    return float(math.exp(log_val))


def hermite_norms_sq(n: int) -> np.ndarray:
    """Vector of ||h_k||^2 for k = 0..n."""
    n = _check_order(n)
    hermite_norm_sq(n)  # overflow check on the largest order
    return np.exp(sp.gammaln(np.arange(n + 1) + 1.0) + 0.5 * math.log(math.pi))


def gauss_pdf(x):
    """Standard normal density phi(x)."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / SQRT_2PI


def gauss_cdf(x):
    """Standard normal cdf Phi(x), via erfc for tail accuracy."""
    x = np.asarray(x, dtype=float)
    return 0.5 * sp.erfc(-x / SQRT2)


def bessel_k(nu: float, x):
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("bessel_k requires x > 0")
    return sp.kv(nu, x)


def log_bessel_k(nu: float, x):
    """log K_nu(x) for x > 0, stable for large x (scaled Bessel kve)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("log_bessel_k requires x > 0")
    return np.log(sp.kve(nu, x)) - x


def reg_lower_gamma(s: float, x):
    """Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s)."""
    if s <= 0.0:
        raise ValueError("reg_lower_gamma requires s > 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("reg_lower_gamma requires x >= 0")
    return sp.gammainc(s, x)
