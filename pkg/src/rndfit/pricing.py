"""European put pricing for every model in the library.

Black-Scholes closed form, the Hermite-expansion estimator (closed form via
partial-integral recurrences), variance-gamma via gamma-mixture quadrature,
Heston via damped Fourier inversion, and the anchor-corrected price transform.

All pricers share one normalization: with spot s0, rates (r, q) and maturity
t, the undiscounted spot is s0 e^{(r-q)t} e^X where X is the log return of
the discounted, normalized price and E e^X = 1.  A put then costs
s0 e^{-qt} E(kappa - e^X)+ with kappa = K e^{-(r-q)t} / s0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .density import HestonParams, VgParams, gamma_quad_nodes, heston_cf, vg_drift
from .hermite import HermiteModel
from .specfun import SQRT2, SQRT_2PI, gauss_cdf, hermite_fn_all

__all__ = [
    "PutSpec",
    "bs_put",
    "hermite_partial_integrals",
    "hermite_put",
    "vg_put",
    "vg_put_batch",
    "heston_put",
    "heston_put_batch",
    "corrected_price",
]


@dataclass(frozen=True)
class PutSpec:
    """Contract terms of a European put."""

    s0: float
    k: float
    r: float
    q: float
    t: float

    def __post_init__(self):
        if self.s0 <= 0 or self.k <= 0 or self.t <= 0:
            raise ValueError("s0, k and t must be positive")
        if self.r < 0 or self.q < 0:
            raise ValueError("r and q must be non-negative")

    @property
    def discounted_strike(self) -> float:
        """kappa: strike relative to the forward, K e^{-(r-q)t} / s0."""
        return self.k * math.exp(-(self.r - self.q) * self.t) / self.s0


def bs_put(spec: PutSpec, sigma: float) -> float:
    """Black-Scholes put; sigma = 0 degenerates to discounted intrinsic value."""
    if sigma < 0:
        raise ValueError("volatility must be non-negative")
    disc_k = spec.k * math.exp(-spec.r * spec.t)
    disc_s = spec.s0 * math.exp(-spec.q * spec.t)
    if sigma == 0.0:
        return max(disc_k - disc_s, 0.0)
    v = sigma * math.sqrt(spec.t)
    d1 = (math.log(spec.s0 / spec.k) + (spec.r - spec.q + 0.5 * sigma**2) * spec.t) / v
    d2 = d1 - v
    return float(disc_k * gauss_cdf(-d2) - disc_s * gauss_cdf(-d1))


def hermite_partial_integrals(n: int, z: float, a: float, b: float):
    """Lower partial integrals of the Hermite basis up to order n.

    I_k(z) = int_{-inf}^z h_k(x) dx and J_k(z) = int_{-inf}^z e^{ax+b} h_k(x) dx.
    Both follow from h_{k+1} = k h_{k-1} - sqrt(2) h_k', integrating the
    derivative term exactly (by parts, for J).
    """
    if a <= 0:
        raise ValueError("scale a must be positive")
    h = hermite_fn_all(n, z) if n >= 1 else np.array([math.exp(-0.5 * z * z)])
    i_vals = np.empty(n + 1)
    j_vals = np.empty(n + 1)
    i_vals[0] = SQRT_2PI * gauss_cdf(z)
    j_vals[0] = SQRT_2PI * math.exp(b + 0.5 * a * a) * gauss_cdf(z - a)
    if n == 0:
        return i_vals, j_vals
    tail = math.exp(a * z + b)
    i_vals[1] = -SQRT2 * h[0]
    j_vals[1] = SQRT2 * a * j_vals[0] - SQRT2 * tail * h[0]
    for k in range(2, n + 1):
        i_vals[k] = (k - 1) * i_vals[k - 2] - SQRT2 * h[k - 1]
        j_vals[k] = (k - 1) * j_vals[k - 2] + SQRT2 * a * j_vals[k - 1] - SQRT2 * tail * h[k - 1]
    return i_vals, j_vals


def hermite_put(model: HermiteModel, spec: PutSpec) -> float:
    """Closed-form put price under a Hermite expansion of the return density.

    May be slightly negative when the expansion itself dips negative; the
    value is returned unclamped so callers can decide.
    """
    kappa = spec.discounted_strike
    zeta = (math.log(kappa) - model.b) / model.a
    i_vals, j_vals = hermite_partial_integrals(model.n, zeta, model.a, model.b)
    alpha = model.coeffs
    return float(
        spec.s0
        * math.exp(-spec.q * spec.t)
        * (kappa * float(alpha @ i_vals) - float(alpha @ j_vals))
    )


def _vg_conditional_put(params: VgParams, spec: PutSpec, x: np.ndarray) -> np.ndarray:
    """Discounted put value conditional on the gamma time Gamma_t = x."""
    eta = vg_drift(params)
    drift = (spec.r - spec.q + eta) * spec.t + (params.theta + 0.5 * params.sigma**2) * x
    fwd = spec.s0 * np.exp(drift)  # conditional forward of the undiscounted spot
    vol = params.sigma * np.sqrt(x)
    disc = math.exp(-spec.r * spec.t)
    out = np.empty_like(fwd)
    degenerate = vol <= 0
    out[degenerate] = np.maximum(spec.k - fwd[degenerate], 0.0)
    if not np.all(degenerate):
        v = vol[~degenerate]
        f = fwd[~degenerate]
        d1 = (np.log(f / spec.k) + 0.5 * v * v) / v
        d2 = d1 - v
        out[~degenerate] = spec.k * gauss_cdf(-d2) - f * gauss_cdf(-d1)
    return disc * out


def vg_put(params: VgParams, spec: PutSpec, nodes: int = 128, check_nodes: bool = False) -> float:
    """Variance-gamma put as a gamma-measure average of Black-Scholes prices.

    The x^{ct-1} endpoint singularity of the mixing density is absorbed into
    the weight of generalized Gauss-Laguerre quadrature, so the integrand
    sampled is the smooth conditional price alone.
    """
    shape = params.c * spec.t
    x, w = gamma_quad_nodes(shape, params.alpha, nodes)
    price = float(w @ _vg_conditional_put(params, spec, x))
    if check_nodes:
        x2, w2 = gamma_quad_nodes(shape, params.alpha, 2 * nodes)
        refined = float(w2 @ _vg_conditional_put(params, spec, x2))
        if abs(refined - price) > 1e-7 * max(abs(refined), 1e-12):
            warnings.warn(
                f"vg_put node-doubling drift {abs(refined - price):.2e}; "
                f"increase nodes beyond {nodes}",
                RuntimeWarning,
                stacklevel=2,
            )
        price = refined
    return price


def vg_put_batch(
    params: VgParams,
    s0: float,
    strikes,
    r: float,
    q: float,
    t: float,
    nodes: int = 128,
) -> np.ndarray:
    """Variance-gamma prices for a strike ladder sharing one node set.

    The gamma quadrature nodes depend only on (params, t), so they are built
    once and the conditional Black-Scholes prices are evaluated on the full
    strike-by-node grid.  Agrees with vg_put strike by strike; this is the
    fast path for calibration loops.
    """
    strikes = np.asarray(strikes, dtype=float)
    x, w = gamma_quad_nodes(params.c * t, params.alpha, nodes)
    eta = vg_drift(params)
    drift = (r - q + eta) * t + (params.theta + 0.5 * params.sigma**2) * x
    fwd = s0 * np.exp(drift)
    vol = params.sigma * np.sqrt(x)  # > 0: Gauss-Laguerre nodes are interior
    k_col = strikes[:, None]
    d1 = (np.log(fwd / k_col) + 0.5 * vol * vol) / vol
    d2 = d1 - vol
    cond = k_col * gauss_cdf(-d2) - fwd * gauss_cdf(-d1)
    return math.exp(-r * t) * (cond @ w)


@lru_cache(maxsize=8)
def _leggauss(nodes: int):
    # cached raw nodes on [-1, 1]; callers rescale without mutating
    return np.polynomial.legendre.leggauss(nodes)


def _cf_decay_rate(params: HestonParams, t: float) -> float:
    """Exponential decay rate C of |psi_t|, fitted on samples at 10, 20, 40."""
    mags = [abs(heston_cf(params, t, xi)) for xi in (10.0, 20.0, 40.0)]
    floor = 1e-300
    c1 = math.log(max(mags[0], floor) / max(mags[1], floor)) / 10.0
    c2 = math.log(max(mags[1], floor) / max(mags[2], floor)) / 20.0
    return max(0.5 * (c1 + c2), 1e-3)


def _cm_integrand(params: HestonParams, t: float, alpha_damp: float, log_k: float):
    """Carr-Madan integrand along the damped contour, 2*pi Fourier convention."""
    shift = -1j * (alpha_damp + 1.0)

    def integrand(xi: float) -> float:
        two_pi_xi = 2.0 * math.pi * xi
        cf = heston_cf(params, t, -two_pi_xi + shift)
        denom = (alpha_damp + 1.0 - 1j * two_pi_xi) * (alpha_damp - 1j * two_pi_xi)
        return (np.exp(2j * math.pi * xi * log_k) * cf / denom).real

    return integrand


def heston_put(params: HestonParams, spec: PutSpec, alpha_damp: float = -1.75) -> float:
    """Heston put by damped Fourier inversion of the payoff transform."""
    if alpha_damp > -1.0:
        raise ValueError("damping exponent must satisfy alpha_damp <= -1")
    log_k = math.log(spec.discounted_strike)
    decay = _cf_decay_rate(params, spec.t)
    # |psi| along the contour falls like exp(-2*pi*decay*xi); cut where < 1e-14
    cutoff = max(14.0 * math.log(10.0) / (2.0 * math.pi * decay), 10.0)
    integral, _ = quad(
        _cm_integrand(params, spec.t, alpha_damp, log_k),
        0.0,
        cutoff,
        epsabs=1e-13,
        epsrel=1e-11,
        limit=400,
    )
    normalized = 2.0 * math.exp(-alpha_damp * log_k) * integral
    return float(spec.s0 * math.exp(-spec.q * spec.t) * normalized)


def heston_put_batch(
    params: HestonParams,
    s0: float,
    strikes,
    r: float,
    q: float,
    t: float,
    alpha_damp: float = -1.75,
    nodes: int = 256,
) -> np.ndarray:
    """Prices for a strike ladder sharing one set of Fourier quadrature nodes.

    The characteristic-function samples do not depend on the strike, so they
    are computed once on fixed Gauss-Legendre nodes and reused; only the
    oscillatory strike factor varies.  Agrees with heston_put to quadrature
    accuracy and is the fast path for calibration loops.
    """
    if alpha_damp > -1.0:
        raise ValueError("damping exponent must satisfy alpha_damp <= -1")
    strikes = np.asarray(strikes, dtype=float)
    decay = _cf_decay_rate(params, t)
    cutoff = max(14.0 * math.log(10.0) / (2.0 * math.pi * decay), 10.0)
    xi, w = _leggauss(nodes)
    xi = 0.5 * cutoff * (xi + 1.0)
    w = 0.5 * cutoff * w
    two_pi_xi = 2.0 * math.pi * xi
    shift = -1j * (alpha_damp + 1.0)
    cf = heston_cf(params, t, -two_pi_xi + shift)
    denom = (alpha_damp + 1.0 - 1j * two_pi_xi) * (alpha_damp - 1j * two_pi_xi)
    base = w * cf / denom
    log_k = np.log(strikes * math.exp(-(r - q) * t) / s0)
    phases = np.exp(1j * np.outer(log_k, two_pi_xi))
    integrals = (phases @ base).real
    return s0 * math.exp(-q * t) * 2.0 * np.exp(-alpha_damp * log_k) * integrals


def corrected_price(
    model_price: float,
    model_anchor_price: float,
    observed_anchor_price: float,
    k: float,
    k0: float,
) -> float:
    """Anchor-corrected price: shift by the anchor residual scaled by k/k0."""
    if k0 <= 0:
        raise ValueError("anchor strike must be positive")
    return model_price + (k / k0) * (observed_anchor_price - model_anchor_price)
