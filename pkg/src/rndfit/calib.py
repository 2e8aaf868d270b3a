"""Calibration of every estimator to a block of observed put prices.

One block (all quotes on a date sharing a maturity) is the calibration
unit.  The loss everywhere is built from absolute relative pricing
errors |price/observed - 1|: Hermite coefficients minimize its l2 norm,
which is a linear least-squares problem because the expansion price is
linear in the coefficients; everything nonlinear (the scale/location
pair, the variance-gamma and Heston parameters) minimizes its l1 norm
by a derivative-free simplex.  The parametric fits run in transformed
coordinates (log for positive parameters, tanh for the correlation) so
the simplex never evaluates an inadmissible point; the one joint
variance-gamma constraint that no coordinate transform can express is
handled by a penalty.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, is_dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq, minimize

from .density import HestonParams, VgParams
from .hermite import FLAVORS, HermiteModel, constrained_project, martingale_system
from .pricing import (
    PutSpec,
    bs_put,
    hermite_partial_integrals,
    heston_put_batch,
    vg_put_batch,
)

if TYPE_CHECKING:
    from .bench import OptionBlock

__all__ = [
    "CalibrationResult",
    "rel_errors",
    "fit_bs",
    "fit_hermite_alpha",
    "fit_hermite",
    "fit_vg",
    "fit_heston",
]

# One stopping rule for every simplex: diameter below XATOL and objective
# spread below FATOL.  The spread test is what makes kinked l1 objectives
# (piecewise linear near an exact fit) converge far below the diameter tol.
SIMPLEX_XATOL = 1e-6
SIMPLEX_FATOL = 1e-9

VG_START = (0.1, 0.3, 2.0)
VG_SIGMA_FLOOR = 0.05
HESTON_START = (0.02, 0.35, -0.5, 0.5, 0.3)  # (v0, theta, rho, kappa, eta)

# Transformed coordinates beyond this radius are numerically degenerate
# (exp overflow, tanh saturating to +-1); penalized, never evaluated.
_COORD_RADIUS = 18.0
_PENALTY = 1e6


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of one calibration: parameters plus fit diagnostics.

    in_range is the (k_min, k_max) strike span of the calibration set;
    overfit flags fits with fewer quotes than free parameters.
    """

    params: object
    objective: float
    iterations: int
    converged: bool
    in_range: tuple[float, float]
    overfit: bool = False

    def __post_init__(self):
        if self.objective < 0.0:
            raise ValueError(f"objective must be >= 0, got {self.objective}")

    def to_dict(self) -> dict:
        params = self.params
        if hasattr(params, "to_dict"):
            params = params.to_dict()
        elif is_dataclass(params):
            params = asdict(params)
        return {
            "params": params,
            "objective": float(self.objective),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "in_range": [float(self.in_range[0]), float(self.in_range[1])],
            "overfit": bool(self.overfit),
        }


def rel_errors(pi_hat, pi) -> np.ndarray:
    """Componentwise absolute relative pricing errors |pi_hat / pi - 1|."""
    pi = np.asarray(pi, dtype=float)
    pi_hat = np.asarray(pi_hat, dtype=float)
    if np.any(pi <= 0.0):
        raise ValueError("observed prices must be positive")
    return np.abs(pi_hat / pi - 1.0)


def _block_arrays(block: OptionBlock) -> tuple[np.ndarray, np.ndarray]:
    strikes = np.array([quote.strike for quote in block.quotes], dtype=float)
    prices = np.array([quote.put_price for quote in block.quotes], dtype=float)
    if strikes.size == 0:
        raise ValueError("block has no quotes")
    if np.any(prices <= 0.0):
        raise ValueError("observed prices must be positive")
    return strikes, prices


def _strike_span(strikes: np.ndarray) -> tuple[float, float]:
    return float(np.min(strikes)), float(np.max(strikes))


def _design_matrix(block: OptionBlock, a: float, b: float, n: int) -> np.ndarray:
    """Design matrix of the linear coefficient fit.

    Row j holds the put price each basis function contributes at strike j,
    divided by the observed price, so that model relative errors are exactly
    D alpha - 1.
    """
    strikes, prices = _block_arrays(block)
    discounted_spot = block.spot * math.exp(-block.dividend_yield * block.t)
    forward = block.spot * math.exp((block.rate - block.dividend_yield) * block.t)
    rows = np.empty((strikes.size, n + 1))
    for j, (strike, price) in enumerate(zip(strikes, prices)):
        kappa = strike / forward
        zeta = (math.log(kappa) - b) / a
        part_one, part_exp = hermite_partial_integrals(n, zeta, a, b)
        rows[j] = discounted_spot * (kappa * part_one - part_exp) / price
    return rows


def _lstsq_alpha(design: np.ndarray) -> tuple[np.ndarray, int]:
    ones = np.ones(design.shape[0])
    alpha, _, rank, _ = np.linalg.lstsq(design, ones, rcond=None)
    return alpha, int(rank)


def fit_hermite_alpha(block: OptionBlock, a: float, b: float, n: int) -> np.ndarray:
    """Least-squares Hermite coefficients for one block at fixed (a, b).

    Minimizes the l2 norm of relative pricing errors; the expansion price
    is linear in the coefficients, so the argmin is plain linear algebra.
    Exact interpolation when the system is square and nonsingular.  Warns
    when the strike set cannot identify all n + 1 coefficients; scaling
    every observed price by a positive constant leaves the argmin property
    intact because the objective is built from relative errors only.
    """
    design = _design_matrix(block, a, b, n)
    alpha, rank = _lstsq_alpha(design)
    if rank < n + 1:
        warnings.warn(
            f"strike set identifies {rank} of {n + 1} coefficients",
            RuntimeWarning,
            stacklevel=2,
        )
    return alpha


def _implied_vol_anchor(block: OptionBlock) -> float:
    """Black-Scholes vol of the quote nearest the forward, for initializing a.

    Falls back to 0.3 when the quote violates the no-arbitrage price band
    and no vol can reproduce it.
    """
    strikes, prices = _block_arrays(block)
    forward = block.spot * math.exp((block.rate - block.dividend_yield) * block.t)
    j = int(np.argmin(np.abs(strikes - forward)))
    spec = PutSpec(block.spot, float(strikes[j]), block.rate, block.dividend_yield, block.t)
    target = float(prices[j])
    gap = lambda sigma: bs_put(spec, sigma) - target
    lo, hi = 1e-4, 5.0
    if gap(lo) >= 0.0 or gap(hi) <= 0.0:
        return 0.3
    return float(brentq(gap, lo, hi, xtol=1e-10))


def fit_bs(block: OptionBlock) -> tuple[float, CalibrationResult]:
    """Black-Scholes baseline: one volatility fit to the whole block.

    Minimizes the l1 norm of relative errors, like every nonlinear fit
    here; serves as the reference estimator in out-of-sample studies.
    Returns (sigma, result).
    """
    strikes, observed = _block_arrays(block)
    specs = [
        PutSpec(block.spot, float(k), block.rate, block.dividend_yield, block.t)
        for k in strikes
    ]

    def objective(x) -> float:
        if x[0] <= 1e-6:
            return np.inf
        prices = np.array([bs_put(spec, float(x[0])) for spec in specs])
        return float(np.sum(rel_errors(prices, observed)))

    res = _simplex(objective, [_implied_vol_anchor(block)], maxiter=500)
    sigma = float(res.x[0])
    result = CalibrationResult(
        params=sigma,
        objective=objective(res.x),
        iterations=int(res.nit),
        converged=bool(res.success),
        in_range=_strike_span(strikes),
        overfit=False,
    )
    return sigma, result


def fit_hermite(
    block: OptionBlock, n: int, flavor: str
) -> tuple[HermiteModel, CalibrationResult]:
    """Full Hermite calibration: nested linear-in-alpha, simplex-in-(a, b).

    The outer simplex moves a (flavors p and m, with b tied to -a^2/2) or
    (a, b) (flavor free) and minimizes the l1 norm of relative errors; at
    every trial point the coefficients are refit by least squares, with the
    mass/martingale projection applied for flavor m.  Coefficients are
    recomputed from scratch at the final point, never carried over.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
    strikes, _ = _block_arrays(block)

    def residual_norm(a: float, b: float) -> float:
        design = _design_matrix(block, a, b, n)
        alpha, _ = _lstsq_alpha(design)
        if flavor == "m":
            alpha = constrained_project(alpha, martingale_system(a, b, n))
        return float(np.sum(np.abs(design @ alpha - 1.0)))

    a0 = _implied_vol_anchor(block) * math.sqrt(block.t)
    options = {"maxiter": 500, "xatol": SIMPLEX_XATOL, "fatol": SIMPLEX_FATOL}
    if flavor == "free":
        fun = lambda x: residual_norm(x[0], x[1]) if x[0] > 1e-6 else np.inf
        res = minimize(fun, np.array([a0, -0.5 * a0**2]), method="Nelder-Mead", options=options)
        a, b = float(res.x[0]), float(res.x[1])
    else:
        fun = lambda x: residual_norm(x[0], -0.5 * x[0] ** 2) if x[0] > 1e-6 else np.inf
        res = minimize(fun, np.array([a0]), method="Nelder-Mead", options=options)
        a = float(res.x[0])
        b = -0.5 * a**2
    alpha = fit_hermite_alpha(block, a, b, n)
    if flavor == "m":
        alpha = constrained_project(alpha, martingale_system(a, b, n))
    model = HermiteModel(flavor, a, b, alpha)
    result = CalibrationResult(
        params=model,
        objective=residual_norm(a, b),
        iterations=int(res.nit),
        converged=bool(res.success),
        in_range=_strike_span(strikes),
        overfit=strikes.size < model.dof,
    )
    return model, result


def _simplex(objective, x0, maxiter: int):
    return minimize(
        objective,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        options={"maxiter": maxiter, "xatol": SIMPLEX_XATOL, "fatol": SIMPLEX_FATOL},
    )


def fit_vg(block: OptionBlock) -> tuple[VgParams, CalibrationResult]:
    """Variance-gamma calibration by simplex from the fixed starting point.

    Coordinates are (theta, log(sigma - floor), log alpha), enforcing the
    sigma floor and alpha > 0; the joint martingale-admissibility constraint
    theta + sigma^2/2 < alpha is a penalty because no per-coordinate
    transform can express it.
    """
    strikes, observed = _block_arrays(block)

    def unpack(x) -> VgParams:
        return VgParams(x[0], VG_SIGMA_FLOOR + math.exp(x[1]), math.exp(x[2]))

    def objective(x) -> float:
        overshoot = float(np.max(np.abs(x))) - _COORD_RADIUS
        if overshoot > 0.0:
            return _PENALTY * (1.0 + overshoot)
        params = unpack(x)
        slack = params.alpha - (params.theta + 0.5 * params.sigma**2)
        if slack <= 1e-12 * params.alpha:
            return _PENALTY * (1.0 - slack)
        prices = vg_put_batch(
            params, block.spot, strikes, block.rate, block.dividend_yield, block.t
        )
        if not np.all(np.isfinite(prices)):
            return _PENALTY
        return float(np.sum(rel_errors(prices, observed)))

    theta0, sigma0, alpha0 = VG_START
    x0 = [theta0, math.log(sigma0 - VG_SIGMA_FLOOR), math.log(alpha0)]
    res = _simplex(objective, x0, maxiter=5000)
    params = unpack(res.x)
    final = objective(res.x)
    admissible = final < _PENALTY
    if not admissible:
        warnings.warn(
            "variance-gamma calibration never cleared the admissibility penalty",
            RuntimeWarning,
            stacklevel=2,
        )
    result = CalibrationResult(
        params=params,
        objective=final,
        iterations=int(res.nit),
        converged=bool(res.success) and admissible,
        in_range=_strike_span(strikes),
        overfit=strikes.size < 3,
    )
    return params, result


def fit_heston(block: OptionBlock) -> tuple[HestonParams, CalibrationResult]:
    """Heston calibration by simplex from the fixed starting point.

    Coordinates are (log v0, log kappa, log theta, log eta, atanh rho), so
    positivity and rho in (-1, 1) hold at every trial point.  Feller
    violations are allowed in the result but flagged with a warning.
    """
    strikes, observed = _block_arrays(block)

    def unpack(x) -> HestonParams:
        return HestonParams(
            math.exp(x[0]), math.exp(x[1]), math.exp(x[2]), math.exp(x[3]), math.tanh(x[4])
        )

    def objective(x) -> float:
        overshoot = float(np.max(np.abs(x))) - _COORD_RADIUS
        if overshoot > 0.0:
            return _PENALTY * (1.0 + overshoot)
        prices = heston_put_batch(
            unpack(x), block.spot, strikes, block.rate, block.dividend_yield, block.t
        )
        if not np.all(np.isfinite(prices)):
            return _PENALTY
        return float(np.sum(rel_errors(prices, observed)))

    v0, theta0, rho0, kappa0, eta0 = HESTON_START
    x0 = [math.log(v0), math.log(kappa0), math.log(theta0), math.log(eta0), math.atanh(rho0)]
    res = _simplex(objective, x0, maxiter=5000)
    params = unpack(res.x)
    if not params.feller:
        warnings.warn(
            f"calibrated Heston parameters violate the Feller condition: "
            f"2 kappa theta = {2.0 * params.kappa * params.theta:.4g} <= "
            f"eta^2 = {params.eta**2:.4g}",
            RuntimeWarning,
            stacklevel=2,
        )
    result = CalibrationResult(
        params=params,
        objective=objective(res.x),
        iterations=int(res.nit),
        converged=bool(res.success),
        in_range=_strike_span(strikes),
        overfit=strikes.size < 5,
    )
    return params, result
