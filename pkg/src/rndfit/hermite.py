"""Hermite-function expansion of risk-neutral log-return densities.

With X defined by a X + b = log S_t, the density g of X is expanded as
g ~ sum_k alpha_k h_k; HermiteModel stores those standardized-variable
coefficients.  The log-price density estimate is then

    f_n(x) = (1/a) sum_k alpha_k h_k((x - b)/a),

whose coefficients are recovered from a target density f by

    alpha_k = <f, h_k((. - b)/a)> / (k! sqrt(pi))

(the change-of-variables Jacobian is folded in, so alpha is invariant
under rescaling f through (a, b)).

Three flavors:
  free  a, b unrestricted;
  p     b = -a^2/2 (a one-parameter perturbation of the lognormal);
  m     flavor p plus the two approximate-martingale constraints
        integral f_n = 1 and integral e^x f_n(x) dx = 1, imposed by
        projecting the coefficients in the norm-weighted metric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, quad_vec
from scipy.optimize import minimize
from scipy.special import gammaln

from .density import DensityGrid, VgParams, HestonParams, gamma_quad_nodes, grid_moments, heston_cf, vg_drift
from .specfun import SQRT2, SQRT_2PI, hermite_fn_all, hermite_norms_sq

__all__ = [
    "HermiteModel",
    "ConstraintSystem",
    "FLAVORS",
    "default_scale_location",
    "coeffs_from_density",
    "eval_model",
    "l2_error",
    "constraint_rows",
    "martingale_system",
    "constrained_project",
    "scale_location_objective",
    "optimize_scale_location",
    "model_from_density",
    "gaussian_product",
    "vg_coeffs_gamma_measure",
    "heston_coeffs_fourier",
]

FLAVORS = ("free", "p", "m")
MAX_MODEL_ORDER = 64

#: half-width (in units of a) beyond which the Gaussian envelope of h_n
#: falls under 1e-16 of its peak; sqrt(2n+1) covers the oscillatory band.
_ENVELOPE_CUT = math.sqrt(-2.0 * math.log(1e-16))


def _support_halfwidth(n: int) -> float:
    return math.sqrt(2.0 * n + 1.0) + _ENVELOPE_CUT


@dataclass(frozen=True)
class HermiteModel:
    """Hermite density model: flavor, scale a, location b, coefficients."""

    flavor: str
    a: float
    b: float
    coeffs: np.ndarray

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        if not self.a > 0.0:
            raise ValueError(f"scale a must be > 0, got {self.a}")
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coeffs must be a non-empty vector")
        if coeffs.size - 1 > MAX_MODEL_ORDER:
            raise ValueError(f"order capped at {MAX_MODEL_ORDER}, got {coeffs.size - 1}")
        if self.flavor in ("p", "m") and abs(self.b + 0.5 * self.a ** 2) > 1e-9:
            raise ValueError(
                f"flavor {self.flavor!r} requires b = -a^2/2, got b = {self.b}, a = {self.a}"
            )
        if self.flavor == "free" and coeffs.size == 1:
            raise ValueError("order-0 free model is degenerate (a, b, alpha0 not identifiable)")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n(self) -> int:
        return self.coeffs.size - 1

    @property
    def dof(self) -> int:
        """Free parameters: n+3 (free), n+2 (p), n (m)."""
        return {"free": self.n + 3, "p": self.n + 2, "m": self.n}[self.flavor]

    def constraint_residuals(self):
        """(integral f_n - 1, integral e^x f_n - 1) in closed form."""
        sys_ = martingale_system(self.a, self.b, self.n)
        return tuple(sys_.rows @ self.coeffs - sys_.values)

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "a": float(self.a),
            "b": float(self.b),
            "coeffs": [float(c) for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HermiteModel":
        return cls(d["flavor"], float(d["a"]), float(d["b"]), np.asarray(d["coeffs"], float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "HermiteModel":
        return cls.from_dict(json.loads(s))


def default_scale_location(mean: float, std: float | None = None, mode: str = "p"):
    """Default (a, b) for an expansion of a density with the given moments.

    mode "p": b = mean (must be < 0, as it is for any martingale log
    return by Jensen), a = sqrt(-2 b), so that b = -a^2/2.
    mode "moment": a = std, b = mean.
    """
    if mode == "p":
        if mean >= 0.0:
            raise ValueError(f"mode 'p' needs a negative mean, got {mean}")
        return math.sqrt(-2.0 * mean), mean
    if mode == "moment":
        if std is None or std <= 0.0:
            raise ValueError("mode 'moment' needs std > 0")
        return float(std), float(mean)
    raise ValueError(f"unknown mode {mode!r}")


def _inner_products(target, a: float, b: float, n: int, deriv: bool = False):
    """<f, h_k((.-b)/a)> for k = 0..n; with deriv also the h'_k and (.-b) h'_k rows.

    target is a DensityGrid (trapezoid rule) or a callable density
    (adaptive quadrature, truncated where the Gaussian envelope of the
    basis is below 1e-16 of peak).
    """
    r = _support_halfwidth(n)

    def rows(x):
        z = (x - b) / a
        h = hermite_fn_all(n, z)
        if not deriv:
            return h
        hp = np.empty_like(h)
        hp[0] = -z * h[0]
        for k in range(1, n + 1):
            hp[k] = SQRT2 * k * h[k - 1] - z * h[k]
        return np.concatenate([h, hp, (x - b) * hp])

    if isinstance(target, DensityGrid):
        vals = rows(target.x) * target.f
        return np.trapezoid(vals, target.x, axis=-1)

    res, _ = quad_vec(lambda x: rows(np.asarray(x, float)) * target(x), b - r * a, b + r * a, epsabs=1e-12, epsrel=1e-10)
    return res


def target_norm_sq(target, window=None) -> float:
    """Squared L2 norm of the target density."""
    if isinstance(target, DensityGrid):
        return float(np.trapezoid(target.f ** 2, target.x))
    if window is None:
        raise ValueError("callable targets need an integration window for their norm")
    lo, hi = window
    val, _ = quad(lambda x: float(target(x)) ** 2, lo, hi, limit=200)
    return float(val)


def coeffs_from_density(target, a: float, b: float, n: int) -> np.ndarray:
    """Expansion coefficients alpha_k = <f, h_k((.-b)/a)> / (k! sqrt(pi))."""
    return _inner_products(target, a, b, n) / hermite_norms_sq(n)


def eval_model(model: HermiteModel, x):
    """Density estimate f_n(x) = (1/a) sum_k alpha_k h_k((x - b)/a)."""
    z = (np.asarray(x, dtype=float) - model.b) / model.a
    h = hermite_fn_all(model.n, z)
    return np.tensordot(model.coeffs, h, axes=(0, 0)) / model.a


def l2_error(target, model: HermiteModel, *, alphas=None, norm_sq=None, window=None) -> float:
    """Squared L2 distance ||f - f_n||^2, in closed form.

    With c_k = ||h_k||^2, alpha the unconstrained coefficients of the
    target at the model's (a, b) and beta the model's coefficients,

        ||f - f_n||^2 = ||f||^2 + (1/a) (sum beta^2 c - 2 sum alpha beta c);

    for beta = alpha this collapses to ||f||^2 - (1/a) sum alpha^2 c.
    """
    if alphas is None:
        alphas = coeffs_from_density(target, model.a, model.b, model.n)
    if norm_sq is None:
        norm_sq = target_norm_sq(target, window)
    c = hermite_norms_sq(model.n)
    beta = model.coeffs
    return float(norm_sq + (beta @ (beta * c) - 2.0 * (alphas @ (beta * c))) / model.a)


def constraint_rows(a: float, b: float, n: int, kind: str) -> np.ndarray:
    """Row of constraint integrals against h_0..h_n.

    kind "unit": u_k = integral h_k = (k-1)!! sqrt(2 pi) for even k, 0 odd.
    kind "martingale": w_k = integral e^{a x + b} h_k(x) dx, by the
    recurrence w_k = (k-1) w_{k-2} + sqrt(2) a w_{k-1},
    w_0 = sqrt(2 pi) e^{b + a^2/2}.
    """
    if kind == "unit":
        u = np.zeros(n + 1)
        u[0] = SQRT_2PI
        for k in range(2, n + 1, 2):
            u[k] = (k - 1) * u[k - 2]
        return u
    if kind == "martingale":
        w = np.zeros(n + 1)
        w[0] = SQRT_2PI * math.exp(b + 0.5 * a ** 2)
        for k in range(1, n + 1):
            w[k] = SQRT2 * a * w[k - 1] + ((k - 1) * w[k - 2] if k >= 2 else 0.0)
        return w
    raise ValueError(f"unknown constraint kind {kind!r}")


@dataclass(frozen=True)
class ConstraintSystem:
    """Linear constraints L beta = v on expansion coefficients."""

    rows: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if rows.shape[0] != values.size:
            raise ValueError("one value per constraint row required")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "values", values)


def martingale_system(a: float, b: float, n: int) -> ConstraintSystem:
    """Unit-mass and martingale constraints: both right-hand sides are 1."""
    return ConstraintSystem(
        rows=np.vstack([constraint_rows(a, b, n, "unit"), constraint_rows(a, b, n, "martingale")]),
        values=np.array([1.0, 1.0]),
    )


def constrained_project(alpha: np.ndarray, system: ConstraintSystem) -> np.ndarray:
    """Projection of alpha onto {L beta = v} in the norm-weighted metric.

    Minimizes sum_k (beta_k - alpha_k)^2 ||h_k||^2 (the L2 distance between
    the corresponding expansions).  Orthonormalize (divide column k of L
    and multiply alpha_k by ||h_k||), project in Euclidean coordinates,
    map back:  beta^ = alpha^ - L^T (L L^T)^{-1} (L alpha^ - v).
    """
    alpha = np.asarray(alpha, dtype=float)
    scale = np.sqrt(hermite_norms_sq(alpha.size - 1))
    ahat = alpha * scale
    lhat = system.rows / scale
    gram = lhat @ lhat.T
    try:
        mult = np.linalg.solve(gram, lhat @ ahat - system.values)
    except np.linalg.LinAlgError as exc:
        raise ValueError("constraint rows are rank deficient") from exc
    return (ahat - lhat.T @ mult) / scale


def scale_location_objective(target, s: float, m: float, n: int, *, norm_sq: float):
    """J(s, m) = ||f - f_n^{s,m}||^2 for the unconstrained expansion, with gradient.

    Writing gamma_k = <f(s. + m), h_k>/c_k (so J = ||f||^2 - s sum gamma^2 c),
    the partials of gamma are

        d_s gamma_k = -(1/(c_k s^2)) <f, h_k((.-m)/s)> - (1/(c_k s^3)) <f, (.-m) h'_k((.-m)/s)>
        d_m gamma_k = -(1/(c_k s^2)) <f, h'_k((.-m)/s)>

    and dJ/ds = -sum gamma^2 c - 2 s sum gamma c d_s gamma,
        dJ/dm = -2 s sum gamma c d_m gamma.
    """
    c = hermite_norms_sq(n)
    stacked = _inner_products(target, s, m, n, deriv=True)
    p, q, r = stacked[: n + 1], stacked[n + 1 : 2 * (n + 1)], stacked[2 * (n + 1) :]
    gamma = p / (c * s)
    dg_ds = -p / (c * s ** 2) - r / (c * s ** 3)
    dg_dm = -q / (c * s ** 2)
    j = norm_sq - s * np.sum(gamma ** 2 * c)
    dj_ds = -np.sum(gamma ** 2 * c) - 2.0 * s * np.sum(gamma * c * dg_ds)
    dj_dm = -2.0 * s * np.sum(gamma * c * dg_dm)
    return float(j), float(dj_ds), float(dj_dm)


def _flavor_error(target, flavor: str, a: float, n: int, *, norm_sq: float, b: float | None = None):
    """J at given scale for one flavor, recomputing (and projecting) coefficients."""
    if b is None:
        b = -0.5 * a ** 2
    alphas = coeffs_from_density(target, a, b, n)
    if flavor == "m":
        beta = constrained_project(alphas, martingale_system(a, b, n))
    else:
        beta = alphas
    c = hermite_norms_sq(n)
    j = norm_sq + (beta @ (beta * c) - 2.0 * (alphas @ (beta * c))) / a
    return float(j), beta


def optimize_scale_location(
    target,
    flavor: str,
    n: int,
    init: tuple[float, float],
    *,
    norm_sq: float | None = None,
    window=None,
    method: str = "nelder-mead",
    maxiter: int = 500,
):
    """Minimize J over the scale (flavors p/m, with b = -a^2/2) or over (a, b) (free).

    Returns (HermiteModel at the optimum with refreshed coefficients,
    converged flag).  Non-convergence after maxiter returns best-found.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
    if norm_sq is None:
        norm_sq = target_norm_sq(target, window)
    a0, b0 = init

    if flavor == "free":
        if method == "gradient":
            fun = lambda x: scale_location_objective(target, x[0], x[1], n, norm_sq=norm_sq)[0] if x[0] > 1e-6 else np.inf
            jac = lambda x: np.array(scale_location_objective(target, x[0], x[1], n, norm_sq=norm_sq)[1:])
            res = minimize(fun, np.array([a0, b0]), jac=jac, method="BFGS", options={"maxiter": maxiter})
        else:
            fun = lambda x: _flavor_error(target, "free", x[0], n, norm_sq=norm_sq, b=x[1])[0] if x[0] > 1e-6 else np.inf
            res = minimize(fun, np.array([a0, b0]), method="Nelder-Mead",
                           options={"maxiter": maxiter, "xatol": 1e-6, "fatol": 1e-9})
        a, b = float(res.x[0]), float(res.x[1])
        coeffs = coeffs_from_density(target, a, b, n)
        return HermiteModel("free", a, b, coeffs), bool(res.success)

    fun = lambda x: _flavor_error(target, flavor, x[0], n, norm_sq=norm_sq)[0] if x[0] > 1e-6 else np.inf
    res = minimize(fun, np.array([a0]), method="Nelder-Mead",
                   options={"maxiter": maxiter, "xatol": 1e-6, "fatol": 1e-9})
    a = float(res.x[0])
    _, beta = _flavor_error(target, flavor, a, n, norm_sq=norm_sq)
    return HermiteModel(flavor, a, -0.5 * a ** 2, beta), bool(res.success)


def model_from_density(
    target,
    flavor: str,
    n: int,
    *,
    stats: tuple[float, float] | None = None,
    optimize: bool = False,
    norm_sq: float | None = None,
    window=None,
    coeff_fn=None,
):
    """Fit a Hermite model of the given flavor/order to a target density.

    stats = (mean, std) of the target; derived from the grid when omitted.
    coeff_fn(a, b, n) optionally overrides the coefficient route (e.g. the
    gamma-measure or Fourier specializations); defaults to direct quadrature.
    """
    if stats is None:
        if not isinstance(target, DensityGrid):
            raise ValueError("callable targets require explicit stats=(mean, std)")
        gm = grid_moments(target)
        stats = (gm.mean, gm.std)
    mean, std = stats
    mode = "moment" if flavor == "free" else "p"
    a, b = default_scale_location(mean, std, mode)

    if optimize:
        model, _ = optimize_scale_location(target, flavor, n, (a, b), norm_sq=norm_sq, window=window)
        return model

    compute = coeff_fn if coeff_fn is not None else (lambda aa, bb, nn: coeffs_from_density(target, aa, bb, nn))
    alphas = compute(a, b, n)
    if flavor == "m":
        alphas = constrained_project(alphas, martingale_system(a, b, n))
    return HermiteModel(flavor, a, b, alphas)


def gaussian_product(mu1: float, s1: float, mu2: float, s2: float):
    """Collapse phi((x-mu1)/s1) phi((x-mu2)/s2) = phi((x-mu)/s) e^c / sqrt(2 pi).

    mu = (mu1 s2^2 + mu2 s1^2)/(s1^2 + s2^2), s = s1 s2/sqrt(s1^2 + s2^2),
    c = -(mu1^2/s1^2 + mu2^2/s2^2 - mu^2/s^2) / 2.
    """
    v1, v2 = s1 * s1, s2 * s2
    mu = (mu1 * v2 + mu2 * v1) / (v1 + v2)
    s = s1 * s2 / math.sqrt(v1 + v2)
    c = -0.5 * (mu1 ** 2 / v1 + mu2 ** 2 / v2 - mu ** 2 / (s * s))
    return mu, s, c


def vg_coeffs_gamma_measure(params: VgParams, t: float, a: float, b: float, n: int, nodes: int = 64) -> np.ndarray:
    """Expansion coefficients of the variance-gamma log-return density.

    The inner Gaussian integral is closed-form: conditionally on the
    subordinator value s the log return is N(eta t + theta s, sigma^2 s),
    so each coefficient reduces to a gamma-measure integral of Gaussian
    Hermite moments E H_k(q + p Z), evaluated by the Stein recurrence
    m_{k+1} = q m_k + k (p^2 - 1) m_{k-1}.
    """
    th, sg = params.theta, params.sigma
    drift = vg_drift(params) * t
    s, w = gamma_quad_nodes(params.c * t, params.alpha, nodes)

    mu2 = drift + th * s
    s2 = sg * np.sqrt(s)
    v1, v2 = a * a, s2 * s2
    mu = (b * v2 + mu2 * v1) / (v1 + v2)
    sbar = a * s2 / np.sqrt(v1 + v2)
    cbar = -0.5 * (b * b / v1 + mu2 * mu2 / v2 - mu * mu / (sbar * sbar))

    p2 = 2.0 * (sbar / a) ** 2
    q = SQRT2 * (mu - b) / a
    m = np.empty((n + 1, s.size))
    m[0] = 1.0
    if n >= 1:
        m[1] = q
    for k in range(1, n):
        m[k + 1] = q * m[k] + k * (p2 - 1.0) * m[k - 1]

    weight = (sbar / s2) * np.exp(cbar) * w
    return (m @ weight) / hermite_norms_sq(n)


def heston_coeffs_fourier(params: HestonParams, t: float, a: float, b: float, n: int) -> np.ndarray:
    """Expansion coefficients of the Heston log-return density via Fourier pairing.

    With Psi(xi) = e^{-i b xi / a} cf(xi / a), using that h_k is an
    eigenfunction of the Fourier transform ((-i)^k eigenvalue),

        alpha_k = (-1)^{k/2} / (pi k! sqrt(2)) <Re Psi, h_k>        (k even)
        alpha_k = (-1)^{(k+3)/2} / (pi k! sqrt(2)) <Im Psi, h_k>    (k odd);

    Re Psi is even and Im Psi odd, so both inner products are taken as
    2 integral_0^R with R past the envelope cutoff.
    """
    r = _support_halfwidth(n)
    k = np.arange(n + 1)
    even = k % 2 == 0

    def integrand(xi):
        psi = complex(np.exp(-1j * b * xi / a) * heston_cf(params, t, xi / a))
        h = hermite_fn_all(n, xi)
        return h * np.where(even, psi.real, psi.imag)

    vals, _ = quad_vec(integrand, 0.0, r, epsabs=1e-12, epsrel=1e-10)
    sign = np.where(even, (-1.0) ** (k // 2), (-1.0) ** ((k + 3) // 2))
    return 2.0 * vals * sign * np.exp(-gammaln(k + 1.0)) / (math.pi * SQRT2)
