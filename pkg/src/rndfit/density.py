"""Risk-neutral log-return densities for the two parametric model families.

Both models are stated for the discounted, normalized price process
(S_0 = 1, zero dividend), so that S_t = exp(X_t) is a martingale with
E S_t = 1.  The variance-gamma density is available in closed form
through a Bessel function; the Heston density is recovered from its
characteristic function by FFT inversion on a uniform grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .specfun import SQRT_2PI, gauss_pdf, log_bessel_k

__all__ = [
    "VgParams",
    "HestonParams",
    "DensityGrid",
    "GridMoments",
    "vg_drift",
    "vg_density",
    "vg_density_mixture",
    "vg_log_return_density",
    "vg_moments",
    "heston_cf",
    "heston_variance_proxy",
    "heston_density_fft",
    "grid_moments",
    "gamma_quad_nodes",
]


class AdmissibilityError(ValueError):
    """Raised when model parameters violate a hard mathematical precondition."""


@dataclass(frozen=True)
class VgParams:
    """Variance-gamma parameters: Y_t = theta * G_t + sigma * W(G_t).

    The gamma subordinator G has shape rate c and decay rate alpha per
    unit time; c = alpha is hard-wired so that E G_t = t.
    """

    theta: float
    sigma: float
    alpha: float

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise AdmissibilityError(f"sigma must be > 0, got {self.sigma}")
        if self.alpha <= 0.0:
            raise AdmissibilityError(f"alpha must be > 0, got {self.alpha}")

    @property
    def c(self) -> float:
        return self.alpha

    def square_integrable(self, t: float) -> bool:
        """Sufficient condition for the density of Y_t to lie in L2."""
        return self.c * t > 0.25


@dataclass(frozen=True)
class HestonParams:
    """Heston parameters: dv = kappa (theta - v) dt + eta sqrt(v) dW."""

    v0: float
    kappa: float
    theta: float
    eta: float
    rho: float

    def __post_init__(self):
        for name in ("v0", "kappa", "theta", "eta"):
            if getattr(self, name) <= 0.0:
                raise AdmissibilityError(f"{name} must be > 0, got {getattr(self, name)}")
        if not -1.0 < self.rho < 1.0:
            raise AdmissibilityError(f"rho must lie in (-1, 1), got {self.rho}")

    @property
    def feller(self) -> bool:
        return 2.0 * self.kappa * self.theta > self.eta ** 2


def vg_drift(params: VgParams) -> float:
    """Martingale drift rate: X_t = Y_t + eta_drift * t makes exp(X) a martingale.

    eta_drift = c log(1 - (theta + sigma^2/2) / alpha); requires
    theta + sigma^2/2 < alpha.
    """
    load = params.theta + 0.5 * params.sigma ** 2
    if load >= params.alpha:
        raise AdmissibilityError(
            f"martingale admissibility requires theta + sigma^2/2 < alpha, "
            f"got {load} >= {params.alpha}"
        )
    return params.c * math.log1p(-load / params.alpha)


def gamma_quad_nodes(shape: float, rate: float, n: int):
    """Quadrature nodes/weights for integrals against the gamma density.

    Returns (s, w) with  integral_0^inf g(s) shape,rate-gamma-density ds
    ~= sum w_i g(s_i).  The s^(shape-1) factor is absorbed exactly into
    generalized Gauss-Laguerre (substituting u = rate * s), so endpoint
    singularities of the measure never meet the integrand.
    """
    if shape <= 0.0:
        raise AdmissibilityError(f"gamma shape must be > 0, got {shape}")
    if shape > 170.0:
        # the Laguerre weights carry a Gamma(shape) factor that overflows
        # double precision past ~170; such a concentrated clock is outside
        # the intended regime anyway
        raise AdmissibilityError(f"gamma shape must be <= 170, got {shape}")
    u, w = sp.roots_genlaguerre(n, shape - 1.0)
    return u / rate, w / math.exp(sp.gammaln(shape))


def vg_density(params: VgParams, t: float, x):
    """Density of Y_t (no drift) in closed form.

    f(x) = 2/(sigma sqrt(2 pi)) * alpha^(ct)/Gamma(ct) * exp(x theta/sigma^2)
           * (x^2/(theta^2 + 2 alpha sigma^2))^(ct/2 - 1/4)
           * K_{ct-1/2}(|x| sqrt(theta^2 + 2 alpha sigma^2) / sigma^2),

    evaluated in log space.  At x = 0 the closed form is an indeterminate
    0 * inf limit: +inf for ct <= 1/2 (integrable singularity), and for
    ct > 1/2 the mixture integral collapses to a gamma integral with the
    exact value

        f(0) = alpha^(ct) Gamma(ct - 1/2)
               / (Gamma(ct) sigma sqrt(2 pi) (alpha + theta^2/(2 sigma^2))^(ct - 1/2)).
    """
    th, sg, al = params.theta, params.sigma, params.alpha
    ct = params.c * t
    if ct <= 0.0:
        raise AdmissibilityError(f"need c * t > 0, got {ct}")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)

    lam = math.sqrt(th ** 2 + 2.0 * al * sg ** 2)
    nu = ct - 0.5
    out = np.empty_like(x)
    at0 = x == 0.0
    xi = np.abs(x[~at0]) * lam / sg ** 2

    log_f = (
        math.log(2.0) - math.log(sg) - 0.5 * math.log(2.0 * math.pi)
        + ct * math.log(al) - sp.gammaln(ct)
        + x[~at0] * th / sg ** 2
        + (ct - 0.5) * (np.log(np.abs(x[~at0])) - math.log(lam))
        + log_bessel_k(nu, xi)
    )
    out[~at0] = np.exp(log_f)
    if np.any(at0):
        if ct > 0.5:
            tilted_rate = al + th ** 2 / (2.0 * sg ** 2)
            out[at0] = math.exp(
                ct * math.log(al)
                - sp.gammaln(ct)
                + sp.gammaln(ct - 0.5)
                - (ct - 0.5) * math.log(tilted_rate)
            ) / (sg * math.sqrt(2.0 * math.pi))
        else:
            out[at0] = np.inf
    return out[0] if scalar else out


def vg_density_mixture(params: VgParams, t: float, x, nodes: int = 64):
    """Density of Y_t by quadrature of its gamma-mixture representation.

    f(x) = integral_0^inf phi((x - theta s)/(sigma sqrt(s))) / (sigma sqrt(s))
           d lambda_{ct, alpha}(s).

    Independent of the Bessel closed form; used as its cross-check.  The
    fixed-node rule converges slowly near x = 0, where the 1/sqrt(s) factor
    is not damped by the exponential; prefer vg_density there.
    """
    th, sg = params.theta, params.sigma
    x = np.asarray(x, dtype=float)
    s, w = gamma_quad_nodes(params.c * t, params.alpha, nodes)
    rt = sg * np.sqrt(s)
    vals = gauss_pdf((x[..., None] - th * s) / rt) / rt
    return vals @ w


def vg_log_return_density(params: VgParams, t: float, x):
    """Density of the martingale log return X_t = Y_t + vg_drift * t."""
    return vg_density(params, t, np.asarray(x, dtype=float) - vg_drift(params) * t)


def vg_moments(params: VgParams, t: float):
    """Exact mean and standard deviation of X_t = Y_t + drift * t.

    E Y_t = theta t (c = alpha), Var Y_t = (sigma^2 + theta^2/alpha) t.
    """
    mean = params.theta * t + vg_drift(params) * t
    var = (params.sigma ** 2 + params.theta ** 2 / params.alpha) * t
    return mean, math.sqrt(var)


def heston_cf(params: HestonParams, t: float, xi):
    """Characteristic function E exp(i xi log S_t) for the normalized process.

    Branch-safe variant: with beta = kappa - i eta rho xi, gamma = eta^2/2,
    half = -xi (xi + i) / 2, D = sqrt(beta^2 - 4 gamma half),
    G = (beta - D)/(beta + D),

        A = kappa theta / eta^2 * ((beta - D) t - 2 log((G e^{-Dt} - 1)/(G - 1)))
        B = (beta - D)/eta^2 * (1 - e^{-Dt}) / (1 - G e^{-Dt})

    and cf = exp(A + B v0).  The log argument stays clear of the negative
    real axis for all xi, so the principal branch is used unconditionally.
    Accepts complex xi (analytic continuation within the moment strip).
    """
    xi = np.asarray(xi)
    if not np.iscomplexobj(xi):
        xi = xi.astype(float)
    kp, th, et, rho, v0 = params.kappa, params.theta, params.eta, params.rho, params.v0
    beta = kp - 1j * et * rho * xi
    gamma = 0.5 * et ** 2
    half = -0.5 * xi * (xi + 1j)
    dd = np.sqrt(beta ** 2 - 4.0 * gamma * half)
    gg = (beta - dd) / (beta + dd)
    edt = np.exp(-dd * t)
    aa = kp * th / et ** 2 * ((beta - dd) * t - 2.0 * np.log((gg * edt - 1.0) / (gg - 1.0)))
    bb = (beta - dd) / et ** 2 * (1.0 - edt) / (1.0 - gg * edt)
    return np.exp(aa + bb * v0)


def heston_variance_proxy(params: HestonParams, t: float):
    """Gaussian-proxy mean/variance of log S_t from the expected variance path.

    integral_0^t E v_s ds = theta t + (v0 - theta)(1 - e^{-kappa t})/kappa;
    the proxy mean -(1/2) integral E v is in fact the exact mean of log S_t.
    """
    iv = params.theta * t + (params.v0 - params.theta) * (
        1.0 - math.exp(-params.kappa * t)
    ) / params.kappa
    return -0.5 * iv, iv


@dataclass(frozen=True)
class DensityGrid:
    """A density sampled on a uniform grid; the basic exchange format."""

    x: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if x.ndim != 1 or x.shape != f.shape or x.size < 2:
            raise ValueError("grid needs matching 1-d x and f with >= 2 points")
        dx = np.diff(x)
        if not np.allclose(dx, dx[0], rtol=1e-9, atol=0.0):
            raise ValueError("grid must be uniform")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def integral(self) -> float:
        return float(np.trapezoid(self.f, self.x))

    def check_mass(self, tol: float = 1e-3) -> None:
        mass = self.integral()
        if abs(mass - 1.0) > tol:
            raise AdmissibilityError(
                f"grid mass {mass:.6g} deviates from 1 by more than {tol:g}; "
                "widen the grid or refine it"
            )

    @classmethod
    def from_callable(cls, fn, center: float, halfwidth: float, n: int = 2 ** 14):
        x = np.linspace(center - halfwidth, center + halfwidth, n)
        return cls(x, np.asarray(fn(x), dtype=float))

    def to_text(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("x\tf\n")
            for xi, fi in zip(self.x, self.f):
                fh.write(f"{xi:.17g}\t{fi:.17g}\n")

    @classmethod
    def from_text(cls, path):
        data = np.loadtxt(path, skiprows=1)
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class GridMoments:
    mean: float
    std: float
    l1: float
    l2: float
    linf: float


def grid_moments(grid: DensityGrid) -> GridMoments:
    """Mean, standard deviation and L1/L2/Linf norms by trapezoid rule."""
    x, f = grid.x, grid.f
    mean = float(np.trapezoid(x * f, x))
    var = float(np.trapezoid((x - mean) ** 2 * f, x))
    return GridMoments(
        mean=mean,
        std=math.sqrt(max(var, 0.0)),
        l1=float(np.trapezoid(np.abs(f), x)),
        l2=math.sqrt(float(np.trapezoid(f * f, x))),
        linf=float(np.max(np.abs(f))),
    )


def heston_density_fft(
    params: HestonParams,
    t: float,
    n: int = 2 ** 14,
    width: float = 12.0,
    imag_tol: float = 1e-8,
) -> DensityGrid:
    """Density of log S_t by FFT inversion of the characteristic function.

    Grid of n points centered at the proxy mean with half-width
    width * proxy-std; the xi spacing is tied to the x grid by
    dxi = 2 pi / (n dx), which periodizes the density with period equal
    to the full grid width (negligible for width ~ 12).
    """
    if n < 16 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 16, got {n}")
    mean, var = heston_variance_proxy(params, t)
    sd = math.sqrt(var)
    x0 = mean - width * sd
    dx = 2.0 * width * sd / n
    dxi = 2.0 * math.pi / (n * dx)
    m = np.arange(n)
    xi = (m - n / 2) * dxi
    with warnings.catch_warnings():
        # overflow in exp of strongly damped CF values underflows to 0, fine
        warnings.simplefilter("ignore", RuntimeWarning)
        cf = heston_cf(params, t, xi)
    cf = np.where(np.isfinite(cf), cf, 0.0)
    g = cf * np.exp(-1j * xi * x0)
    vals = dxi / (2.0 * math.pi) * np.where(m % 2 == 0, 1.0, -1.0) * np.fft.fft(g)
    resid = float(np.max(np.abs(vals.imag)))
    if resid > imag_tol:
        raise AdmissibilityError(f"FFT imaginary residue {resid:.3g} exceeds {imag_tol:g}")
    grid = DensityGrid(x0 + m * dx, vals.real)
    grid.check_mass()
    return grid
