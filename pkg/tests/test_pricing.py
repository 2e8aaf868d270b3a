"""Put-pricing tests across all model families.

Oracles: the error-function form of the Black-Scholes price, direct payoff
quadrature against each model's own density, a seeded 10^7-path Monte Carlo
simulation of the variance-gamma return, and limit arguments (order-zero
expansion = lognormal; vanishing vol-of-vol or clock variance = Black-Scholes).
"""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from rndfit.density import (
    AdmissibilityError,
    HestonParams,
    VgParams,
    vg_drift,
    vg_log_return_density,
)
from rndfit.hermite import HermiteModel, model_from_density
from rndfit.pricing import (
    PutSpec,
    bs_put,
    corrected_price,
    hermite_partial_integrals,
    hermite_put,
    heston_put,
    heston_put_batch,
    vg_put,
    vg_put_batch,
)
from rndfit.specfun import hermite_fn

VG = VgParams(theta=0.1, sigma=0.3, alpha=2.0)
HESTON = HestonParams(v0=0.05, kappa=1.0, theta=0.1, eta=0.25, rho=-0.75)
SPEC = PutSpec(s0=1.0, k=1.0, r=0.05, q=0.02, t=1.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def payoff_quad_price(density, spec: PutSpec, lo: float) -> float:
    """e^{-qt} s0 * integral (kappa - e^x)+ density(x) dx, split at the kink."""
    kappa = spec.discounted_strike
    val, _ = quad(
        lambda x: (kappa - math.exp(x)) * density(x),
        lo,
        math.log(kappa),
        epsabs=1e-13,
        limit=400,
    )
    return spec.s0 * math.exp(-spec.q * spec.t) * val


class TestPutSpec:
    def test_positivity(self):
        with pytest.raises(ValueError):
            PutSpec(1.0, 0.0, 0.05, 0.0, 1.0)
        with pytest.raises(ValueError):
            PutSpec(1.0, 1.0, 0.05, 0.0, 0.0)
        with pytest.raises(ValueError):
            PutSpec(-1.0, 1.0, 0.05, 0.0, 1.0)
        with pytest.raises(ValueError):
            PutSpec(1.0, 1.0, -0.01, 0.0, 1.0)

    def test_discounted_strike(self):
        assert SPEC.discounted_strike == pytest.approx(math.exp(-0.03), rel=1e-15)


class TestBsPut:
    def test_atm_no_carry_anchor(self):
        # s0 = k = 1, r = q = 0: price = 2 Phi(sigma sqrt(t)/2) - 1
        spec = PutSpec(1.0, 1.0, 0.0, 0.0, 1.0)
        assert bs_put(spec, 0.2) == pytest.approx(math.erf(0.1 / math.sqrt(2.0)), rel=1e-14)

    def test_zero_vol_is_discounted_intrinsic(self):
        spec = PutSpec(1.0, 1.2, 0.05, 0.02, 1.0)
        want = 1.2 * math.exp(-0.05) - math.exp(-0.02)
        assert bs_put(spec, 0.0) == pytest.approx(want, rel=1e-15)
        assert bs_put(PutSpec(1.0, 0.5, 0.05, 0.02, 1.0), 0.0) == 0.0

    def test_put_call_parity(self):
        sigma = 0.27
        for k in (0.7, 1.0, 1.4):
            spec = PutSpec(1.0, k, 0.04, 0.01, 0.7)
            v = sigma * math.sqrt(spec.t)
            d1 = (math.log(spec.s0 / k) + (spec.r - spec.q + sigma ** 2 / 2) * spec.t) / v
            d2 = d1 - v
            phi = lambda z: 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
            call = spec.s0 * math.exp(-spec.q * spec.t) * phi(d1) - k * math.exp(
                -spec.r * spec.t
            ) * phi(d2)
            parity = call - spec.s0 * math.exp(-spec.q * spec.t) + k * math.exp(-spec.r * spec.t)
            assert bs_put(spec, sigma) == pytest.approx(parity, abs=1e-14)

    def test_lognormal_quadrature_oracle(self):
        sigma = 0.2
        density = lambda x: math.exp(-((x + sigma ** 2 / 2) ** 2) / (2 * sigma ** 2)) / (
            sigma * math.sqrt(2 * math.pi)
        )
        assert bs_put(SPEC, sigma) == pytest.approx(
            payoff_quad_price(density, SPEC, -3.0), rel=1e-10
        )

    def test_negative_vol_rejected(self):
        with pytest.raises(ValueError):
            bs_put(SPEC, -0.1)


class TestPartialIntegrals:
    def test_order_zero_anchors(self):
        i_vals, j_vals = hermite_partial_integrals(0, 0.0, 0.3, -0.045)
        assert i_vals[0] == pytest.approx(math.sqrt(2 * math.pi) / 2.0, rel=1e-14)
        want_j0 = math.sqrt(2 * math.pi) * math.exp(0.0) * 0.5  # b + a^2/2 = 0 here
        # Phi(z - a) at z = 0
        phi = 0.5 * (1.0 + math.erf(-0.3 / math.sqrt(2.0)))
        assert j_vals[0] == pytest.approx(math.sqrt(2 * math.pi) * phi, rel=1e-13)
        assert want_j0 > j_vals[0]  # sanity: truncation below the full integral

    def test_full_range_limits(self):
        i_vals, _ = hermite_partial_integrals(5, 40.0, 0.3, -0.045)
        # odd basis functions integrate to zero over the whole line
        assert abs(i_vals[1]) < 1e-300
        assert abs(i_vals[3]) < 1e-300
        assert i_vals[0] == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
        assert i_vals[2] == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)

    def test_quadrature_oracle(self):
        a, b, z = 0.3, -0.045, 1.2
        i_vals, j_vals = hermite_partial_integrals(5, z, a, b)
        for k in range(6):
            want_i, _ = quad(lambda x: hermite_fn(k, x), -30.0, z, epsabs=1e-13, limit=300)
            want_j, _ = quad(
                lambda x: math.exp(a * x + b) * hermite_fn(k, x), -30.0, z, epsabs=1e-13, limit=300
            )
            assert i_vals[k] == pytest.approx(want_i, abs=1e-10)
            assert j_vals[k] == pytest.approx(want_j, abs=1e-10)

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            hermite_partial_integrals(2, 0.0, 0.0, 0.0)


class TestHermitePut:
    def test_order_zero_is_black_scholes(self):
        # pinned order-0 model with alpha0 = 1/sqrt(2 pi) is exactly the
        # lognormal with sigma sqrt(t) = a
        for a in (0.15, 0.3, 0.45):
            model = HermiteModel("p", a, -a * a / 2.0, [INV_SQRT_2PI])
            for k in (0.8, 1.0, 1.25):
                spec = PutSpec(1.0, k, 0.05, 0.02, 0.7)
                want = bs_put(spec, a / math.sqrt(spec.t))
                assert hermite_put(model, spec) == pytest.approx(want, abs=1e-12)

    def test_payoff_quadrature_oracle(self, vg_grid):
        from rndfit.hermite import eval_model

        model = model_from_density(vg_grid, "m", 3)
        for k in (0.8, 1.0, 1.2):
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            want = payoff_quad_price(lambda x: float(eval_model(model, x)), spec, -6.0)
            assert hermite_put(model, spec) == pytest.approx(want, abs=1e-8)

    def test_tiny_strike_vanishes(self, vg_models):
        model = dict(vg_models)["h3m"]
        spec = PutSpec(1.0, 1e-8, 0.05, 0.02, 1.0)
        assert abs(hermite_put(model, spec)) < 1e-12

    def test_upper_bound(self, vg_models):
        for _, model in vg_models:
            for k in (0.6, 1.0, 1.5):
                spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
                assert hermite_put(model, spec) <= k * math.exp(-spec.r * spec.t) + 1e-12


class TestVgPut:
    def test_monte_carlo_oracle(self):
        rng = np.random.default_rng(123)
        n = 10 ** 7
        clock = rng.gamma(shape=VG.alpha * 1.0, scale=1.0 / VG.alpha, size=n)
        z = rng.standard_normal(n)
        x = VG.theta * clock + VG.sigma * np.sqrt(clock) * z + vg_drift(VG) * 1.0
        s = np.exp((0.05 - 0.02) * 1.0 + x)
        for k in (0.8, 1.0, 1.2):
            pay = math.exp(-0.05) * np.maximum(k - s, 0.0)
            mc = float(pay.mean())
            band = 3.0 * float(pay.std()) / math.sqrt(n)
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            assert abs(vg_put(VG, spec) - mc) < band

    def test_density_quadrature_oracle(self):
        for k in (0.8, 1.0, 1.2):
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            want = payoff_quad_price(lambda x: vg_log_return_density(VG, 1.0, x), spec, -8.0)
            assert vg_put(VG, spec) == pytest.approx(want, abs=1e-7)

    def test_static_bounds(self):
        for k in (0.5, 1.0, 2.0):
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            p = vg_put(VG, spec)
            lower = max(k * math.exp(-spec.r) - math.exp(-spec.q), 0.0)
            assert lower - 1e-10 <= p <= k * math.exp(-spec.r)

    def test_batch_matches_scalar(self):
        ks = np.array([0.8, 1.0, 1.2])
        batch = vg_put_batch(VG, 1.0, ks, 0.05, 0.02, 1.0)
        for k, b in zip(ks, batch):
            assert b == pytest.approx(vg_put(VG, PutSpec(1.0, k, 0.05, 0.02, 1.0)), abs=1e-14)

    def test_node_check_warns_when_under_resolved(self):
        # a short-maturity clock (shape ct = 0.1) needs many nodes
        with pytest.warns(RuntimeWarning, match="node-doubling"):
            vg_put(VG, PutSpec(1.0, 1.0, 0.0, 0.0, 0.05), nodes=4, check_nodes=True)
        # the default resolution is clean at the reference maturity
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            vg_put(VG, SPEC, nodes=128, check_nodes=True)

    def test_concentrated_clock_rejected(self):
        with pytest.raises(AdmissibilityError):
            vg_put(VgParams(0.0, 0.2, 400.0), SPEC)

    def test_converges_to_lognormal(self):
        # clock variance t/alpha -> 0 turns the model into Black-Scholes;
        # the gap decays like 1/alpha
        spec = PutSpec(1.0, 1.1, 0.03, 0.0, 1.0)
        gaps = [
            abs(vg_put(VgParams(0.0, 0.2, al), spec, nodes=160) - bs_put(spec, 0.2))
            for al in (10.0, 40.0, 160.0)
        ]
        assert gaps[2] < 1e-4
        assert gaps[0] / gaps[1] == pytest.approx(4.0, abs=1.0)
        assert gaps[1] / gaps[2] == pytest.approx(4.0, abs=1.0)


class TestHestonPut:
    def test_damping_invariance(self):
        for k in (0.8, 1.0, 1.2):
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            p1 = heston_put(HESTON, spec, alpha_damp=-1.5)
            p2 = heston_put(HESTON, spec, alpha_damp=-3.0)
            assert p1 == pytest.approx(p2, abs=1e-12)

    def test_density_quadrature_oracle(self, heston_grid):
        for k in (0.8, 1.0, 1.2):
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            kappa = spec.discounted_strike
            payoff = np.maximum(kappa - np.exp(heston_grid.x), 0.0)
            want = math.exp(-spec.q * spec.t) * float(
                np.trapezoid(payoff * heston_grid.f, heston_grid.x)
            )
            assert heston_put(HESTON, spec) == pytest.approx(want, abs=1e-7)

    def test_deep_itm_pins_to_forward_intrinsic(self):
        spec = PutSpec(1.0, 5.0, 0.05, 0.02, 1.0)
        want = 5.0 * math.exp(-0.05) - math.exp(-0.02)
        with warnings.catch_warnings():
            # the far-from-the-money phase factor trips scipy's roundoff
            # heuristic; accuracy is still asserted below
            from scipy.integrate import IntegrationWarning

            warnings.simplefilter("ignore", IntegrationWarning)
            assert heston_put(HESTON, spec) == pytest.approx(want, rel=1e-3)

    def test_shallow_damping_rejected(self):
        with pytest.raises(ValueError):
            heston_put(HESTON, SPEC, alpha_damp=-0.5)
        with pytest.raises(ValueError):
            heston_put_batch(HESTON, 1.0, [1.0], 0.05, 0.02, 1.0, alpha_damp=0.0)

    def test_batch_matches_scalar(self):
        ks = np.array([0.7, 0.9, 1.0, 1.1, 1.3])
        batch = heston_put_batch(HESTON, 1.0, ks, 0.05, 0.02, 1.0)
        for k, b in zip(ks, batch):
            assert b == pytest.approx(heston_put(HESTON, PutSpec(1.0, k, 0.05, 0.02, 1.0)), abs=1e-10)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_converges_to_lognormal(self):
        # vanishing vol-of-vol freezes the variance path at its mean;
        # the near-Gaussian tail trips scipy's roundoff heuristic only
        p = HestonParams(v0=0.05, kappa=1.0, theta=0.1, eta=1e-4, rho=0.0)
        iv = 0.1 + (0.05 - 0.1) * (1.0 - math.exp(-1.0))
        for k in (0.9, 1.1):
            spec = PutSpec(1.0, k, 0.03, 0.0, 1.0)
            assert heston_put(p, spec) == pytest.approx(bs_put(spec, math.sqrt(iv)), abs=1e-8)


class TestCrossModelShape:
    def test_strike_monotone_and_convex(self):
        ks = np.linspace(0.5, 1.6, 50)
        for prices in (
            vg_put_batch(VG, 1.0, ks, 0.05, 0.02, 1.0),
            heston_put_batch(HESTON, 1.0, ks, 0.05, 0.02, 1.0),
            np.array([bs_put(PutSpec(1.0, k, 0.05, 0.02, 1.0), 0.2) for k in ks]),
        ):
            diffs = np.diff(prices)
            assert np.all(diffs > -1e-12)
            assert np.all(np.diff(diffs) > -1e-8)

    def test_hermite_fit_tracks_its_target(self, heston_grid, heston_models):
        # an expansion with a few-percent density error reprices its target
        # within roughly half a cent per unit notional
        model = dict(heston_models)["h5m"]
        for k in (0.85, 1.0, 1.15):
            spec = PutSpec(1.0, k, 0.05, 0.02, 1.0)
            kappa = spec.discounted_strike
            payoff = np.maximum(kappa - np.exp(heston_grid.x), 0.0)
            target = math.exp(-spec.q * spec.t) * float(
                np.trapezoid(payoff * heston_grid.f, heston_grid.x)
            )
            assert hermite_put(model, spec) == pytest.approx(target, abs=5e-3)


class TestCorrectedPrice:
    def test_exact_anchor_is_identity(self):
        assert corrected_price(0.08, 0.05, 0.05, 1.2, 1.0) == 0.08

    def test_anchor_strike_recovers_observation(self):
        # at k = k0 the corrected price equals model + full residual
        assert corrected_price(0.08, 0.05, 0.06, 1.0, 1.0) == pytest.approx(0.09, rel=1e-15)

    def test_residual_scales_linearly_in_strike(self):
        lo = corrected_price(0.08, 0.05, 0.06, 0.5, 1.0)
        hi = corrected_price(0.08, 0.05, 0.06, 2.0, 1.0)
        assert lo == pytest.approx(0.085, rel=1e-15)
        assert hi == pytest.approx(0.10, rel=1e-15)

    def test_bad_anchor_rejected(self):
        with pytest.raises(ValueError):
            corrected_price(0.08, 0.05, 0.06, 1.0, 0.0)
