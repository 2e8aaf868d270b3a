"""Calibration tests: linear coefficient fits and the nonlinear model fits.

Oracles: synthetic quote blocks priced by a known generator (round-trip
recovery), normal-equation identities for the least-squares step, and the
martingale-constraint residuals in closed form.  Heston parameters are not
individually identifiable from one maturity, so recovery there is asserted
on prices and on the implied maturity density.
"""

import math
import warnings

import numpy as np
import pytest

from rndfit.bench import HESTON_TEST_PARAMS, OptionBlock, Quote, synthetic_chain
from rndfit.calib import (
    CalibrationResult,
    _design_matrix,
    _implied_vol_anchor,
    _lstsq_alpha,
    fit_bs,
    fit_hermite,
    fit_hermite_alpha,
    fit_vg,
    fit_heston,
    rel_errors,
)
from rndfit.density import HestonParams, VgParams, grid_moments, heston_density_fft
from rndfit.hermite import HermiteModel
from rndfit.pricing import PutSpec, bs_put, hermite_put, vg_put_batch, heston_put_batch

from datetime import date

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


VG_GEN = VgParams(theta=0.05, sigma=0.25, alpha=1.5)


@pytest.fixture(scope="module")
def bs_block():
    return synthetic_chain("bs", 0.2, 7)[2]  # the t = 1 block


@pytest.fixture(scope="module")
def vg_fitted():
    block = synthetic_chain("vg", VG_GEN, 21)[2]
    return block, fit_vg(block)


@pytest.fixture(scope="module")
def heston_fitted():
    block = synthetic_chain("heston", HESTON_TEST_PARAMS, 33)[2]
    return block, fit_heston(block)


def block_from(strikes, prices, volumes=None, *, t=1.0, spot=100.0, rate=0.01, q=0.0):
    volumes = volumes if volumes is not None else [10] * len(strikes)
    quotes = tuple(Quote(float(k), float(p), int(v)) for k, p, v in zip(strikes, prices, volumes))
    return OptionBlock(date(2012, 6, 1), max(int(round(t * 365)), 1), t, spot, rate, q, quotes)


class TestCalibrationResult:
    def test_negative_objective_rejected(self):
        with pytest.raises(ValueError):
            CalibrationResult(0.2, -1.0, 3, True, (90.0, 110.0))

    def test_to_dict_scalar_params(self):
        d = CalibrationResult(0.2, 0.5, 3, True, (90.0, 110.0), overfit=True).to_dict()
        assert d["params"] == 0.2
        assert d["overfit"] is True
        assert d["in_range"] == [90.0, 110.0]

    def test_to_dict_dataclass_params(self):
        p = VgParams(0.1, 0.3, 2.0)
        d = CalibrationResult(p, 0.5, 3, True, (90.0, 110.0)).to_dict()
        assert d["params"]["sigma"] == 0.3

    def test_to_dict_model_params(self):
        m = HermiteModel("p", 0.3, -0.045, [0.39, 0.01])
        d = CalibrationResult(m, 0.5, 3, True, (90.0, 110.0)).to_dict()
        assert d["params"]["flavor"] == "p"
        assert d["params"]["coeffs"] == [0.39, 0.01]


class TestRelErrors:
    def test_exact_fit_is_zero(self):
        assert np.all(rel_errors([1.0, 2.0], [1.0, 2.0]) == 0.0)

    def test_doubling_is_one(self):
        assert rel_errors([2.0, 4.0], [1.0, 2.0]) == pytest.approx([1.0, 1.0])

    def test_sign_insensitive(self):
        assert rel_errors([0.5], [1.0]) == pytest.approx([0.5])

    def test_nonpositive_observed_rejected(self):
        with pytest.raises(ValueError):
            rel_errors([1.0], [0.0])


class TestImpliedVolAnchor:
    def test_recovers_atm_vol(self, bs_block):
        assert _implied_vol_anchor(bs_block) == pytest.approx(0.2, abs=1e-9)

    def test_fallback_on_unattainable_price(self):
        # a put quoted above its arbitrage ceiling has no implied vol
        block = block_from([100.0], [150.0])
        assert _implied_vol_anchor(block) == 0.3


class TestFitHermiteAlpha:
    def make_generator_block(self):
        model = HermiteModel("p", 0.3, -0.045, [INV_SQRT_2PI, 0.02, -0.01])
        strikes = [85.0, 100.0, 115.0]
        prices = [
            hermite_put(model, PutSpec(100.0, k, 0.01, 0.0, 1.0)) for k in strikes
        ]
        return model, block_from(strikes, prices)

    def test_square_system_interpolates_exactly(self):
        model, block = self.make_generator_block()
        alpha = fit_hermite_alpha(block, model.a, model.b, 2)
        assert alpha == pytest.approx(model.coeffs, abs=1e-10)
        design = _design_matrix(block, model.a, model.b, 2)
        assert np.max(np.abs(design @ alpha - 1.0)) < 1e-12

    def test_overdetermined_satisfies_normal_equations(self, bs_block):
        a, b = 0.2, -0.02
        alpha = fit_hermite_alpha(bs_block, a, b, 2)
        design = _design_matrix(bs_block, a, b, 2)
        grad = design.T @ (design @ alpha - 1.0)
        assert np.max(np.abs(grad)) < 1e-10

    def test_price_scaling_equivariance(self, bs_block):
        # scaling all observed prices by a constant scales the coefficients
        # and leaves the relative pricing errors unchanged
        lam = 3.7
        scaled = bs_block.with_quotes(
            Quote(q.strike, lam * q.put_price, q.volume) for q in bs_block.quotes
        )
        a, b = 0.2, -0.02
        alpha = fit_hermite_alpha(bs_block, a, b, 2)
        alpha_scaled = fit_hermite_alpha(scaled, a, b, 2)
        assert alpha_scaled == pytest.approx(lam * alpha, rel=1e-9)
        res = _design_matrix(bs_block, a, b, 2) @ alpha - 1.0
        res_scaled = _design_matrix(scaled, a, b, 2) @ alpha_scaled - 1.0
        assert res_scaled == pytest.approx(res, abs=1e-12)

    def test_under_identified_warns(self):
        _, block = self.make_generator_block()  # 3 quotes
        with pytest.warns(RuntimeWarning, match="identifies"):
            fit_hermite_alpha(block, 0.3, -0.045, 4)


class TestFitBs:
    def test_round_trip(self, bs_block):
        sigma, result = fit_bs(bs_block)
        assert sigma == pytest.approx(0.2, abs=1e-8)
        assert result.objective < 1e-8
        assert result.converged
        assert not result.overfit

    def test_strike_span_recorded(self, bs_block):
        _, result = fit_bs(bs_block)
        ks = bs_block.strikes
        assert result.in_range == (float(ks[0]), float(ks[-1]))

    def test_deterministic(self, bs_block):
        s1, r1 = fit_bs(bs_block)
        s2, r2 = fit_bs(bs_block)
        assert s1 == s2
        assert r1.objective == r2.objective and r1.iterations == r2.iterations


class TestFitHermite:
    def test_order_zero_pinned_on_lognormal_block(self, bs_block):
        # the order-0 pinned expansion is exactly Black-Scholes, so the
        # fitted scale must equal sigma sqrt(t)
        model, result = fit_hermite(bs_block, 0, "p")
        assert model.a == pytest.approx(0.2 * math.sqrt(bs_block.t), abs=1e-6)
        assert model.coeffs[0] == pytest.approx(INV_SQRT_2PI, rel=1e-8)
        assert result.objective < 1e-8
        assert result.converged

    def test_never_worse_than_initial_point(self):
        vg_block = synthetic_chain("vg", VgParams(0.1, 0.3, 2.0), 11)[2]
        model, result = fit_hermite(vg_block, 2, "p")
        a0 = _implied_vol_anchor(vg_block) * math.sqrt(vg_block.t)
        design = _design_matrix(vg_block, a0, -0.5 * a0 ** 2, 2)
        alpha0, _ = _lstsq_alpha(design)
        initial = float(np.sum(np.abs(design @ alpha0 - 1.0)))
        assert result.objective <= initial + 1e-14

    def test_constrained_flavor_holds_constraints(self):
        vg_block = synthetic_chain("vg", VgParams(0.1, 0.3, 2.0), 11)[2]
        model, result = fit_hermite(vg_block, 3, "m")
        res = model.constraint_residuals()
        assert abs(res[0]) < 1e-10 and abs(res[1]) < 1e-10
        # the constrained optimum cannot beat the unconstrained one
        _, free_result = fit_hermite(vg_block, 3, "p")
        assert result.objective >= free_result.objective - 1e-12

    def test_free_flavor_unpins_location(self):
        vg_block = synthetic_chain("vg", VgParams(0.1, 0.3, 2.0), 11)[2]
        model, result = fit_hermite(vg_block, 2, "free")
        assert result.converged
        assert abs(model.b + 0.5 * model.a ** 2) > 1e-8  # actually moved off the pin

    def test_overfit_flagged(self):
        strikes = [90.0, 110.0]
        prices = [bs_put(PutSpec(100.0, k, 0.01, 0.0, 1.0), 0.2) for k in strikes]
        block = block_from(strikes, prices)
        with pytest.warns(RuntimeWarning, match="identifies"):
            model, result = fit_hermite(block, 3, "p")
        assert result.overfit
        assert model.dof == 5 > block.size

    def test_unknown_flavor_rejected(self, bs_block):
        with pytest.raises(ValueError):
            fit_hermite(bs_block, 2, "q")


class TestFitVg:
    def test_parameter_round_trip(self, vg_fitted):
        _, (params, result) = vg_fitted
        assert params.theta == pytest.approx(VG_GEN.theta, rel=5e-3)
        assert params.sigma == pytest.approx(VG_GEN.sigma, rel=5e-3)
        assert params.alpha == pytest.approx(VG_GEN.alpha, rel=5e-3)
        assert result.converged
        assert result.objective < 1e-6

    def test_sigma_floor_respected(self, vg_fitted):
        _, (params, _) = vg_fitted
        assert params.sigma >= 0.05

    def test_objective_is_reported_l1(self, vg_fitted):
        block, (params, result) = vg_fitted
        prices = vg_put_batch(
            params, block.spot, block.strikes, block.rate, block.dividend_yield, block.t
        )
        recomputed = float(np.sum(rel_errors(prices, block.put_prices)))
        assert result.objective == pytest.approx(recomputed, rel=1e-12)

    def test_deterministic(self):
        block = synthetic_chain("vg", VG_GEN, 21)[2]
        p1, r1 = fit_vg(block)
        p2, r2 = fit_vg(block)
        assert (p1.theta, p1.sigma, p1.alpha) == (p2.theta, p2.sigma, p2.alpha)
        assert r1.objective == r2.objective

    def test_overfit_flagged_and_admissible(self):
        strikes = [90.0, 110.0]
        prices = vg_put_batch(VG_GEN, 100.0, np.array(strikes), 0.01, 0.0, 1.0)
        block = block_from(strikes, prices)
        params, result = fit_vg(block)
        assert result.overfit
        assert params.theta + 0.5 * params.sigma ** 2 < params.alpha


class TestFitHeston:
    def test_prices_recovered(self, heston_fitted):
        block, (params, result) = heston_fitted
        assert result.converged
        # ten strikes, summed relative errors: a near-interpolating fit
        assert result.objective < 1e-3

    def test_parameters_admissible(self, heston_fitted):
        _, (params, _) = heston_fitted
        assert -1.0 < params.rho < 1.0
        assert params.v0 > 0 and params.kappa > 0 and params.theta > 0 and params.eta > 0

    def test_maturity_density_recovered(self, heston_fitted):
        # individual parameters are not identifiable from one maturity, but
        # the maturity density they imply is pinned by the quotes
        block, (params, _) = heston_fitted
        g_true = heston_density_fft(HESTON_TEST_PARAMS, block.t)
        g_fit = heston_density_fft(params, block.t)
        interp = np.interp(g_true.x, g_fit.x, g_fit.f)
        gap = np.abs(g_true.f - interp)
        rel_l2 = math.sqrt(float(np.trapezoid(gap ** 2, g_true.x))) / grid_moments(g_true).l2
        assert rel_l2 < 5e-3

    def test_objective_is_reported_l1(self, heston_fitted):
        block, (params, result) = heston_fitted
        prices = heston_put_batch(
            params, block.spot, block.strikes, block.rate, block.dividend_yield, block.t
        )
        recomputed = float(np.sum(rel_errors(prices, block.put_prices)))
        assert result.objective == pytest.approx(recomputed, rel=1e-12)

    def test_feller_warning_consistent(self):
        gen = HestonParams(v0=0.04, kappa=0.3, theta=0.04, eta=0.9, rho=-0.6)
        assert not gen.feller
        block = synthetic_chain("heston", gen, 44)[2]
        with warnings.catch_warnings(record=True) as rec:
            warnings.simplefilter("always")
            params, _ = fit_heston(block)
        feller_warned = any("Feller" in str(w.message) for w in rec)
        assert feller_warned == (not params.feller)

    def test_overfit_flagged(self):
        strikes = [80.0, 95.0, 105.0, 120.0]
        prices = heston_put_batch(HESTON_TEST_PARAMS, 100.0, np.array(strikes), 0.01, 0.0, 1.0)
        block = block_from(strikes, prices)
        _, result = fit_heston(block)
        assert result.overfit  # four quotes cannot pin five parameters
