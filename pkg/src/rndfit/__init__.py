"""Risk-neutral density estimation and European put pricing.

Hermite-function expansions of log-return densities, cross-validated
against the variance-gamma and Heston model families, with calibration
and benchmark harnesses.
"""

from .bench import (
    HESTON_TEST_PARAMS,
    VG_TEST_PARAMS,
    ErrorReport,
    Estimator,
    LooReport,
    OptionBlock,
    Quote,
    clean_dataset,
    corrected_experiment,
    density_error_table,
    loo_experiment,
    make_estimator,
    model_put_prices,
    pricing_error_stats,
    reference_density,
    reference_models,
    synth_strikes,
    synthetic_chain,
    synthetic_pricing_experiment,
    target_put_prices,
)
from .calib import (
    CalibrationResult,
    fit_bs,
    fit_heston,
    fit_hermite,
    fit_hermite_alpha,
    fit_vg,
    rel_errors,
)
from .density import (
    AdmissibilityError,
    DensityGrid,
    GridMoments,
    HestonParams,
    VgParams,
    gamma_quad_nodes,
    grid_moments,
    heston_cf,
    heston_density_fft,
    heston_variance_proxy,
    vg_density,
    vg_density_mixture,
    vg_drift,
    vg_log_return_density,
    vg_moments,
)
from .hermite import (
    ConstraintSystem,
    HermiteModel,
    coeffs_from_density,
    constrained_project,
    constraint_rows,
    default_scale_location,
    eval_model,
    gaussian_product,
    heston_coeffs_fourier,
    l2_error,
    martingale_system,
    model_from_density,
    optimize_scale_location,
    vg_coeffs_gamma_measure,
)
from .pricing import (
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

__all__ = [
    "AdmissibilityError",
    "CalibrationResult",
    "ConstraintSystem",
    "DensityGrid",
    "ErrorReport",
    "Estimator",
    "GridMoments",
    "HermiteModel",
    "HestonParams",
    "LooReport",
    "OptionBlock",
    "PutSpec",
    "Quote",
    "VgParams",
    "bs_put",
    "clean_dataset",
    "coeffs_from_density",
    "constrained_project",
    "constraint_rows",
    "corrected_experiment",
    "corrected_price",
    "default_scale_location",
    "density_error_table",
    "eval_model",
    "fit_bs",
    "fit_heston",
    "fit_hermite",
    "fit_hermite_alpha",
    "fit_vg",
    "gamma_quad_nodes",
    "gaussian_product",
    "grid_moments",
    "hermite_partial_integrals",
    "hermite_put",
    "heston_cf",
    "heston_coeffs_fourier",
    "heston_density_fft",
    "heston_put",
    "heston_put_batch",
    "heston_variance_proxy",
    "l2_error",
    "loo_experiment",
    "make_estimator",
    "martingale_system",
    "model_from_density",
    "model_put_prices",
    "optimize_scale_location",
    "pricing_error_stats",
    "reference_density",
    "reference_models",
    "rel_errors",
    "synth_strikes",
    "synthetic_chain",
    "synthetic_pricing_experiment",
    "target_put_prices",
    "vg_coeffs_gamma_measure",
    "vg_density",
    "vg_density_mixture",
    "vg_drift",
    "vg_log_return_density",
    "vg_moments",
    "vg_put",
    "vg_put_batch",
]

__version__ = "0.1.0"
