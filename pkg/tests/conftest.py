"""Shared fixtures: test densities and fitted model suites, built once."""

import pytest

from rndfit.bench import (
    HESTON_TEST_PARAMS,
    VG_TEST_PARAMS,
    reference_density,
    reference_models,
)


@pytest.fixture(scope="session")
def vg_params():
    return VG_TEST_PARAMS


@pytest.fixture(scope="session")
def heston_params():
    return HESTON_TEST_PARAMS


@pytest.fixture(scope="session")
def vg_grid():
    """Log-return density grid of the variance-gamma test model at t = 1."""
    return reference_density("vg")


@pytest.fixture(scope="session")
def heston_grid():
    """Log-return density grid of the Heston test model at t = 1."""
    return reference_density("heston")


@pytest.fixture(scope="session")
def vg_models(vg_grid):
    """Labeled Hermite fits to the variance-gamma test density."""
    return reference_models("vg", vg_grid)


@pytest.fixture(scope="session")
def heston_models(heston_grid):
    """Labeled Hermite fits to the Heston test density."""
    return reference_models("heston", heston_grid)
