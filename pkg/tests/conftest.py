"""Shared fixtures."""

import pytest

from app.core.model import ModelParams, make_grid


@pytest.fixture
def params():
    """Default bistable profile G=10, Δ=7, η=1."""
    return ModelParams(G=10.0, Delta=7.0, eta=1.0)


@pytest.fixture
def params_zero_detuning():
    return ModelParams(G=10.0, Delta=0.0, eta=1.0)


@pytest.fixture
def small_params():
    """Cheap bistable set for Fock-space checks."""
    return ModelParams(G=4.0, Delta=2.0, eta=1.0, fock_cutoff=30)


@pytest.fixture
def coarse_grid():
    return make_grid(((-6.0, 6.0), (-6.0, 6.0)), 61, 61)
