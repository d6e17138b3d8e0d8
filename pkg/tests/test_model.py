import numpy as np
import pytest

from app.core.errors import CatronError, DegenerateGrid, NegativeDrive, NonPositiveEta
from app.core.model import (
    ModelParams,
    WignerGrid,
    alpha_of_xy,
    discriminant_root,
    make_grid,
    parse_grid_spec,
    trapezoid_mass,
    validate_params,
    xy_of_alpha,
)


@pytest.mark.parametrize("eta", [0.0, -1.0, np.nan])
def test_validate_rejects_non_positive_eta(eta):
    with pytest.raises(NonPositiveEta):
        validate_params(ModelParams(10.0, 7.0, eta))


def test_validate_rejects_negative_drive():
    with pytest.raises(NegativeDrive):
        validate_params(ModelParams(-1.0, 0.0, 1.0))


def test_errors_belong_to_families():
    assert issubclass(NonPositiveEta, ValueError)
    assert issubclass(NonPositiveEta, CatronError)


def test_validate_accepts_monostable():
    p = validate_params(ModelParams(3, 5, 1))
    assert not p.bistable
    assert isinstance(p.G, float)


def test_dimensionless_parameters(params):
    assert params.delta == 7.0
    assert params.g == 10.0
    scaled = params.scaled(2.5)
    assert scaled.delta == pytest.approx(params.delta)
    assert scaled.g == pytest.approx(params.g)
    assert params.barrier_scale == pytest.approx(np.sqrt(51.0))


def test_quadrature_maps_are_inverse():
    x, p = np.array([1.0, -2.0, 0.3]), np.array([0.5, 4.0, -1.0])
    x2, p2 = xy_of_alpha(alpha_of_xy(x, p))
    np.testing.assert_allclose(x2, x)
    np.testing.assert_allclose(p2, p)
    assert alpha_of_xy(np.sqrt(2.0), 0.0) == pytest.approx(1.0)


def test_discriminant_root_at_origin(params):
    assert discriminant_root(0j, params) == pytest.approx(7.0)


def test_discriminant_root_on_the_cut_has_negative_imaginary_part(params_zero_detuning):
    r = discriminant_root(1.0 + 0j, params_zero_detuning)
    assert r == pytest.approx(-1j * np.sqrt(40.0))


def test_discriminant_root_continuous_from_upper_half_plane(params):
    on_cut = discriminant_root(3.0 + 0j, params)
    above = discriminant_root(3.0 + 1e-9j, params)
    assert abs(on_cut - above) < 1e-6


def test_grid_shape_and_spacing():
    grid = make_grid(((-6, 6), (-3, 3)), 241, 121)
    assert grid.shape == (241, 121)
    assert grid.h_x == pytest.approx(0.05)
    assert grid.h_p == pytest.approx(0.05)
    X, P = grid.mesh()
    assert X[1, 0] - X[0, 0] == pytest.approx(0.05)
    assert P[0, 1] - P[0, 0] == pytest.approx(0.05)


@pytest.mark.parametrize(
    "bounds, n",
    [(((-1, 1), (-1, 1)), 2), (((1, 1), (-1, 1)), 11), (((-np.inf, 1), (-1, 1)), 11)],
)
def test_degenerate_grids(bounds, n):
    with pytest.raises(DegenerateGrid):
        make_grid(bounds, n, n)


def test_parse_grid_spec():
    grid = parse_grid_spec("-6:6:241,-5:5:201")
    assert (grid.n_x, grid.n_p) == (241, 201)
    assert grid.spec() == parse_grid_spec(grid.spec()).spec()
    with pytest.raises(DegenerateGrid):
        parse_grid_spec("nonsense")


def test_vacuum_wigner_has_unit_mass():
    grid = make_grid(((-6, 6), (-6, 6)), 241, 241)
    alpha = grid.alpha()
    values = 2.0 / np.pi * np.exp(-2.0 * np.abs(alpha) ** 2)
    assert trapezoid_mass(values, grid) == pytest.approx(1.0, abs=1e-10)


def test_neg_log_clips_non_positive_values(coarse_grid):
    values = np.full(coarse_grid.shape, np.exp(-3.0))
    values[0, 0] = 0.0
    values[1, 1] = -1.0
    out = WignerGrid(coarse_grid, values).neg_log(clip=30.0)
    assert out[0, 0] == 30.0
    assert out[1, 1] == 30.0
    assert out[2, 2] == pytest.approx(3.0)
