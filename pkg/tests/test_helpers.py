import numpy as np
import pytest

from app.core.model import make_grid
from app.utils.helpers import (
    convergence_order,
    grid_d_alpha,
    grid_d_alpha_bar,
    interior,
    point_wirtinger,
    relative_error,
)


def test_grid_wirtinger_of_polynomials():
    grid = make_grid(((-2, 2), (-2, 2)), 41, 41)
    alpha = grid.alpha()
    f = alpha**2 * alpha.conj()
    d_a = interior(grid_d_alpha(f, grid.h_x, grid.h_p), 2)
    d_ab = interior(grid_d_alpha_bar(f, grid.h_x, grid.h_p), 2)
    inner = interior(alpha, 2)
    np.testing.assert_allclose(d_a, 2 * inner * inner.conj(), atol=0.05)
    np.testing.assert_allclose(d_ab, inner**2, atol=0.05)


@pytest.mark.parametrize("margin, shape", [(0, (5, 7)), (1, (3, 5)), (2, (1, 3))])
def test_interior_margins(margin, shape):
    values = np.arange(35.0).reshape(5, 7)
    assert interior(values, margin).shape == shape


def test_point_wirtinger_holomorphic():
    d_a, d_ab = point_wirtinger(lambda z: z**3, 1.0 + 2.0j)
    assert d_a == pytest.approx(3 * (1.0 + 2.0j) ** 2, rel=1e-8)
    assert abs(d_ab) < 1e-6


def test_convergence_order():
    np.testing.assert_allclose(convergence_order([1.0, 0.25, 0.0625]), [2.0, 2.0])
    np.testing.assert_allclose(convergence_order([1.0, 1 / 27], ratio=3.0), [3.0])


def test_relative_error():
    np.testing.assert_allclose(relative_error([1.1, 1.8], [1.0, 2.0]), [0.1, 0.1])
