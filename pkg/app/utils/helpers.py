"""
Helper Functions Module.

This module contains the finite-difference and quadrature helpers shared by the
compute modules: Wirtinger derivatives on phase grids and at points, interior
windows and convergence-order estimates.
"""

from typing import Callable, Tuple

import numpy as np

SQRT2 = np.sqrt(2.0)


def grid_d_alpha(values: np.ndarray, h_x: float, h_p: float) -> np.ndarray:
    """
    Wirtinger derivative ∂/∂α on an (x, p) grid with α = (x + ip)/√2.

    ∂/∂α = (∂_x − i ∂_p)/√2, second-order centered differences in the interior.
    """
    d_x = np.gradient(values, h_x, axis=0, edge_order=2)
    d_p = np.gradient(values, h_p, axis=1, edge_order=2)
    return (d_x - 1j * d_p) / SQRT2


def grid_d_alpha_bar(values: np.ndarray, h_x: float, h_p: float) -> np.ndarray:
    """Wirtinger derivative ∂/∂ᾱ = (∂_x + i ∂_p)/√2 on an (x, p) grid."""
    d_x = np.gradient(values, h_x, axis=0, edge_order=2)
    d_p = np.gradient(values, h_p, axis=1, edge_order=2)
    return (d_x + 1j * d_p) / SQRT2


def point_wirtinger(
    func: Callable[[complex], complex], alpha: complex, h: float = 1e-6
) -> Tuple[complex, complex]:
    """
    Wirtinger derivatives (∂f/∂α, ∂f/∂ᾱ) of a function of one complex
    variable by centered differences in Re α and Im α.
    """
    d_re = (func(alpha + h) - func(alpha - h)) / (2 * h)
    d_im = (func(alpha + 1j * h) - func(alpha - 1j * h)) / (2 * h)
    return 0.5 * (d_re - 1j * d_im), 0.5 * (d_re + 1j * d_im)


def interior(values: np.ndarray, margin: int) -> np.ndarray:
    """Drop ``margin`` nodes on every side of a 2D array."""
    rows, cols = values.shape
    return values[margin : rows - margin, margin : cols - margin]


def convergence_order(errors, ratio=2.0) -> np.ndarray:
    """Observed orders log(e_k / e_{k+1}) / log(ratio) of a refinement sequence (ratio may vary per step)."""
    errors = np.asarray(errors, dtype=float)
    return np.log(errors[:-1] / errors[1:]) / np.log(ratio)


def relative_error(approx, exact) -> np.ndarray:
    exact = np.asarray(exact)
    return np.abs(np.asarray(approx) - exact) / np.abs(exact)
