"""
Special Functions Module.

This module contains complex log-Gamma and Kummer's confluent hypergeometric
function ₁F₁(a; b; z) for the parameter family a = iδ, b = 2iδ used by the
exact stationary Wigner function, together with an independent ODE evaluator
used as an oracle.

All evaluators return logarithms where magnitudes can overflow: the matching
coefficients carry factors e^{±πδ/2} and the Ψ₁ branches grow like e^{±2√g|α|}.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from app.core.errors import (
    DomainTooSmall,
    NoConvergence,
    PoleAtNonPositiveInteger,
    StiffnessFailure,
)
from app.core.model import ModelParams

logger = logging.getLogger(__name__)

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

SERIES_TERM_CAP = 100_000

# fault injection for the acceptance suite: evaluate at −z
_SIGN_FAULT = {"active": False}


@dataclass(frozen=True)
class KummerParams:
    """
    Parameters of ₁F₁(a; b; z).

    Args:
        a: Numerator parameter
        b: Denominator parameter (not a non-positive integer)
        tol: Relative accuracy target
    """

    a: complex
    b: complex
    tol: float = 1e-15

    def __post_init__(self):
        if _is_nonpositive_integer(self.b):
            raise PoleAtNonPositiveInteger(f"b={self.b} is a pole of the series")

    @property
    def crossover(self) -> float:
        """Radius separating the series and the asymptotic evaluators."""
        return max(25.0, 4.0 * abs(self.b))

    @classmethod
    def for_model(cls, params: ModelParams) -> "KummerParams":
        return cls(a=1j * params.delta, b=2j * params.delta)


def _is_nonpositive_integer(z) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and float(z.real).is_integer()


def _ln_gamma_right(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 0.5
    z = z - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        series = series + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def ln_gamma(z):
    """
    Complex log-Gamma.

    Lanczos approximation for Re z ≥ 1/2 and the reflection formula
    Γ(z)Γ(1−z) = π / sin(πz) elsewhere. The imaginary part is only defined
    modulo 2π on the reflected half-plane; exp(ln_gamma(z)) is exact.

    Args:
        z: Complex scalar or array, not a non-positive integer

    Returns:
        ln Γ(z) with the same shape as ``z``

    Raises:
        PoleAtNonPositiveInteger: if any z is 0, −1, −2, ...
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    poles = (z_arr.imag == 0.0) & (z_arr.real <= 0.0) & (z_arr.real == np.round(z_arr.real))
    if np.any(poles):
        raise PoleAtNonPositiveInteger(f"Gamma has a pole at {z_arr[poles].ravel()[0]}")

    left = z_arr.real < 0.5
    out = np.empty_like(z_arr)
    out[~left] = _ln_gamma_right(z_arr[~left])
    if np.any(left):
        zl = z_arr[left]
        out[left] = np.log(np.pi) - np.log(np.sin(np.pi * zl)) - _ln_gamma_right(1.0 - zl)
    return out.reshape(np.shape(z)) if np.ndim(z) else complex(out[0])


def _rgamma_is_zero(z) -> bool:
    return _is_nonpositive_integer(z)


def _two_sum(a, b):
    # error-free transformation, componentwise for complex arrays
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _compensated_series(factor: Callable[[int], complex], x: np.ndarray, tol: float) -> np.ndarray:
    """Σ t_k with t_0 = 1, t_{k+1} = t_k·factor(k)·x, summed with error-free transformations."""
    total = np.ones_like(x)
    compensation = np.zeros_like(x)
    term = np.ones_like(x)
    quiet = np.zeros(x.shape, dtype=int)
    active = np.ones(x.shape, dtype=bool)

    for k in range(SERIES_TERM_CAP):
        term = np.where(active, term * factor(k) * x, 0.0)
        total, err = _two_sum(total, term)
        compensation = compensation + err
        small = np.abs(term) <= tol * np.abs(total + compensation)
        quiet = np.where(small, quiet + 1, 0)
        active &= quiet < 3
        if not np.any(active):
            logger.debug("series converged after %d terms", k + 1)
            return total + compensation
    raise NoConvergence(f"series did not converge within {SERIES_TERM_CAP} terms")


def kummer_series(kp: KummerParams, z):
    """
    Maclaurin series of ₁F₁(a; b; z) with compensated summation.

    Terminates per point once the last term is below ``kp.tol`` times the
    partial sum for three consecutive terms. Alternating sums lose digits to
    cancellation, so the series is never summed with Re z < 0:

    - b = 2a uses ₁F₁(a; 2a; z) = e^{z/2} ₀F₁(; a + ½; z²/16), whose
      cancellation grows like e^{|z|/2} instead of e^{|z|};
    - otherwise Re z < 0 goes through ₁F₁(a; b; z) = e^z ₁F₁(b−a; b; −z).

    Args:
        kp: Kummer parameters
        z: Complex scalar or array inside the series domain

    Returns:
        ₁F₁(a; b; z)

    Raises:
        NoConvergence: if the term cap is exceeded
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    a, b = kp.a, kp.b
    if b == 2.0 * a:
        c = a + 0.5
        reduced = _compensated_series(lambda k: 1.0 / ((c + k) * (k + 1)), z_arr**2 / 16.0, kp.tol)
        result = np.exp(z_arr / 2.0) * reduced
    else:
        flip = z_arr.real < 0
        result = np.empty_like(z_arr)
        if np.any(~flip):
            result[~flip] = _compensated_series(
                lambda k: (a + k) / ((b + k) * (k + 1)), z_arr[~flip], kp.tol
            )
        if np.any(flip):
            m = b - a
            result[flip] = np.exp(z_arr[flip]) * _compensated_series(
                lambda k: (m + k) / ((b + k) * (k + 1)), -z_arr[flip], kp.tol
            )
    return result.reshape(np.shape(z)) if np.ndim(z) else complex(result[0])


def _asymptotic_sum(p: complex, q: complex, w: np.ndarray, tol: float) -> np.ndarray:
    """Σ_k (p)_k (q)_k / (k! w^k), truncated at its smallest term."""
    total = np.ones_like(w)
    term = np.ones_like(w)
    best = np.full(w.shape, np.inf)
    active = np.ones(w.shape, dtype=bool)
    for k in range(SERIES_TERM_CAP):
        nxt = term * (p + k) * (q + k) / ((k + 1) * w)
        size = np.abs(nxt)
        grows = size >= best
        active &= ~grows
        total = np.where(active, total + nxt, total)
        best = np.where(active, size, best)
        term = nxt
        active &= size > tol * np.abs(total)
        if not np.any(active):
            break
    return total


def log_kummer_asymptotic(kp: KummerParams, z):
    """
    ln ₁F₁(a; b; z) from the large-|z| expansion

        Γ(b)/Γ(b−a) e^{−a log(−z)} S₁ + Γ(b)/Γ(a) e^{z + (a−b) log z} S₂,

    both series summed to their smallest term, principal logarithms,
    combined in log space.

    Raises:
        DomainTooSmall: if any |z| is below the crossover radius
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(np.abs(z_arr) < kp.crossover):
        raise DomainTooSmall(
            f"asymptotic expansion needs |z| >= {kp.crossover:.3g}, "
            f"got {np.abs(z_arr).min():.3g}"
        )
    a, b = kp.a, kp.b
    log_terms = []
    if not _rgamma_is_zero(b - a):
        s1 = _asymptotic_sum(a, 1.0 + a - b, -z_arr, kp.tol)
        log_terms.append(
            ln_gamma(b) - ln_gamma(b - a) - a * np.log(-z_arr) + np.log(s1)
        )
    if not _rgamma_is_zero(a):
        s2 = _asymptotic_sum(b - a, 1.0 - a, z_arr, kp.tol)
        log_terms.append(
            ln_gamma(b) - ln_gamma(a) + z_arr + (a - b) * np.log(z_arr) + np.log(s2)
        )
    result = log_add(*log_terms) if len(log_terms) > 1 else log_terms[0]
    return result.reshape(np.shape(z)) if np.ndim(z) else complex(result[0])


def kummer_asymptotic(kp: KummerParams, z):
    """₁F₁(a; b; z) for |z| above the crossover radius."""
    return np.exp(log_kummer_asymptotic(kp, z))


def log_add(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """ln(e^x + e^y) for complex logs without overflow."""
    m = np.maximum(x.real, y.real)
    return m + np.log(np.exp(x - m) + np.exp(y - m))


def log_kummer(kp: KummerParams, z):
    """
    ln ₁F₁(a; b; z) over the whole plane.

    Inside the crossover radius the series is used, outside the asymptotic
    expansion.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if _SIGN_FAULT["active"]:
        z_arr = -z_arr
    out = np.empty_like(z_arr)
    outer = np.abs(z_arr) >= kp.crossover

    if np.any(outer):
        out[outer] = log_kummer_asymptotic(kp, z_arr[outer])
    if np.any(~outer):
        out[~outer] = np.log(kummer_series(kp, z_arr[~outer]))
    return out.reshape(np.shape(z)) if np.ndim(z) else complex(out[0])


def hyp1f1(kp: KummerParams, z):
    """₁F₁(a; b; z) via :func:`log_kummer`."""
    return np.exp(log_kummer(kp, z))


def _series_start(params: ModelParams, r0: complex, direction: complex) -> Tuple[complex, complex]:
    # Ψ = Σ c_n α^n, c_{m+1} = 4G c_{m-1} / ((m+1)(ηm + 2iΔ)), c_0 = 1, c_1 = 0
    coeffs = [1.0 + 0j, 0.0 + 0j]
    for m in range(1, 12):
        coeffs.append(4.0 * params.G * coeffs[m - 1] / ((m + 1) * (params.eta * m + 2j * params.Delta)))
    alpha = r0 * direction
    value = sum(c * alpha**n for n, c in enumerate(coeffs))
    slope = sum(n * c * alpha ** (n - 1) for n, c in enumerate(coeffs) if n > 0)
    return value, slope


def psi1_ode_oracle(params: ModelParams, alpha: complex, rtol: float = 1e-10) -> complex:
    """
    Integrate αηΨ'' + 2iΔΨ' − 4αGΨ = 0 along the ray from 0 to α.

    The regular solution has Ψ(0) = 1 and Ψ'(0) = 0; the first steps away from
    the singular point α = 0 use its Taylor series.

    Args:
        params: Model parameters (Δ ≠ 0)
        alpha: End point
        rtol: Relative tolerance of the adaptive integrator

    Returns:
        Ψ₁(α) with the normalization Ψ₁(0) = 1

    Raises:
        StiffnessFailure: if the integrator fails
    """
    alpha = complex(alpha)
    radius = abs(alpha)
    if radius == 0.0:
        return 1.0 + 0j
    direction = alpha / radius
    r0 = min(1e-3, radius / 2)
    psi0, dpsi0 = _series_start(params, r0, direction)

    def rhs(r, y):
        a = r * direction
        psi, dpsi = y
        d2psi = (4.0 * a * params.G * psi - 2j * params.Delta * dpsi) / (a * params.eta)
        return [direction * dpsi, direction * d2psi]

    sol = solve_ivp(
        rhs,
        (r0, radius),
        np.array([psi0, dpsi0], dtype=complex),
        method="DOP853",
        rtol=rtol * 1e-2,
        atol=1e-300,
    )
    if not sol.success:
        raise StiffnessFailure(f"ODE oracle failed at |alpha|={radius}: {sol.message}")
    logger.debug("ODE oracle: %d rhs evaluations", sol.nfev)
    return complex(sol.y[0, -1])


@contextmanager
def sign_fault():
    """Corrupt :func:`log_kummer` by flipping the sign of its argument."""
    _SIGN_FAULT["active"] = True
    logger.warning("kummer sign fault injected")
    try:
        yield
    finally:
        _SIGN_FAULT["active"] = False
