"""
Analytic Wigner Module.

This module contains the exact factorized stationary Wigner function
W₀ = e^{−2|α|²} |Ψ₁(α)|², the two WKB branches of Ψ with their matched
coefficients, and the effective phase-space potential Φ with W₀ ≈ e^{−Φ}.

Every amplitude is handled as a complex logarithm. The square root
r = √(Δ² − 4ηGα²) is :func:`app.core.model.discriminant_root`, the same
function the instanton module uses.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np

from app.core.errors import (
    BranchCutProximity,
    MassDeficient,
    NotBistable,
    TurningPointProximity,
)
from app.core.model import (
    SQRT2,
    ModelParams,
    PhaseGrid,
    WignerGrid,
    discriminant_root,
    make_grid,
)
from app.core.specfun import KummerParams, ln_gamma, log_add, log_kummer

logger = logging.getLogger(__name__)

TURNING_POINT_EXCLUSION = 1e-3
MASS_TOLERANCE = 1e-6
NEG_LOG_CLIP = 30.0


def _log_cosh(z: np.ndarray) -> np.ndarray:
    z = np.where(z.real < 0, -z, z)
    return z - np.log(2.0) + np.log1p(np.exp(-2.0 * z))


def psi1_log_exact(alpha, params: ModelParams):
    """
    ln Ψ₁(α) = 2√g α + ln ₁F₁(iδ; 2iδ; −4√g α), normalized to Ψ₁(0) = 1.

    At Δ = 0 the regular solution is cosh(2√g α).

    Args:
        alpha: Complex scalar or array
        params: Model parameters

    Returns:
        Complex log amplitude (imaginary part defined modulo 2π)
    """
    a = np.asarray(alpha, dtype=complex)
    sqrt_g = np.sqrt(params.g)
    if params.Delta == 0.0:
        out = _log_cosh(2.0 * sqrt_g * a)
    else:
        kp = KummerParams.for_model(params)
        out = 2.0 * sqrt_g * a + log_kummer(kp, -4.0 * sqrt_g * a)
    return out if np.ndim(alpha) else complex(out)


def psi1_exact(alpha, params: ModelParams):
    """Ψ₁(α) itself; overflows for large |α|, prefer :func:`psi1_log_exact`."""
    return np.exp(psi1_log_exact(alpha, params))


def psi2_exact(alpha_bar, params: ModelParams):
    """Ψ₂(ᾱ) = conj(Ψ₁(conj ᾱ))."""
    return np.conj(psi1_exact(np.conj(alpha_bar), params))


def normalize_wigner(wg: WignerGrid, tolerance: float = MASS_TOLERANCE) -> WignerGrid:
    """
    Rescale a Wigner grid so that ∫ W d²α = 1.

    The mass outside the grid is bounded by the boundary values under the
    Gaussian envelope e^{−2|α|²}: ∫_{|α|>R} e^{−2(|α|²−R²)} d²α = π/2.

    Raises:
        MassDeficient: if the estimated tail mass exceeds ``tolerance``
    """
    values = wg.values
    mass = wg.mass()
    edge = np.concatenate([values[0], values[-1], values[:, 0], values[:, -1]])
    tail = 0.5 * np.pi * np.nanmax(np.abs(edge))
    if not np.isfinite(mass) or mass <= 0:
        raise MassDeficient(f"Wigner mass on the grid is {mass}")
    if tail / mass > tolerance:
        raise MassDeficient(f"estimated mass outside the grid {tail / mass:.3e} > {tolerance}")
    log_norm = (wg.log_norm or 0.0) - np.log(mass)
    return WignerGrid(wg.grid, values / mass, wg.weight, log_norm, dict(wg.meta))


def normalization_grid(params: ModelParams, spacing: float = 0.05) -> PhaseGrid:
    """Square grid wide enough for the Gaussian tails beyond both attractors."""
    extent = float(SQRT2 * (np.sqrt(max(params.g, 0.0)) + 4.0))
    n = int(np.ceil(2.0 * extent / spacing)) + 1
    return make_grid(((-extent, extent), (-extent, extent)), n, n)


def _log_w_exact(alpha, params: ModelParams) -> np.ndarray:
    return -2.0 * np.abs(alpha) ** 2 + 2.0 * psi1_log_exact(alpha, params).real


def _log_w_potential(alpha, params: ModelParams) -> np.ndarray:
    return -effective_potential(alpha, params)


def _log_norm(log_w: np.ndarray, grid: PhaseGrid) -> float:
    shift = float(np.max(log_w))
    wg = WignerGrid(grid, np.exp(log_w - shift), log_norm=-shift)
    return float(normalize_wigner(wg).log_norm)


@lru_cache(maxsize=32)
def exact_log_norm(params: ModelParams) -> float:
    """ln 𝒩² such that e^{−2|α|²}|Ψ₁|² 𝒩² integrates to one (Ψ₁(0) = 1)."""
    grid = normalization_grid(params)
    value = _log_norm(_log_w_exact(grid.alpha(), params), grid)
    logger.debug("exact normalization for %s: %.12g", params, value)
    return value


@lru_cache(maxsize=32)
def potential_log_norm(params: ModelParams) -> float:
    grid = normalization_grid(params)
    return _log_norm(_log_w_potential(grid.alpha(), params), grid)


def wigner_exact(params: ModelParams, grid: PhaseGrid, normalize: bool = True) -> WignerGrid:
    """
    Exact stationary Wigner function on a grid.

    The normalization is fixed once per parameter set on
    :func:`normalization_grid`, so any sub-window of phase space can be sampled.

    Args:
        params: Model parameters
        grid: Sampling grid
        normalize: Apply the normalization; otherwise the values are scaled to a
            unit maximum

    Returns:
        WignerGrid whose ``log_norm`` is the log factor relating the stored
        values to e^{−2|α|²}|Ψ₁|² with Ψ₁(0) = 1
    """
    log_w = _log_w_exact(grid.alpha(), params)
    log_norm = exact_log_norm(params) if normalize else -float(np.max(log_w))
    return WignerGrid(grid, np.exp(log_w + log_norm), log_norm=log_norm, meta={"source": "exact"})


@dataclass(frozen=True)
class BranchFunction:
    """
    One WKB branch Ψ± ≈ A±(α) exp(φ₀,±(α)/η).

    With z = α√η and r = √(Δ² − 4ηGα²):
        φ₀,± = ∓ir − iΔ ln((r ∓ Δ)/η),   φ₀,±′ = −i(Δ ± r)/z,
        A₊ = √((r − Δ)/r),   A₋ = √((r + Δ)/r).
    """

    params: ModelParams
    branch: str

    def __post_init__(self):
        if self.branch not in ("plus", "minus"):
            raise ValueError(f"branch must be 'plus' or 'minus', got {self.branch}")

    @property
    def sign(self) -> int:
        return 1 if self.branch == "plus" else -1

    def sqrt_term(self, alpha):
        return discriminant_root(alpha, self.params)

    def phi0(self, alpha):
        r = self.sqrt_term(alpha)
        D, eta = self.params.Delta, self.params.eta
        log_part = np.log((r - self.sign * D) / eta) if D != 0.0 else 0.0
        return -self.sign * 1j * r - 1j * D * log_part

    def dphi0_dz(self, alpha):
        alpha = np.asarray(alpha, dtype=complex)
        z = alpha * np.sqrt(self.params.eta)
        return -1j * (self.params.Delta + self.sign * self.sqrt_term(alpha)) / z

    def log_amplitude(self, alpha):
        r = self.sqrt_term(alpha)
        return 0.5 * np.log((r - self.sign * self.params.Delta) / r)

    def eikonal_residual(self, alpha, h: float = 1e-6):
        """−4Gz + 2iΔφ₀′ + z(φ₀′)² with φ₀′ by centered differences in z."""
        alpha = np.asarray(alpha, dtype=complex)
        eta = self.params.eta
        z = alpha * np.sqrt(eta)
        dz = h * np.sqrt(eta)
        d = (self.phi0(alpha + h) - self.phi0(alpha - h)) / (2 * dz)
        return -4.0 * self.params.G * z + 2j * self.params.Delta * d + z * d**2

    def log_psi(self, alpha):
        return self.log_amplitude(alpha) + self.phi0(alpha) / self.params.eta


def turning_point_mask(alpha, params: ModelParams, exclusion: float = TURNING_POINT_EXCLUSION):
    """True where |Δ² − 4ηGα²| < exclusion·Δ² or α = 0."""
    alpha = np.asarray(alpha, dtype=complex)
    radicand = params.Delta**2 - 4.0 * params.eta * params.G * alpha**2
    scale = params.Delta**2 if params.Delta != 0.0 else params.G * params.eta
    return (np.abs(radicand) < exclusion * scale) | (alpha == 0)


def turning_points(params: ModelParams) -> np.ndarray:
    """The two points α = ±Δ/(2√(ηG)) where the branches coalesce."""
    if params.G == 0.0:
        return np.array([], dtype=complex)
    t = params.Delta / (2.0 * np.sqrt(params.eta * params.G))
    return np.array([t, -t], dtype=complex)


def wkb_psi(alpha, params: ModelParams, branch: str, masked: bool = False):
    """
    ln Ψ± of one WKB branch.

    Args:
        alpha: Complex scalar or array
        params: Model parameters
        branch: ``"plus"`` or ``"minus"``
        masked: Return NaN inside the turning-point exclusion instead of raising

    Raises:
        TurningPointProximity: for points inside the exclusion when not masked
    """
    a = np.asarray(alpha, dtype=complex)
    near = turning_point_mask(a, params)
    if np.any(near) and not masked:
        raise TurningPointProximity(
            f"{int(np.sum(near))} point(s) inside the turning-point exclusion"
        )
    safe = np.where(near, 1.0 + 1.0j, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = BranchFunction(params, branch).log_psi(safe)
    out = np.where(near, np.nan + 0j, out)
    return out if np.ndim(alpha) else complex(out)


@dataclass(frozen=True)
class MatchedPsi:
    """Log-space coefficients of Ψ ≈ C₊Ψ₊ + C₋Ψ₋ and the normalization 𝒩."""

    log_c_plus: complex
    log_c_minus: complex
    log_norm: float = 0.0
    weights: str = "appendix"


def matched_coefficients(params: ModelParams, weights: str = "appendix") -> MatchedPsi:
    """
    Coefficients matching the WKB branches to the regular solution at infinity:

        C±/𝒩 = 2^{−iδ} Γ(2iδ)/Γ(iδ) e^{∓πδ/2}.

    ``weights="main_text"`` uses e^{∓πδ} instead, for comparison only.
    """
    d = params.delta
    if d == 0.0:
        # Ψ₁ = cosh(2√g α) = (e^{2√g α} + e^{−2√g α})/2
        return MatchedPsi(-np.log(2.0) + 0j, -np.log(2.0) + 0j, 0.0, weights)
    factor = {"appendix": 0.5, "main_text": 1.0}[weights]
    base = -1j * d * np.log(2.0) + ln_gamma(2j * d) - ln_gamma(1j * d)
    shift = factor * np.pi * d
    return MatchedPsi(complex(base - shift), complex(base + shift), 0.0, weights)


def wkb_log_psi(alpha, params: ModelParams, weights: str = "appendix"):
    """ln(C₊Ψ₊ + C₋Ψ₋), NaN inside the turning-point exclusion."""
    c = matched_coefficients(params, weights)
    a = np.atleast_1d(np.asarray(alpha, dtype=complex))
    plus = c.log_c_plus + wkb_psi(a, params, "plus", masked=True)
    minus = c.log_c_minus + wkb_psi(a, params, "minus", masked=True)
    bad = np.isnan(plus) | np.isnan(minus)
    out = log_add(np.where(bad, 0j, plus), np.where(bad, 0j, minus))
    out = np.where(bad, np.nan + 0j, out)
    return out.reshape(np.shape(alpha)) if np.ndim(alpha) else complex(out[0])


def wigner_wkb(
    params: ModelParams,
    grid: PhaseGrid,
    weights: str = "appendix",
    log_norm: Optional[float] = None,
) -> WignerGrid:
    """
    WKB Wigner function e^{−2|α|²}|C₊Ψ₊ + C₋Ψ₋|².

    Unless ``log_norm`` is given, the WKB map borrows the normalization of
    the exact solution, :func:`exact_log_norm`, fixed once per parameter set on
    :func:`normalization_grid` and independent of ``grid``. Masked nodes are NaN.
    """
    if log_norm is None:
        log_norm = exact_log_norm(params)
    alpha = grid.alpha()
    log_w = -2.0 * np.abs(alpha) ** 2 + 2.0 * wkb_log_psi(alpha, params, weights).real
    values = np.exp(log_w + log_norm)
    return WignerGrid(grid, values, log_norm=log_norm, meta={"source": "wkb", "weights": weights})


def _cut_distance(alpha, params: ModelParams) -> np.ndarray:
    # distance to the real-axis rays |Re α| > Δ/(2√(ηG)) where the radicand is negative
    alpha = np.asarray(alpha, dtype=complex)
    edge = abs(params.Delta) / (2.0 * np.sqrt(params.eta * params.G)) if params.G > 0 else np.inf
    along = np.maximum(edge - np.abs(alpha.real), 0.0)
    return np.hypot(along, alpha.imag)


def effective_potential(alpha, params: ModelParams, cut_tolerance: Optional[float] = None):
    """
    Φ(α) = 2|α|² + (2/η) Im[r − Δ ln((r + Δ)/η)].

    Φ is discontinuous across the branch cuts of r. Pass ``cut_tolerance`` to
    reject points closer than that to a cut.

    Raises:
        BranchCutProximity: if a point lies within ``cut_tolerance`` of a cut
    """
    a = np.asarray(alpha, dtype=complex)
    if params.Delta < 0:
        out = effective_potential(np.conj(a), params.reflected(), cut_tolerance)
        return out if np.ndim(alpha) else float(out)
    if cut_tolerance is not None and np.any(_cut_distance(a, params) < cut_tolerance):
        raise BranchCutProximity(f"point within {cut_tolerance} of a branch cut of r")
    r = discriminant_root(a, params)
    D, eta = params.Delta, params.eta
    log_part = D * np.log((r + D) / eta) if D != 0.0 else 0.0
    out = 2.0 * np.abs(a) ** 2 + (2.0 / eta) * np.imag(r - log_part)
    return out if np.ndim(alpha) else float(out)


def potential_grid(params: ModelParams, grid: PhaseGrid) -> WignerGrid:
    """e^{−Φ} on a grid, normalized like the exact Wigner function."""
    log_norm = potential_log_norm(params)
    values = np.exp(_log_w_potential(grid.alpha(), params) + log_norm)
    return WignerGrid(grid, values, log_norm=log_norm, meta={"source": "potential"})


def branch_cut_polylines(params: ModelParams, grid: PhaseGrid) -> List[List[List[float]]]:
    """
    Branch cuts of r inside the grid as (x, p) polylines.

    They lie on p = 0 for |x| > √2·|Δ|/(2√(ηG)).
    """
    if params.G == 0.0:
        return []
    x_edge = np.sqrt(2.0) * abs(params.Delta) / (2.0 * np.sqrt(params.eta * params.G))
    if not grid.p_min <= 0.0 <= grid.p_max:
        return []
    lines = []
    if grid.x_max > x_edge:
        lines.append([[float(x_edge), 0.0], [float(grid.x_max), 0.0]])
    if grid.x_min < -x_edge:
        lines.append([[float(-x_edge), 0.0], [float(grid.x_min), 0.0]])
    return lines


def branch_dominance(alpha, params: ModelParams, weights: str = "appendix"):
    """
    ln|C₊Ψ₊| − ln|C₋Ψ₋|, i.e. Re(φ₀,₊ − φ₀,₋)/η plus the amplitude and
    coefficient contributions. Zero on the switching locus.
    """
    c = matched_coefficients(params, weights)
    plus = c.log_c_plus + wkb_psi(alpha, params, "plus", masked=True)
    minus = c.log_c_minus + wkb_psi(alpha, params, "minus", masked=True)
    return np.real(plus - minus)


def switching_locus(params: ModelParams, grid: PhaseGrid, weights: str = "appendix") -> np.ndarray:
    """
    (x, p) points where the dominant WKB branch changes, located by linear
    interpolation of sign changes of :func:`branch_dominance` along x.
    """
    X, P = grid.mesh()
    dom = branch_dominance(grid.alpha(), params, weights)
    left, right = dom[:-1, :], dom[1:, :]
    change = np.isfinite(left) & np.isfinite(right) & (np.sign(left) != np.sign(right))
    t = np.where(change, left / np.where(change, left - right, 1.0), 0.0)
    xs = X[:-1, :] + t * grid.h_x
    points = np.stack([xs[change], P[:-1, :][change]], axis=1)
    logger.debug("switching locus: %d points", len(points))
    return points


def compare_matching(
    params: ModelParams, grid: PhaseGrid, window: float = 4.0, low: float = 0.5
) -> Dict[str, object]:
    """
    Compare both coefficient weightings against the exact −ln W over the
    quadrant I and IV windows low ≤ |x|, |p| ≤ window.

    Returns:
        Dict with the max and median relative −ln W error per weighting and
        the weighting with the smaller median
    """
    exact = wigner_exact(params, grid)
    X, P = grid.mesh()
    box = (X >= low) & (X <= window) & (np.abs(P) >= low) & (np.abs(P) <= window)
    target = exact.neg_log(NEG_LOG_CLIP)
    keep = box & (target >= 2.0) & (target < NEG_LOG_CLIP)
    report: Dict[str, object] = {}
    for weights in ("appendix", "main_text"):
        wkb = wigner_wkb(params, grid, weights, log_norm=exact.log_norm)
        with np.errstate(divide="ignore", invalid="ignore"):
            err = np.abs(-np.log(wkb.values) - target) / target
        sample = err[keep & np.isfinite(err)]
        report[weights] = {"max": float(np.max(sample)), "median": float(np.median(sample))}
    report["preferred"] = min(("appendix", "main_text"), key=lambda w: report[w]["median"])
    logger.info(
        "matching weights: median error appendix %.3g, main_text %.3g",
        report["appendix"]["median"],
        report["main_text"]["median"],
    )
    return report


def potential_barrier(params: ModelParams) -> float:
    """Φ(0) − Φ(α₀) = −2Δ/η·arctan(s/Δ) + 2s/η with s = √(G² − Δ²)."""
    if not params.bistable:
        raise NotBistable(f"G={params.G} <= |Delta|={abs(params.Delta)}")
    s = params.barrier_scale
    D = abs(params.Delta)
    return float(2.0 * s / params.eta - 2.0 * D / params.eta * np.arctan2(s, D))
