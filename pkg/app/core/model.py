"""
Model Core Module.

This module contains the parameter set of the two-photon driven, two-photon
dissipative cavity, the phase-space grids and the coordinate conventions shared
by every other module.

Conventions:
    α = (x + i p)/√2, so x = √2 Re α and p = √2 Im α.
    Wigner functions are normalized as ∫ W d²α = 1 with d²α = dx dp / 2.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from app.core.errors import DegenerateGrid, NegativeDrive, NonPositiveEta

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class ModelParams:
    """
    Physical parameters of the cavity (ħ = 1, rate units).

    Args:
        G: Two-photon drive amplitude
        Delta: Pump-cavity detuning Δ = ω_p − ω_c
        eta: Two-photon dissipation rate
        fock_cutoff: Dimension of the truncated Fock space
    """

    G: float
    Delta: float
    eta: float
    fock_cutoff: int = 60

    @property
    def delta(self) -> float:
        """Dimensionless detuning δ = Δ/η."""
        return self.Delta / self.eta

    @property
    def g(self) -> float:
        """Dimensionless drive g = G/η."""
        return self.G / self.eta

    @property
    def bistable(self) -> bool:
        """True iff two distinct attractors exist (G > |Δ|)."""
        return self.G > abs(self.Delta)

    @property
    def barrier_scale(self) -> float:
        """√(G² − Δ²), zero outside the bistable regime."""
        return float(np.sqrt(max(self.G**2 - self.Delta**2, 0.0)))

    def scaled(self, s: float) -> "ModelParams":
        """Return (sG, sΔ, sη); every dimensionless output is invariant."""
        return replace(self, G=s * self.G, Delta=s * self.Delta, eta=s * self.eta)

    def reflected(self) -> "ModelParams":
        """Return the parameters with Δ → −Δ (used with α → ᾱ)."""
        return replace(self, Delta=-self.Delta)

    def as_dict(self) -> dict:
        return {
            "G": self.G,
            "Delta": self.Delta,
            "eta": self.eta,
            "fock_cutoff": self.fock_cutoff,
            "delta": self.delta,
            "g": self.g,
            "bistable": self.bistable,
        }


def validate_params(p: ModelParams) -> ModelParams:
    """
    Validate a parameter set.

    Args:
        p: Parameters to check

    Returns:
        The same parameters with float-normalized fields

    Raises:
        NonPositiveEta: if η ≤ 0
        NegativeDrive: if G < 0
    """
    if not np.isfinite(p.eta) or p.eta <= 0:
        raise NonPositiveEta(f"eta must be > 0, got {p.eta}")
    if not np.isfinite(p.G) or p.G < 0:
        raise NegativeDrive(f"G must be >= 0, got {p.G}")
    normalized = replace(
        p,
        G=float(p.G),
        Delta=float(p.Delta),
        eta=float(p.eta),
        fock_cutoff=int(p.fock_cutoff),
    )
    if not normalized.bistable:
        logger.debug("parameters G=%s Delta=%s are not bistable", p.G, p.Delta)
    return normalized


def alpha_of_xy(x, p):
    """Map quadratures (x, p) to the complex amplitude α = (x + ip)/√2."""
    return (np.asarray(x) + 1j * np.asarray(p)) / SQRT2


def xy_of_alpha(alpha) -> Tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`alpha_of_xy`: returns (√2 Re α, √2 Im α)."""
    alpha = np.asarray(alpha)
    return SQRT2 * alpha.real, SQRT2 * alpha.imag


def discriminant_root(alpha, params: ModelParams):
    """
    Square root r = √(Δ² − 4ηGα²) shared by the WKB exponents, the effective
    potential and the instanton quantum field.

    Principal branch, except on the branch cut itself (radicand real and
    negative) where the root is continued from the upper α half-plane, i.e.
    the root with negative imaginary part is returned.
    """
    alpha = np.asarray(alpha, dtype=complex)
    radicand = params.Delta**2 - 4.0 * params.eta * params.G * alpha**2
    root = np.sqrt(radicand)
    on_cut = (radicand.imag == 0.0) & (radicand.real < 0.0)
    return np.where(on_cut, -1j * np.sqrt(np.abs(radicand.real)), root)


@dataclass(frozen=True)
class PhaseGrid:
    """
    Uniform quadrature grid over (x, p).

    Arrays built from the grid use ``indexing="ij"``: axis 0 is x, axis 1 is p.
    """

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int
    n_p: int

    @property
    def h_x(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def h_p(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_x, self.n_p)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.p, indexing="ij")

    def alpha(self) -> np.ndarray:
        """Complex amplitude at every grid node."""
        X, P = self.mesh()
        return alpha_of_xy(X, P)

    def refined(self, factor: int = 2) -> "PhaseGrid":
        """Same bounds with the spacing divided by ``factor``."""
        return replace(
            self,
            n_x=(self.n_x - 1) * factor + 1,
            n_p=(self.n_p - 1) * factor + 1,
        )

    def spec(self) -> str:
        return (
            f"{self.x_min}:{self.x_max}:{self.n_x},"
            f"{self.p_min}:{self.p_max}:{self.n_p}"
        )


def make_grid(bounds, n_x: int, n_p: int) -> PhaseGrid:
    """
    Build a uniform phase-space grid.

    Args:
        bounds: ((x_min, x_max), (p_min, p_max))
        n_x: Number of x samples (≥ 3)
        n_p: Number of p samples (≥ 3)

    Returns:
        PhaseGrid

    Raises:
        DegenerateGrid: on too few samples, zero extent or non-finite bounds
    """
    (x_min, x_max), (p_min, p_max) = bounds
    values = np.array([x_min, x_max, p_min, p_max], dtype=float)
    if not np.all(np.isfinite(values)):
        raise DegenerateGrid(f"grid bounds must be finite, got {bounds}")
    if n_x < 3 or n_p < 3:
        raise DegenerateGrid(f"need at least 3 samples per axis, got {n_x}x{n_p}")
    if x_max <= x_min or p_max <= p_min:
        raise DegenerateGrid(f"grid has zero or negative extent: {bounds}")
    return PhaseGrid(
        float(x_min), float(x_max), float(p_min), float(p_max), int(n_x), int(n_p)
    )


def parse_grid_spec(spec: str) -> PhaseGrid:
    """Parse ``"xmin:xmax:nx,pmin:pmax:np"`` (the CLI ``--grid`` format)."""
    try:
        x_part, p_part = spec.split(",")
        x_min, x_max, n_x = x_part.split(":")
        p_min, p_max, n_p = p_part.split(":")
        bounds = ((float(x_min), float(x_max)), (float(p_min), float(p_max)))
        return make_grid(bounds, int(n_x), int(n_p))
    except ValueError as e:
        if isinstance(e, DegenerateGrid):
            raise
        raise DegenerateGrid(f"cannot parse grid spec '{spec}': {e}") from e


def trapezoid_mass(values: np.ndarray, grid: PhaseGrid) -> float:
    """∫ W d²α by the 2D trapezoid rule, with d²α = dx dp / 2."""
    inner = trapezoid(values, dx=grid.h_p, axis=1)
    return float(trapezoid(inner, dx=grid.h_x) / 2.0)


@dataclass
class WignerGrid:
    """
    Real Wigner samples over a phase grid.

    Args:
        grid: Sampling grid
        values: W(x, p) with shape ``grid.shape``
        weight: Quadrature measure the normalization refers to
        log_norm: Log of the factor applied by normalization, if any
    """

    grid: PhaseGrid
    values: np.ndarray
    weight: str = "d2alpha"
    log_norm: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def mass(self) -> float:
        return trapezoid_mass(self.values, self.grid)

    def neg_log(self, clip: float = 30.0) -> np.ndarray:
        """−ln W, clipped at ``clip`` (non-positive W maps to ``clip``)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -np.log(np.where(self.values > 0, self.values, np.nan))
        return np.minimum(np.nan_to_num(out, nan=clip), clip)
