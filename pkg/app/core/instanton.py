"""
Instanton Module.

This module contains the semiclassical fixed points, the Keldysh saddle-point
equations in the four-field and (α, χ) bases, the zero-energy manifold
χ = ᾱ + f₋(α), the instanton trajectory from an attractor to the saddle, its
action and the closed-form switching-rate exponent with parameter sweeps.

Δ < 0 is reduced to Δ > 0 by the reflection (Δ, α) → (−Δ, ᾱ).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.integrate import solve_ivp
from scipy.stats import linregress

from app.core.analytic import effective_potential
from app.core.errors import (
    BranchCutProximity,
    DriftExceeded,
    NoEscapeDirection,
    NotBistable,
    OutsideAsymptoticWindow,
    RateFormsDisagree,
    SingularAtOrigin,
    StiffnessFailure,
)
from app.core.model import SQRT2, ModelParams, discriminant_root

logger = logging.getLogger(__name__)

ESCAPE_OFFSET = 1e-6
END_RADIUS = 1e-4
CRITICAL_WINDOW = 0.05
RATE_FORM_TOLERANCE = 1e-10
ACTION_SAMPLES = 20_000


def _require_bistable(params: ModelParams) -> None:
    if not params.bistable:
        raise NotBistable(
            f"G={params.G} must exceed |Delta|={abs(params.Delta)} for two attractors"
        )


# Keldysh four-field form


@dataclass
class KeldyshFields:
    """Classical and quantum Keldysh fields, all four independent."""

    alpha_cl: complex
    alpha_cl_bar: complex
    alpha_q: complex
    alpha_q_bar: complex

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.alpha_cl, self.alpha_cl_bar, self.alpha_q, self.alpha_q_bar], dtype=complex
        )

    @classmethod
    def from_array(cls, y: Sequence[complex]) -> "KeldyshFields":
        return cls(*(complex(v) for v in y))

    @classmethod
    def from_alpha_chi(cls, alpha, alpha_bar, chi, chi_bar) -> "KeldyshFields":
        """α_cl = √2α, ᾱ_cl = √2ᾱ, α_q = −√2χ̄, ᾱ_q = √2χ."""
        return cls(SQRT2 * alpha, SQRT2 * alpha_bar, -SQRT2 * chi_bar, SQRT2 * chi)

    def to_alpha_chi(self):
        """Inverse renaming, returns (α, ᾱ, χ, χ̄)."""
        return (
            self.alpha_cl / SQRT2,
            self.alpha_cl_bar / SQRT2,
            self.alpha_q_bar / SQRT2,
            -self.alpha_q / SQRT2,
        )


def liouvillian_density(fields: KeldyshFields, params: ModelParams) -> complex:
    """Liouvillian density functional 𝓛(α_cl, ᾱ_cl, α_q, ᾱ_q)."""
    a, ab, q, qb = fields.alpha_cl, fields.alpha_cl_bar, fields.alpha_q, fields.alpha_q_bar
    D, G, eta = params.Delta, params.G, params.eta
    return (
        1j * D * (a * qb + q * ab)
        + G * (ab * qb - q * a)
        - 0.5
        * eta
        * (
            a**2 * ab * qb
            - ab**2 * a * q
            + q**2 * ab * qb
            - qb**2 * a * q
            + 4 * ab * a * qb * q
        )
    )


def keldysh_rhs(fields: KeldyshFields, params: ModelParams) -> KeldyshFields:
    """
    Saddle-point equations of the Keldysh action,

        ∂ₜα_cl = ∂𝓛/∂ᾱ_q,  ∂ₜᾱ_cl = −∂𝓛/∂α_q,
        ∂ₜα_q = ∂𝓛/∂ᾱ_cl,  ∂ₜᾱ_q = −∂𝓛/∂α_cl.
    """
    a, ab, q, qb = fields.alpha_cl, fields.alpha_cl_bar, fields.alpha_q, fields.alpha_q_bar
    D, G, h = params.Delta, params.G, 0.5 * params.eta
    d_a = 1j * D * a + G * ab - h * (ab * a**2 + ab * q**2 - 2 * qb * q * a + 4 * ab * a * q)
    d_ab = -1j * D * ab + G * a - h * (a * ab**2 + a * qb**2 - 2 * q * qb * ab - 4 * a * ab * qb)
    d_q = 1j * D * q + G * qb - h * (qb * a**2 + qb * q**2 - 2 * ab * q * a + 4 * qb * a * q)
    d_qb = -1j * D * qb + G * q - h * (q * ab**2 + q * qb**2 - 2 * a * qb * ab - 4 * q * ab * qb)
    return KeldyshFields(d_a, d_ab, d_q, d_qb)


@dataclass
class FieldEvolution:
    times: np.ndarray
    fields: np.ndarray
    liouvillian: np.ndarray

    @property
    def drift(self) -> float:
        return float(np.max(np.abs(self.liouvillian - self.liouvillian[0])))


def integrate_fields(
    fields0: KeldyshFields,
    params: ModelParams,
    t_final: float,
    rtol: float = 1e-10,
    n_samples: int = 200,
) -> FieldEvolution:
    """
    Integrate the four-field equations and record 𝓛 along the way.

    Raises:
        StiffnessFailure: if the integrator stops early
    """

    def rhs(_, y):
        return keldysh_rhs(KeldyshFields.from_array(y), params).as_array()

    t_eval = np.linspace(0.0, t_final, n_samples)
    sol = solve_ivp(
        rhs,
        (0.0, t_final),
        fields0.as_array(),
        method="DOP853",
        rtol=rtol,
        atol=rtol * 1e-2,
        t_eval=t_eval,
    )
    if not sol.success:
        raise StiffnessFailure(f"four-field integration failed: {sol.message}")
    dens = np.array([liouvillian_density(KeldyshFields.from_array(y), params) for y in sol.y.T])
    return FieldEvolution(sol.t, sol.y.T, dens)


# (α, χ) form


def effective_hamiltonian_L(alpha, alpha_bar, chi, chi_bar, params: ModelParams):
    """
    L = iΔ(αχ − ᾱχ̄) + G(ᾱχ + αχ̄)
        − η(ᾱααχ + χ̄ᾱᾱα + χ̄χχα + ᾱχ̄χ̄χ − 4ᾱαχ̄χ).
    """
    D, G, eta = params.Delta, params.G, params.eta
    a, ab, c, cb = alpha, alpha_bar, chi, chi_bar
    return (
        1j * D * (a * c - ab * cb)
        + G * (ab * c + a * cb)
        - eta
        * (
            ab * a * a * c
            + cb * ab * ab * a
            + cb * c * c * a
            + ab * cb * cb * c
            - 4 * ab * a * cb * c
        )
    )


def chi_alpha_rhs(alpha, alpha_bar, chi, chi_bar, params: ModelParams):
    """
    Hamilton equations of L with independent conjugates.

    Returns:
        (∂ₜα, ∂ₜᾱ, ∂ₜχ, ∂ₜχ̄) = (∂L/∂χ, ∂L/∂χ̄, −∂L/∂α, −∂L/∂ᾱ)
    """
    D, G, eta = params.Delta, params.G, params.eta
    a, ab, c, cb = alpha, alpha_bar, chi, chi_bar
    d_a = 1j * D * a + G * ab - eta * (ab * a**2 + ab * cb**2 + 2 * cb * c * a - 4 * cb * ab * a)
    d_ab = -1j * D * ab + G * a - eta * (ab**2 * a + 2 * ab * cb * c + c**2 * a - 4 * ab * a * c)
    d_c = -1j * D * c - G * cb + eta * (cb * c**2 + cb * ab**2 + 2 * ab * a * c - 4 * ab * cb * c)
    d_cb = 1j * D * cb - G * c + eta * (a**2 * c + 2 * cb * ab * a + cb**2 * c - 4 * a * cb * c)
    return d_a, d_ab, d_c, d_cb


def semiclassical_flow(alpha, params: ModelParams):
    """∂ₜα = iΔα + Gᾱ − η|α|²α, the χ = 0 reduction."""
    alpha = np.asarray(alpha, dtype=complex)
    n = np.abs(alpha) ** 2
    return 1j * params.Delta * alpha + params.G * alpha.conj() - params.eta * n * alpha


@dataclass(frozen=True)
class FixedPoints:
    alpha0: complex
    saddle: complex = 0j

    def as_list(self) -> List[complex]:
        return [self.alpha0, -self.alpha0, self.saddle]


def fixed_points(params: ModelParams) -> FixedPoints:
    """
    α₀ = √(s/η)·√((s + iΔ)/G) with s = √(G² − Δ²); attractors ±α₀, saddle 0.

    Raises:
        NotBistable: if G ≤ |Δ|
    """
    _require_bistable(params)
    s = params.barrier_scale
    alpha0 = np.sqrt(s / params.eta) * np.sqrt((s + 1j * params.Delta) / params.G)
    return FixedPoints(complex(alpha0))


def flow_jacobian(func: Callable, alpha: complex, h: float = 1e-7) -> np.ndarray:
    """Real 2×2 Jacobian of a planar complex vector field by centered differences."""
    cols = []
    for step in (h, 1j * h):
        d = (func(alpha + step) - func(alpha - step)) / (2 * h)
        cols.append([d.real, d.imag])
    return np.array(cols).T


def f_branches(alpha, params: ModelParams, branch: str = "minus"):
    """
    f± = i(Δ ± r)/(2ηα) with r = √(Δ² − 4ηGα²).

    The minus branch is evaluated in its regular form 2iGα/(Δ + r).

    Raises:
        SingularAtOrigin: for the plus branch at α = 0
    """
    a = np.asarray(alpha, dtype=complex)
    r = discriminant_root(a, params)
    D, G, eta = params.Delta, params.G, params.eta
    if branch == "plus":
        if np.any(a == 0):
            raise SingularAtOrigin("f+ diverges at alpha = 0")
        out = 1j * (D + r) / (2 * eta * a)
    elif branch == "minus":
        denom = D + r
        zero = denom == 0
        # Δ = 0: the limit from the upper half-plane
        limit = 0j if D != 0.0 else -np.sqrt(G / eta) + 0j
        out = np.where(zero, limit, 2j * G * a / np.where(zero, 1.0, denom))
    else:
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch}")
    return out if np.ndim(alpha) else complex(out)


def quantum_field_chi(alpha, params: ModelParams, cut_tolerance: Optional[float] = None):
    """
    χ(α) = ᾱ + f₋(α) on the zero-energy manifold, with χ = ½ ∂Φ/∂α.

    Raises:
        BranchCutProximity: if ``cut_tolerance`` is set and a point is that close to a cut
    """
    a = np.asarray(alpha, dtype=complex)
    if params.Delta < 0:
        out = np.conj(quantum_field_chi(np.conj(a), params.reflected(), cut_tolerance))
        return out if np.ndim(alpha) else complex(out)
    if cut_tolerance is not None and params.G > 0:
        edge = params.Delta / (2.0 * np.sqrt(params.eta * params.G))
        dist = np.hypot(np.maximum(edge - np.abs(a.real), 0.0), a.imag)
        if np.any(dist < cut_tolerance):
            raise BranchCutProximity(f"point within {cut_tolerance} of a branch cut")
    out = a.conj() + f_branches(a, params, "minus")
    return out if np.ndim(alpha) else complex(out)


def _tracked_chi(params: ModelParams) -> Callable[[complex], complex]:
    """χ(α) with the square root continued from the previous call."""
    state = {"r": None}
    D, G, eta = params.Delta, params.G, params.eta

    def chi(alpha: complex) -> complex:
        r = complex(discriminant_root(alpha, params))
        if state["r"] is not None and abs(-r - state["r"]) < abs(r - state["r"]):
            r = -r
        state["r"] = r
        denom = D + r
        f = 2j * G * alpha / denom if denom != 0 else complex(f_branches(alpha, params))
        return np.conj(alpha) + f

    return chi


def manifold_flow(alpha, params: ModelParams, chi_fn: Optional[Callable] = None):
    """∂ₜα on the manifold: ∂L/∂χ with χ = χ(α) and χ̄ = conj(χ)."""
    chi = quantum_field_chi(alpha, params) if chi_fn is None else chi_fn(alpha)
    d_a, *_ = chi_alpha_rhs(alpha, np.conj(alpha), chi, np.conj(chi), params)
    return d_a


@dataclass
class InstantonPoint:
    t: float
    alpha: complex
    chi: complex
    L_value: complex


@dataclass
class InstantonTrajectory:
    """
    Sampled path in the classical subspace plus the quantum field.

    Args:
        points: Samples ordered along the path
        params: Parameters the path belongs to
        kind: ``"uphill"`` (attractor → saddle) or ``"downhill"``
        meta: Integration diagnostics
    """

    points: List[InstantonPoint]
    params: ModelParams
    kind: str = "uphill"
    meta: Dict[str, float] = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([pt.t for pt in self.points])

    @property
    def alpha(self) -> np.ndarray:
        return np.array([pt.alpha for pt in self.points])

    @property
    def chi(self) -> np.ndarray:
        return np.array([pt.chi for pt in self.points])

    @property
    def L_drift(self) -> float:
        return float(max(abs(pt.L_value) for pt in self.points))

    def to_frame(self) -> pd.DataFrame:
        a, c = self.alpha, self.chi
        return pd.DataFrame(
            {
                "t": self.times,
                "re_alpha": a.real,
                "im_alpha": a.imag,
                "re_chi": c.real,
                "im_chi": c.imag,
                "abs_L": [abs(pt.L_value) for pt in self.points],
            }
        )

    def reflected(self) -> "InstantonTrajectory":
        """Image under α → −α, χ → −χ."""
        pts = [InstantonPoint(p.t, -p.alpha, -p.chi, p.L_value) for p in self.points]
        return InstantonTrajectory(pts, self.params, self.kind, dict(self.meta))

    def conjugated(self, params: ModelParams) -> "InstantonTrajectory":
        """Image under α → ᾱ, χ → χ̄ (maps Δ to −Δ)."""
        pts = [
            InstantonPoint(p.t, np.conj(p.alpha), np.conj(p.chi), np.conj(p.L_value))
            for p in self.points
        ]
        return InstantonTrajectory(pts, params, self.kind, dict(self.meta))


def _manifold_escape(params: ModelParams, alpha0: complex) -> None:
    # the manifold flow must repel from α₀ in some direction
    jac = flow_jacobian(lambda a: manifold_flow(a, params), alpha0, h=1e-6 * abs(alpha0))
    growth = linalg.eigvals(jac).real
    logger.debug("manifold Jacobian eigenvalues at alpha0: %s", growth)
    if not np.any(growth > 0):
        raise NoEscapeDirection(f"no growing mode at alpha0={alpha0:.6g}: {growth}")


def _saddle_direction(params: ModelParams, alpha0: complex) -> complex:
    """Stable direction of the manifold flow at the saddle, oriented toward α₀."""
    if params.Delta == 0.0:
        return alpha0 / abs(alpha0)
    jac = flow_jacobian(lambda a: manifold_flow(a, params), 0j, h=1e-7)
    lam, vecs = linalg.eig(jac)
    k = int(np.argmin(lam.real))
    v = vecs[:, k].real
    direction = complex(v[0], v[1])
    direction /= abs(direction)
    if (direction * np.conj(alpha0)).real < 0:
        direction = -direction
    return direction


def integrate_instanton(
    params: ModelParams,
    which: str = "plus_attractor",
    rtol: float = 1e-11,
    n_samples: int = ACTION_SAMPLES,
    drift_tolerance: float = 1e-6,
) -> InstantonTrajectory:
    """
    Instanton trajectory from ±α₀ to the saddle on the zero-energy manifold.

    The path is built by shooting backward in time from the saddle along the
    stable direction of the manifold flow until it reaches α₀, then reversed.

    Args:
        params: Bistable parameters
        which: ``"plus_attractor"`` or ``"minus_attractor"``
        rtol: Integrator relative tolerance
        n_samples: Samples of the dense solution kept on the trajectory
        drift_tolerance: Bound on |L|/scale along the path

    Raises:
        NotBistable: if G ≤ |Δ|
        NoEscapeDirection: if α₀ is not repelling on the manifold
        DriftExceeded: if |L| leaves the zero-energy manifold
    """
    _require_bistable(params)
    if params.Delta < 0:
        base = integrate_instanton(params.reflected(), which, rtol, n_samples, drift_tolerance)
        return base.conjugated(params)
    if which == "minus_attractor":
        base = integrate_instanton(params, "plus_attractor", rtol, n_samples, drift_tolerance)
        return base.reflected()

    alpha0 = fixed_points(params).alpha0
    if params.Delta > 0:
        _manifold_escape(params, alpha0)
    eps = ESCAPE_OFFSET * abs(alpha0)
    start = eps * _saddle_direction(params, alpha0)

    chi_fn = _tracked_chi(params)

    def rhs(_, y):
        a = complex(y[0], y[1])
        d = -manifold_flow(a, params, chi_fn)
        return [d.real, d.imag]

    def arrived(_, y):
        return abs(complex(y[0], y[1]) - alpha0) - eps

    arrived.terminal = True
    t_max = 200.0 / max(params.barrier_scale, 1e-12)
    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        [start.real, start.imag],
        method="DOP853",
        rtol=rtol,
        atol=rtol * abs(alpha0) * 1e-3,
        dense_output=True,
        events=arrived,
    )
    if not sol.success or sol.status != 1:
        raise StiffnessFailure(f"instanton shooting did not reach alpha0: {sol.message}")
    duration = float(sol.t[-1])

    s_grid = np.linspace(0.0, duration, n_samples)
    path = sol.sol(s_grid)
    alphas = (path[0] + 1j * path[1])[::-1]
    times = duration - s_grid[::-1]

    chi_fn = _tracked_chi(params)
    points = []
    for t, a in zip(times, alphas):
        c = chi_fn(a)
        L = effective_hamiltonian_L(a, np.conj(a), c, np.conj(c), params)
        points.append(InstantonPoint(float(t), complex(a), complex(c), complex(L)))

    scale = (params.G + abs(params.Delta)) * (1.0 + abs(alpha0)) ** 4
    meta = {"duration": duration, "nfev": float(sol.nfev), "scale": scale}
    traj = InstantonTrajectory(points, params, "uphill", meta)
    drift = traj.L_drift
    traj.meta["L_drift"] = drift
    if drift > drift_tolerance * scale:
        raise DriftExceeded(f"|L| reached {drift:.3e} (scale {scale:.3e})")
    logger.info(
        "instanton: duration %.3f, %d rhs evaluations, |L| <= %.2e", duration, sol.nfev, drift
    )
    return traj


def instanton_action(traj: InstantonTrajectory) -> complex:
    """
    iS = −2∫(χ dα − ᾱ dχ̄) along the samples (segment trapezoid rule).

    Returns:
        The complex quadrature; the physical action is its real part and the
        imaginary part is a quadrature residue
    """
    a = traj.alpha
    c = traj.chi
    cb = np.conj(c)
    ab = np.conj(a)
    integrand = 0.5 * (c[1:] + c[:-1]) * np.diff(a) - 0.5 * (ab[1:] + ab[:-1]) * np.diff(cb)
    value = -2.0 * np.sum(integrand)
    if abs(value.imag) > 1e-8 * max(1.0, abs(value.real)):
        logger.warning("instanton action has imaginary residue %.3e", value.imag)
    return complex(value)


def downhill_path(
    params: ModelParams,
    target: str = "minus_attractor",
    t_max: float = 200.0,
    n_samples: int = 2000,
) -> InstantonTrajectory:
    """
    Separatrix from the saddle to an attractor under the classical flow
    (χ ≡ 0, zero action).

    Raises:
        StiffnessFailure: if the flow does not reach the attractor within ``t_max``
    """
    _require_bistable(params)
    alpha0 = fixed_points(params).alpha0
    goal = -alpha0 if target == "minus_attractor" else alpha0
    jac = flow_jacobian(lambda a: semiclassical_flow(a, params), 0j)
    lam, vecs = linalg.eig(jac)
    v = vecs[:, int(np.argmax(lam.real))].real
    direction = complex(v[0], v[1]) / np.hypot(v[0], v[1])
    if (direction * np.conj(goal)).real < 0:
        direction = -direction
    eps = ESCAPE_OFFSET * abs(alpha0)

    def rhs(_, y):
        d = semiclassical_flow(complex(y[0], y[1]), params)
        return [d.real, d.imag]

    def arrived(_, y):
        return abs(complex(y[0], y[1]) - goal) - END_RADIUS * abs(alpha0)

    arrived.terminal = True
    sol = solve_ivp(
        rhs,
        (0.0, t_max / max(params.eta, 1e-12)),
        [eps * direction.real, eps * direction.imag],
        method="DOP853",
        rtol=1e-10,
        atol=1e-14,
        dense_output=True,
        events=arrived,
    )
    if not sol.success or sol.status != 1:
        raise StiffnessFailure(f"downhill path did not reach the {target}: {sol.message}")
    times = np.linspace(0.0, sol.t[-1], n_samples)
    path = sol.sol(times)
    pts = [
        InstantonPoint(float(t), complex(x, y), 0j, 0j)
        for t, x, y in zip(times, path[0], path[1])
    ]
    return InstantonTrajectory(pts, params, "downhill", {"duration": float(sol.t[-1])})


# switching rate


@dataclass
class RateResult:
    """
    Exponent of the switching rate, Γ ∝ exp(ln_rate).

    Args:
        ln_rate: lnΓ = iS from the closed form
        params: Parameter echo
        regime: ``"bistable"`` or ``"critical"`` when (G − |Δ|)/G ≤ 0.05
        potential_form: Φ(α₀) − Φ(0) evaluated from the effective potential
        ln_rate_critical: Near-critical expansion, when inside its window
    """

    ln_rate: float
    params: Dict[str, float]
    regime: str
    potential_form: float
    ln_rate_critical: Optional[float] = None


def _closed_form(params: ModelParams) -> float:
    s = params.barrier_scale
    D = abs(params.Delta)
    return float(-2.0 * s / params.eta + 2.0 * D / params.eta * np.arctan2(s, D))


def in_critical_window(params: ModelParams) -> bool:
    """0 ≤ (G − |Δ|)/G ≤ 0.05, the upper edge compared with a relative tolerance of 1e-9."""
    if params.G <= 0:
        return False
    gap = (params.G - abs(params.Delta)) / params.G
    return 0.0 <= gap <= CRITICAL_WINDOW * (1.0 + 1e-9)


def ln_rate_closed_form(params: ModelParams) -> RateResult:
    """
    lnΓ = −2√(G²−Δ²)/η + (2|Δ|/η)·arctan(√(G²−Δ²)/|Δ|), cross-checked against
    Φ(α₀) − Φ(0).

    Raises:
        NotBistable: if G ≤ |Δ|
        RateFormsDisagree: if the two forms differ by more than 1e-10 relative
    """
    _require_bistable(params)
    ln_rate = _closed_form(params)
    positive = params if params.Delta >= 0 else params.reflected()
    alpha0 = fixed_points(positive).alpha0
    potential_form = float(
        effective_potential(alpha0, positive) - effective_potential(0j, positive)
    )
    if abs(potential_form - ln_rate) > RATE_FORM_TOLERANCE * max(1.0, abs(ln_rate)):
        raise RateFormsDisagree(
            f"closed form {ln_rate:.12g} and potential difference {potential_form:.12g} disagree"
        )
    critical = None
    if in_critical_window(params):
        critical = ln_rate_critical(params)
    return RateResult(
        ln_rate,
        {"G": params.G, "Delta": params.Delta, "eta": params.eta},
        "critical" if critical is not None else "bistable",
        potential_form,
        critical,
    )


def ln_rate_critical(params: ModelParams) -> float:
    """
    Near-critical form lnΓ ≈ −4√2 (G − |Δ|)^{3/2} / (3η√G).

    Raises:
        OutsideAsymptoticWindow: unless 0 ≤ (G − |Δ|)/G ≤ 0.05
    """
    gap = params.G - abs(params.Delta)
    if not in_critical_window(params):
        raise OutsideAsymptoticWindow(
            f"(G - |Delta|)/G = {gap / params.G if params.G else np.inf:.3g} "
            f"outside [0, {CRITICAL_WINDOW}]"
        )
    return float(-4.0 * SQRT2 * gap**1.5 / (3.0 * params.eta * np.sqrt(params.G)))


def critical_slope(G: float = 10.0, eta: float = 1.0, window=(1e-4, 1e-2), n: int = 40):
    """
    Log-log regression of −lnΓ against G − Δ over a window of (G − Δ)/G.

    Returns:
        scipy ``LinregressResult`` (slope ≈ 3/2)
    """
    gaps = G * np.geomspace(window[0], window[1], n)
    values = [-_closed_form(ModelParams(G, G - g, eta)) for g in gaps]
    return linregress(np.log(gaps), np.log(values))


def rate_sweep(
    G_list: Sequence[float] = (5.0, 6.0, 7.0),
    n_delta: int = 200,
    eta: float = 1.0,
    delta_grid: Optional[Sequence[float]] = None,
) -> pd.DataFrame:
    """
    lnΓ(Δ) curves for each G with Δ ∈ [0, G).

    Returns:
        DataFrame with columns G, Delta, eta, ln_rate, ln_rate_critical
    """
    rows = []
    for G in G_list:
        if delta_grid is None:
            deltas = np.linspace(0.0, G, n_delta, endpoint=False)
        else:
            deltas = np.asarray(delta_grid)
        for D in deltas:
            params = ModelParams(float(G), float(D), eta)
            if not params.bistable:
                continue
            result = ln_rate_closed_form(params)
            critical = result.ln_rate_critical
            rows.append(
                {
                    "G": G,
                    "Delta": float(D),
                    "eta": eta,
                    "ln_rate": result.ln_rate,
                    "ln_rate_critical": np.nan if critical is None else critical,
                }
            )
    logger.debug("rate sweep: %d rows", len(rows))
    return pd.DataFrame(rows, columns=["G", "Delta", "eta", "ln_rate", "ln_rate_critical"])


def phase_portrait(params: ModelParams, extent: float = 4.0, n: int = 25) -> pd.DataFrame:
    """Samples of the classical flow on an n×n (x, p) lattice."""
    xs = np.linspace(-extent, extent, n)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    alpha = (X + 1j * P) / SQRT2
    flow = semiclassical_flow(alpha, params)
    return pd.DataFrame(
        {
            "x": X.ravel(),
            "p": P.ravel(),
            "dx": SQRT2 * flow.real.ravel(),
            "dp": SQRT2 * flow.imag.ravel(),
        }
    )
