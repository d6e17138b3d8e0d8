"""
Fock Space Numerics Module.

This module contains the brute-force reference solver: Hamiltonian, jump
operator and Liouvillian on a truncated Fock space, the photon-number parity
block structure, steady states, time evolution, decay rates, the Wigner
transform of density matrices and the residual of the Wigner equation of motion.

Vectorization is column stacking, vec(ρ)[i + N j] = ρ[i, j], so that
vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ) and

    𝓛 = −i(I⊗H − Hᵀ⊗I) + η[(ā²⊗a²) − ½ I⊗(a†²a²) − ½ (a†²a²)ᵀ⊗I].
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from app.core.errors import (
    CutoffInadequate,
    CutoffTooSmall,
    GridTooCoarse,
    MemoryBudgetExceeded,
    NegativeDrive,
    NoNonzeroEigenvalue,
    NonPositiveEta,
    RankDeficiencyAmbiguous,
    StepTooLarge,
)
from app.core.model import ModelParams, PhaseGrid, WignerGrid
from app.utils.helpers import convergence_order, grid_d_alpha, grid_d_alpha_bar, interior

logger = logging.getLogger(__name__)

MAX_CUTOFF = 80
BLOCKS = ("even-even", "odd-odd", "even-odd", "odd-even")
KERNEL_TOL = 1e-10
GAP_RATIO = 1e3


@dataclass
class FockOperator:
    """Dense operator on the truncated Fock space {|0⟩, ..., |N−1⟩}."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m - m.conj().T) / max(np.linalg.norm(m), 1e-300))


@dataclass
class Superoperator:
    """Dense map on column-stacked density matrices."""

    matrix: np.ndarray
    cutoff: int
    params: Optional[ModelParams] = None
    vectorization: str = "column-stacking"

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 1))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvectorize(self.matrix @ vectorize(rho), self.cutoff)


@dataclass
class DensityMatrix:
    """Density matrix with physicality diagnostics."""

    matrix: np.ndarray
    label: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_defect(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(herm).min())

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def photon_number_tail(self, last: int = 5) -> float:
        """Tr[ρ P_{n ≥ N−last}]."""
        return float(np.real(np.diag(self.matrix)[-last:].sum()))

    @classmethod
    def fock(cls, n: int, dim: int) -> "DensityMatrix":
        rho = np.zeros((dim, dim), dtype=complex)
        rho[n, n] = 1.0
        return cls(rho, label=f"|{n}><{n}|")


def vectorize(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vec).reshape((dim, dim), order="F")


def annihilation(dim: int) -> np.ndarray:
    """a with a[n−1, n] = √n."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def _check_physical(params: ModelParams) -> None:
    # η = 0 is allowed here: the closed-system limit is a useful reference
    if params.eta < 0:
        raise NonPositiveEta(f"eta must be >= 0 for the Fock solver, got {params.eta}")
    if params.G < 0:
        raise NegativeDrive(f"G must be >= 0, got {params.G}")


def build_hamiltonian(params: ModelParams, dim: Optional[int] = None) -> FockOperator:
    """
    H = −Δ a†a + (iG/2)(a†² − a²) in the rotating frame of the pump.

    Args:
        params: Model parameters
        dim: Fock cutoff N (defaults to ``params.fock_cutoff``)

    Raises:
        CutoffTooSmall: if N < 3 (a² must not vanish identically)
    """
    _check_physical(params)
    dim = params.fock_cutoff if dim is None else dim
    if dim < 3:
        raise CutoffTooSmall(f"Fock cutoff {dim} is too small for two-photon terms")
    a = annihilation(dim)
    ad = a.conj().T
    H = -params.Delta * (ad @ a) + 0.5j * params.G * (ad @ ad - a @ a)
    return FockOperator(H)


def build_liouvillian(
    params: ModelParams, dim: Optional[int] = None, max_cutoff: int = MAX_CUTOFF
) -> Superoperator:
    """
    Dense Lindblad generator 𝓛 = −i[H, ·] + η 𝒟_{a²}.

    Raises:
        CutoffTooSmall: if N < 4
        MemoryBudgetExceeded: if N exceeds ``max_cutoff``
    """
    dim = params.fock_cutoff if dim is None else dim
    if dim < 4:
        raise CutoffTooSmall(f"Liouvillian needs a cutoff of at least 4, got {dim}")
    if dim > max_cutoff:
        raise MemoryBudgetExceeded(
            f"cutoff {dim} exceeds the dense budget of {max_cutoff} "
            f"({dim**2}x{dim**2} superoperator)"
        )
    H = build_hamiltonian(params, dim).matrix
    a = annihilation(dim)
    jump = a @ a
    jdj = jump.conj().T @ jump
    eye = np.eye(dim)

    unitary = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    dissipator = (
        np.kron(jump.conj(), jump) - 0.5 * np.kron(eye, jdj) - 0.5 * np.kron(jdj.T, eye)
    )
    logger.debug("built Liouvillian with N=%d (%d^2 entries)", dim, dim**2)
    return Superoperator(unitary + params.eta * dissipator, dim, params)


def parity_indices(dim: int) -> Dict[str, np.ndarray]:
    """Vectorized indices of each photon-number parity block (row parity, column parity)."""
    rows, cols = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    flat = (rows + dim * cols).reshape(-1, order="F")
    row_par = (rows % 2).reshape(-1, order="F")
    col_par = (cols % 2).reshape(-1, order="F")
    out = {}
    for name in BLOCKS:
        r, c = (0 if part == "even" else 1 for part in name.split("-"))
        out[name] = np.sort(flat[(row_par == r) & (col_par == c)])
    return out


@dataclass
class ParityBlocks:
    blocks: Dict[str, np.ndarray]
    indices: Dict[str, np.ndarray]
    off_block_norm: float
    cutoff: int


def parity_project(S: Superoperator) -> ParityBlocks:
    """
    Split 𝓛 into its four parity blocks.

    H and a² conserve photon-number parity, so 𝓛 is block diagonal; the
    relative norm of everything outside the blocks is reported.
    """
    idx = parity_indices(S.cutoff)
    blocks = {name: S.matrix[np.ix_(i, i)] for name, i in idx.items()}
    mask = np.ones(S.matrix.shape, dtype=bool)
    for i in idx.values():
        mask[np.ix_(i, i)] = False
    off = float(np.linalg.norm(S.matrix[mask]) / max(np.linalg.norm(S.matrix), 1e-300))
    return ParityBlocks(blocks, idx, off, S.cutoff)


@dataclass
class KernelBlock:
    name: str
    vectors: np.ndarray
    singular_values: np.ndarray


def _block_kernel(name: str, block: np.ndarray, scale: float) -> KernelBlock:
    _, s, vh = linalg.svd(block)
    tol = KERNEL_TOL * scale
    kernel = s <= tol
    k = int(kernel.sum())
    if k:
        largest_kernel = s[kernel].max()
        smallest_rest = s[~kernel].min() if (~kernel).any() else np.inf
        if smallest_rest < GAP_RATIO * max(largest_kernel, np.finfo(float).eps * scale):
            raise RankDeficiencyAmbiguous(
                f"{name}: kernel singular value {largest_kernel:.3e} is not separated "
                f"from {smallest_rest:.3e}"
            )
    elif s.min() < GAP_RATIO * tol:
        raise RankDeficiencyAmbiguous(
            f"{name}: smallest singular value {s.min():.3e} is near the kernel threshold"
        )
    return KernelBlock(name, vh[kernel].conj().T, s)


def kernel_basis(S: Superoperator) -> Dict[str, KernelBlock]:
    """Orthonormal kernel basis of 𝓛, block by block."""
    parts = parity_project(S)
    scale = S.norm
    return {name: _block_kernel(name, b, scale) for name, b in parts.blocks.items()}


def _embed(vec: np.ndarray, indices: np.ndarray, dim: int) -> np.ndarray:
    full = np.zeros(dim * dim, dtype=complex)
    full[indices] = vec
    return unvectorize(full, dim)


def steady_states(S: Superoperator) -> List[DensityMatrix]:
    """
    Physical stationary states: one normalized density matrix per kernel vector
    of the even-even and odd-odd blocks (the parity coherence blocks only carry
    traceless kernel elements and are reported by :func:`kernel_basis`).
    """
    kernels = kernel_basis(S)
    idx = parity_indices(S.cutoff)
    states = []
    for name in ("even-even", "odd-odd"):
        kb = kernels[name]
        for j in range(kb.vectors.shape[1]):
            rho = _embed(kb.vectors[:, j], idx[name], S.cutoff)
            rho = 0.5 * (rho + rho.conj().T)
            rho = rho / np.trace(rho)
            residual = np.linalg.norm(S.matrix @ vectorize(rho))
            logger.debug("%s steady state residual %.3e", name, residual)
            states.append(DensityMatrix(rho, label=name))
    return states


def kernel_projection(S: Superoperator, rho: DensityMatrix) -> DensityMatrix:
    """Orthogonal projection of ρ onto the span of the kernel of 𝓛."""
    kernels = kernel_basis(S)
    idx = parity_indices(S.cutoff)
    v = vectorize(rho.matrix)
    out = np.zeros_like(v)
    for name, kb in kernels.items():
        if kb.vectors.size == 0:
            continue
        part = v[idx[name]]
        out[idx[name]] = kb.vectors @ (kb.vectors.conj().T @ part)
    return DensityMatrix(unvectorize(out, S.cutoff), label="kernel projection")


def evolve(
    rho0: DensityMatrix,
    S: Superoperator,
    T: float,
    dt: float,
    method: str = "rk4",
) -> DensityMatrix:
    """
    Propagate ρ̇ = 𝓛ρ up to time T.

    Args:
        rho0: Initial state
        S: Liouvillian
        T: Final time
        dt: Step of the fixed-step RK4 integrator (ignored by ``"eig"``)
        method: ``"rk4"`` or ``"eig"`` (eigendecomposition of 𝓛)

    Raises:
        StepTooLarge: if dt·‖𝓛‖ > 0.1 for the RK4 integrator
    """
    v = vectorize(rho0.matrix).astype(complex)
    L = S.matrix
    if method == "eig":
        lam, V = linalg.eig(L)
        coeff = linalg.solve(V, v)
        v = V @ (np.exp(lam * T) * coeff)
    else:
        if dt * S.norm > 0.1:
            raise StepTooLarge(f"dt*|L| = {dt * S.norm:.3g} > 0.1; reduce dt")
        steps = int(np.ceil(T / dt))
        h = T / steps if steps else 0.0
        for _ in range(steps):
            k1 = L @ v
            k2 = L @ (v + 0.5 * h * k1)
            k3 = L @ (v + 0.5 * h * k2)
            k4 = L @ (v + h * k3)
            v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return DensityMatrix(unvectorize(v, S.cutoff), label=f"evolved T={T}")


def decay_rate(block: np.ndarray, threshold: Optional[float] = None) -> float:
    """
    Slowest nonzero decay rate min{|Re λ| : |Re λ| > threshold} of a block.

    The default threshold is 10³ times the kernel residual scale of the block.

    Raises:
        NoNonzeroEigenvalue: if every eigenvalue is below the threshold
    """
    norm = float(np.linalg.norm(block, 1))
    if threshold is None:
        s_min = float(linalg.svdvals(block).min())
        floor = np.finfo(float).eps * norm
        kernel_scale = s_min if s_min <= KERNEL_TOL * norm else floor
        threshold = GAP_RATIO * max(kernel_scale, floor)
    rates = np.abs(linalg.eigvals(block).real)
    rates = rates[rates > threshold]
    if rates.size == 0:
        raise NoNonzeroEigenvalue(f"no eigenvalue with |Re| above {threshold:.3e}")
    return float(rates.min())


def block_rates(S: Superoperator) -> Dict[str, float]:
    """Slowest nonzero rate of every parity block (NaN when none exists)."""
    parts = parity_project(S)
    out = {}
    for name, block in parts.blocks.items():
        try:
            out[name] = decay_rate(block)
        except NoNonzeroEigenvalue:
            out[name] = float("nan")
    return out


def block_spectra(S: Superoperator) -> Dict[str, np.ndarray]:
    parts = parity_project(S)
    return {name: linalg.eigvals(b) for name, b in parts.blocks.items()}


def _laguerre_clenshaw(L: int, x: np.ndarray, c: np.ndarray) -> np.ndarray:
    # Σ_n c_n (−1)^n √(L! n!/(L+n)!) L_n^L(x) by Clenshaw recursion
    if len(c) == 1:
        y0, y1 = c[0], 0
    elif len(c) == 2:
        y0, y1 = c[0], c[1]
    else:
        k = len(c)
        y0, y1 = c[-2], c[-1]
        for i in range(3, len(c) + 1):
            k -= 1
            y0, y1 = (
                c[-i] - y1 * (float((k - 1) * (L + k - 1)) / ((L + k) * k)) ** 0.5,
                y0 - y1 * ((L + 2 * k - 1) - x) * ((L + k) * k) ** -0.5,
            )
    return y0 - y1 * ((L + 1) - x) * (L + 1) ** -0.5


def wigner_from_density(rho: DensityMatrix, grid: PhaseGrid, tail_tol: float = 1e-6) -> WignerGrid:
    """
    W(α) = (2/π) Tr[ρ D(α) Π D†(α)], normalized so that ∫ W d²α = Tr ρ.

    Raises:
        CutoffInadequate: if Tr[ρ P_{n ≥ N−5}] exceeds ``tail_tol``
    """
    tail = rho.photon_number_tail(5)
    if tail > tail_tol:
        raise CutoffInadequate(f"population {tail:.3e} in the last 5 Fock levels")
    if rho.hermiticity_defect() > 1e-10:
        logger.warning("density matrix is not Hermitian (%.3e)", rho.hermiticity_defect())

    dim = rho.dim
    two_alpha = 2.0 * grid.alpha()
    B = np.abs(two_alpha) ** 2
    weighted = rho.matrix * (2 * np.ones((dim, dim)) - np.eye(dim))
    w = weighted[0, -1] * np.ones_like(two_alpha)
    for L in range(dim - 2, -1, -1):
        w = _laguerre_clenshaw(L, B, np.diag(weighted, L)) + w * two_alpha * (L + 1) ** -0.5
    values = w.real * np.exp(-0.5 * B) * (2.0 / np.pi)
    return WignerGrid(grid, values, meta={"source": "fock", "cutoff": dim})


def match_kernel_to_wigner(
    S: Superoperator, target: WignerGrid
) -> tuple:
    """
    Least-squares combination of the physical steady states whose Wigner
    transform best matches ``target``.

    Returns:
        (DensityMatrix, WignerGrid, coefficients)
    """
    states = steady_states(S)
    basis = [wigner_from_density(s, target.grid) for s in states]
    A = np.stack([b.values.ravel() for b in basis], axis=1)
    coeffs, *_ = np.linalg.lstsq(A, target.values.ravel(), rcond=None)
    rho = sum(c * s.matrix for c, s in zip(coeffs, states))
    rho = rho / np.trace(rho)
    matched = DensityMatrix(rho, label="matched steady state")
    logger.info("kernel match coefficients: %s", np.round(coeffs, 6))
    return matched, wigner_from_density(matched, target.grid), coeffs


@dataclass
class EomResidual:
    values: np.ndarray
    norm: float
    h: float
    meta: dict = field(default_factory=dict)


def wigner_eom_residual(
    W: WignerGrid,
    params: ModelParams,
    window: Optional[Sequence[float]] = None,
    margin: int = 4,
) -> EomResidual:
    """
    Right-hand side of the Wigner equation of motion

        ∂ₜW = −[∂_α(iΔα + Gᾱ − ηα(|α|²−1)) W + c.c.]
              + 2η ∂_α∂_ᾱ (|α|² − ½) W
              + (η/4)(∂_α ∂_ᾱ² ᾱ W + c.c.)

    by centered finite differences, and its max norm over the interior
    (optionally restricted to a square window |x|, |p| ≤ ``window``).
    """
    grid = W.grid
    hx, hp = grid.h_x, grid.h_p
    alpha = grid.alpha()
    n = np.abs(alpha) ** 2
    w = W.values.astype(complex)

    def d_a(f):
        return grid_d_alpha(f, hx, hp)

    def d_ab(f):
        return grid_d_alpha_bar(f, hx, hp)

    drift = 1j * params.Delta * alpha + params.G * alpha.conj() - params.eta * alpha * (n - 1.0)
    term_drift = -2.0 * d_a(drift * w).real
    term_diff = (2.0 * params.eta * d_a(d_ab((n - 0.5) * w))).real
    term_third = 0.5 * params.eta * d_a(d_ab(d_ab(alpha.conj() * w))).real
    rhs = term_drift + term_diff + term_third

    inner = interior(rhs, margin)
    if window is not None:
        X, P = grid.mesh()
        keep = interior((np.abs(X) <= window) & (np.abs(P) <= window), margin)
        inner = inner[keep]
    return EomResidual(rhs, float(np.max(np.abs(inner))), max(hx, hp))


def wigner_eom_convergence(
    wigner_fn: Callable[[PhaseGrid], WignerGrid],
    params: ModelParams,
    grids: Sequence[PhaseGrid],
    window: float = 4.0,
    order_range=(1.7, 2.3),
) -> Dict[str, np.ndarray]:
    """
    Residual norms of ``wigner_fn`` under grid refinement and the observed
    convergence orders.

    Raises:
        GridTooCoarse: if the observed order leaves ``order_range``
    """
    norms, hs = [], []
    for grid in grids:
        res = wigner_eom_residual(wigner_fn(grid), params, window=window)
        norms.append(res.norm)
        hs.append(res.h)
        logger.debug("EOM residual h=%.4f norm=%.3e", res.h, res.norm)
    norms, hs = np.array(norms), np.array(hs)
    orders = convergence_order(norms, hs[:-1] / hs[1:])
    if np.any(orders < order_range[0]) or np.any(orders > order_range[1]):
        raise GridTooCoarse(f"observed orders {np.round(orders, 3)} outside {order_range}")
    return {"h": hs, "norm": norms, "order": orders}


def jump_operator(dim: int) -> FockOperator:
    """Two-photon loss operator a²."""
    a = annihilation(dim)
    return FockOperator(a @ a)


def full_spectrum(S: Superoperator) -> np.ndarray:
    """Eigenvalues of 𝓛, assembled from the parity blocks, sorted by decay rate."""
    lam = np.concatenate(list(block_spectra(S).values()))
    return lam[np.argsort(-lam.real)]


def spectrum_table(S: Superoperator, keep: int = 20) -> pd.DataFrame:
    """Slowest ``keep`` eigenvalues of every parity block as a DataFrame."""
    rows = []
    for name, lam in block_spectra(S).items():
        lam = lam[np.argsort(-lam.real)][:keep]
        for k, value in enumerate(lam):
            rows.append({"block": name, "index": k, "re": value.real, "im": value.imag})
    return pd.DataFrame(rows, columns=["block", "index", "re", "im"])
