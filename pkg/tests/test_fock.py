import numpy as np
import pytest

from app.core.analytic import wigner_exact
from app.core.errors import CutoffInadequate, CutoffTooSmall, MemoryBudgetExceeded, StepTooLarge
from app.core.fock import (
    BLOCKS,
    DensityMatrix,
    annihilation,
    block_rates,
    build_hamiltonian,
    build_liouvillian,
    decay_rate,
    evolve,
    full_spectrum,
    jump_operator,
    kernel_basis,
    kernel_projection,
    parity_indices,
    parity_project,
    spectrum_table,
    steady_states,
    unvectorize,
    vectorize,
    wigner_eom_residual,
    wigner_from_density,
)
from app.core.model import ModelParams, WignerGrid, make_grid

LOSS_ONLY = ModelParams(G=0.0, Delta=0.0, eta=1.0)


def test_vectorization_is_column_stacking():
    rho = np.arange(9).reshape(3, 3)
    v = vectorize(rho)
    assert v[1] == rho[1, 0]
    assert v[3] == rho[0, 1]
    np.testing.assert_array_equal(unvectorize(v, 3), rho)


def test_annihilation_and_jump():
    a = annihilation(4)
    np.testing.assert_allclose(a[0, 1], 1.0)
    np.testing.assert_allclose(a[2, 3], np.sqrt(3.0))
    np.testing.assert_allclose(jump_operator(4).matrix[0, 2], np.sqrt(2.0))


def test_hamiltonian_is_hermitian(params):
    H = build_hamiltonian(params, 3)
    assert H.dim == 3
    assert H.hermiticity_defect() < 1e-14
    assert H.matrix[0, 2] == pytest.approx(-0.5j * params.G * np.sqrt(2.0))


def test_cutoff_limits(params):
    with pytest.raises(CutoffTooSmall):
        build_hamiltonian(params, 2)
    with pytest.raises(CutoffTooSmall):
        build_liouvillian(params, 3)
    with pytest.raises(MemoryBudgetExceeded):
        build_liouvillian(params, 81)


def test_liouvillian_preserves_trace(small_params):
    S = build_liouvillian(small_params, 12)
    identity = vectorize(np.eye(12))
    assert np.max(np.abs(identity @ S.matrix)) < 1e-12 * S.norm


def test_liouvillian_conserves_parity(small_params):
    parts = parity_project(build_liouvillian(small_params, 12))
    assert parts.off_block_norm == 0.0
    assert set(parts.blocks) == set(BLOCKS)
    assert sum(len(i) for i in parity_indices(12).values()) == 144


def test_two_photon_loss_keeps_vacuum_and_single_photon():
    S = build_liouvillian(LOSS_ONLY, 8)
    states = steady_states(S)
    assert len(states) == 2
    populations = sorted(np.real(np.diag(s.matrix))[:2].argmax() for s in states)
    assert populations == [0, 1]
    kernels = kernel_basis(S)
    assert kernels["even-odd"].vectors.shape[1] == 1


def test_loss_only_block_rates():
    rates = block_rates(build_liouvillian(LOSS_ONLY, 8))
    assert rates["even-even"] == pytest.approx(1.0, rel=1e-10)
    assert rates["odd-odd"] == pytest.approx(3.0, rel=1e-10)
    assert rates["even-odd"] == pytest.approx(1.0, rel=1e-10)


def test_decay_of_two_photons():
    S = build_liouvillian(LOSS_ONLY, 6)
    rho = DensityMatrix.fock(2, 6)
    rk4 = evolve(rho, S, 0.5, 1e-3)
    eig = evolve(rho, S, 0.5, 0.0, method="eig")
    assert rk4.matrix[2, 2].real == pytest.approx(np.exp(-1.0), rel=1e-8)
    assert eig.matrix[0, 0].real == pytest.approx(1.0 - np.exp(-1.0), rel=1e-8)
    assert rk4.trace == pytest.approx(1.0, abs=1e-12)


def test_step_too_large():
    S = build_liouvillian(LOSS_ONLY, 6)
    with pytest.raises(StepTooLarge):
        evolve(DensityMatrix.fock(2, 6), S, 1.0, 1.0)


def test_steady_states_are_physical(small_params):
    S = build_liouvillian(small_params)
    states = steady_states(S)
    assert len(states) == 2
    for rho in states:
        assert rho.trace == pytest.approx(1.0)
        assert rho.hermiticity_defect() < 1e-10
        assert rho.min_eigenvalue() > -1e-8
        assert np.linalg.norm(S.apply(rho.matrix)) < 1e-9 * S.norm


def test_kernel_projection_is_idempotent(small_params):
    S = build_liouvillian(small_params, 20)
    once = kernel_projection(S, DensityMatrix.fock(0, 20))
    twice = kernel_projection(S, once)
    np.testing.assert_allclose(twice.matrix, once.matrix, atol=1e-10)


def test_decay_rate_of_diagonal_block():
    block = np.diag([0.0, -0.5, -2.0 + 1j])
    assert decay_rate(block) == pytest.approx(0.5)


def test_spectrum_is_stable(small_params):
    S = build_liouvillian(small_params, 16)
    lam = full_spectrum(S)
    assert lam.size == 256
    assert np.max(lam.real) < 1e-9
    table = spectrum_table(S, keep=5)
    assert list(table.columns) == ["block", "index", "re", "im"]
    assert len(table) == 20


def test_fock_state_wigner_values():
    grid = make_grid(((-3, 3), (-3, 3)), 61, 61)
    vacuum = wigner_from_density(DensityMatrix.fock(0, 10), grid)
    one = wigner_from_density(DensityMatrix.fock(1, 10), grid)
    alpha = grid.alpha()
    np.testing.assert_allclose(vacuum.values, 2 / np.pi * np.exp(-2 * np.abs(alpha) ** 2), atol=1e-12)
    expected = 2 / np.pi * (4 * np.abs(alpha) ** 2 - 1) * np.exp(-2 * np.abs(alpha) ** 2)
    np.testing.assert_allclose(one.values, expected, atol=1e-12)
    wide = make_grid(((-6, 6), (-6, 6)), 121, 121)
    assert wigner_from_density(DensityMatrix.fock(1, 10), wide).mass() == pytest.approx(1.0, abs=1e-8)


def test_wigner_rejects_populated_tail():
    grid = make_grid(((-3, 3), (-3, 3)), 11, 11)
    with pytest.raises(CutoffInadequate):
        wigner_from_density(DensityMatrix.fock(9, 10), grid)


def test_steady_state_wigner_is_even(small_params):
    grid = make_grid(((-4, 4), (-4, 4)), 41, 41)
    rho = steady_states(build_liouvillian(small_params))[0]
    W = wigner_from_density(rho, grid).values
    np.testing.assert_allclose(W, W[::-1, ::-1], atol=1e-10)


def _vacuum(grid):
    values = 2 / np.pi * np.exp(-2 * np.abs(grid.alpha()) ** 2)
    return WignerGrid(grid, values)


def test_eom_residual_of_vacuum_vanishes_with_refinement():
    norms = []
    for n in (81, 161, 321):
        grid = make_grid(((-4, 4), (-4, 4)), n, n)
        norms.append(wigner_eom_residual(_vacuum(grid), LOSS_ONLY, window=3.0).norm)
    assert norms[1] < 0.35 * norms[0]
    assert norms[2] < 0.35 * norms[1]


def test_eom_residual_separates_stationary_from_perturbed(params):
    grid = make_grid(((-5, 5), (-5, 5)), 201, 201)
    stationary = wigner_eom_residual(wigner_exact(params, grid), params, window=4.0).norm
    mismatched = ModelParams(params.G, 3.0, params.eta)
    perturbed = wigner_eom_residual(wigner_exact(mismatched, grid), params, window=4.0).norm
    assert perturbed >= 10 * stationary


def test_evolution_from_vacuum_ends_in_the_kernel(small_params):
    S = build_liouvillian(small_params, 20)
    late = evolve(DensityMatrix.fock(0, 20), S, 1000.0, 0.0, method="eig")
    assert np.linalg.norm(S.apply(late.matrix)) < 1e-7 * S.norm
    np.testing.assert_allclose(kernel_projection(S, late).matrix, late.matrix, atol=1e-7)
    even = steady_states(S)[0]
    np.testing.assert_allclose(late.matrix, even.matrix, atol=1e-6)


def test_decay_rates_converge_with_cutoff(small_params):
    coarse, fine = (block_rates(build_liouvillian(small_params, n)) for n in (24, 32))
    for name in ("even-even", "even-odd"):
        assert fine[name] == pytest.approx(coarse[name], rel=1e-6)


def test_rates_scale_with_parameters(small_params):
    base = block_rates(build_liouvillian(small_params, 20))
    scaled = block_rates(build_liouvillian(small_params.scaled(2.0), 20))
    for name in ("even-even", "even-odd"):
        assert scaled[name] == pytest.approx(2.0 * base[name], rel=1e-7)
