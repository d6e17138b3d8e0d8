import numpy as np
import pytest
from scipy.integrate import solve_ivp

from app.core.analytic import effective_potential
from app.core.errors import (
    NotBistable,
    OutsideAsymptoticWindow,
    RateFormsDisagree,
    SingularAtOrigin,
    StiffnessFailure,
)
from app.core.instanton import (
    CRITICAL_WINDOW,
    KeldyshFields,
    chi_alpha_rhs,
    critical_slope,
    downhill_path,
    effective_hamiltonian_L,
    f_branches,
    fixed_points,
    flow_jacobian,
    instanton_action,
    integrate_fields,
    integrate_instanton,
    keldysh_rhs,
    ln_rate_closed_form,
    ln_rate_critical,
    phase_portrait,
    quantum_field_chi,
    rate_sweep,
    semiclassical_flow,
)
from app.core.model import ModelParams
from app.utils.helpers import point_wirtinger

LN_RATE_DEFAULT = -2 * np.sqrt(51.0) + 14.0 * np.arctan2(np.sqrt(51.0), 7.0)


def test_fixed_points(params):
    fp = fixed_points(params)
    assert abs(semiclassical_flow(fp.alpha0, params)) < 1e-12
    assert abs(fp.alpha0) ** 2 == pytest.approx(np.sqrt(51.0))
    assert fp.as_list()[1] == -fp.alpha0


def test_fixed_points_need_bistability():
    with pytest.raises(NotBistable):
        fixed_points(ModelParams(5.0, 5.0, 1.0))


def test_origin_is_a_saddle(params):
    lam = np.linalg.eigvals(flow_jacobian(lambda a: semiclassical_flow(a, params), 0j))
    np.testing.assert_allclose(np.sort(lam.real), [-np.sqrt(51.0), np.sqrt(51.0)], rtol=1e-6)


def test_quantum_field_vanishes_at_fixed_points(params):
    alpha0 = fixed_points(params).alpha0
    assert abs(quantum_field_chi(alpha0, params)) < 1e-12
    assert quantum_field_chi(0j, params) == 0


def test_manifold_has_zero_energy(params):
    rng = np.random.default_rng(3)
    alpha = rng.uniform(0.2, 3.0, 20) * np.exp(1j * rng.uniform(0.1, 1.4, 20))
    chi = quantum_field_chi(alpha, params)
    L = effective_hamiltonian_L(alpha, alpha.conj(), chi, chi.conj(), params)
    assert np.max(np.abs(L)) < 1e-9


def test_chi_is_half_the_potential_gradient(params):
    for a in (0.5 + 0.4j, 1.7 + 1.2j, 0.3 + 2.5j):
        d_alpha, _ = point_wirtinger(lambda z: effective_potential(z, params), a)
        assert quantum_field_chi(a, params) == pytest.approx(0.5 * d_alpha, abs=1e-6)


def test_chi_reflection(params):
    reflected = ModelParams(params.G, -params.Delta, params.eta)
    a = 1.1 + 0.7j
    assert quantum_field_chi(a, reflected) == pytest.approx(np.conj(quantum_field_chi(np.conj(a), params)))


def test_f_branches(params, params_zero_detuning):
    with pytest.raises(SingularAtOrigin):
        f_branches(0j, params, "plus")
    assert f_branches(2.0 + 0j, params_zero_detuning, "minus") == pytest.approx(-np.sqrt(10.0))
    with pytest.raises(ValueError):
        f_branches(1.0, params, "sideways")


def test_keldysh_renaming_round_trip():
    fields = KeldyshFields.from_alpha_chi(1 + 2j, 1 - 2j, 0.3j, -0.3j)
    np.testing.assert_allclose(fields.to_alpha_chi(), (1 + 2j, 1 - 2j, 0.3j, -0.3j))
    assert KeldyshFields.from_array(fields.as_array()) == fields


def test_four_field_flow_conserves_liouvillian(params):
    start = KeldyshFields(1.0 + 0.5j, 1.0 - 0.5j, 0.05 - 0.02j, 0.05 + 0.02j)
    evolution = integrate_fields(start, params, t_final=0.3)
    assert evolution.drift < 1e-7 * max(1.0, abs(evolution.liouvillian[0]))


def _random_fields(rng, scale=1.0):
    return tuple(scale * complex(*rng.uniform(-1.0, 1.0, 2)) for _ in range(4))


def test_keldysh_equations_match_alpha_chi_form(params):
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, ab, c, cb = _random_fields(rng, 2.0)
        four_field = keldysh_rhs(KeldyshFields.from_alpha_chi(a, ab, c, cb), params).as_array()
        renamed = KeldyshFields.from_alpha_chi(*chi_alpha_rhs(a, ab, c, cb, params)).as_array()
        scale = np.max(np.abs(renamed))
        np.testing.assert_allclose(four_field, renamed, rtol=1e-13, atol=1e-13 * scale)


def test_alpha_chi_equations_follow_from_L(params):
    rng = np.random.default_rng(8)
    h = 1e-6
    for _ in range(10):
        point = np.array(_random_fields(rng, 1.5))
        grad = []
        for k in range(4):
            step = np.zeros(4, dtype=complex)
            step[k] = h
            up = effective_hamiltonian_L(*(point + step), params)
            down = effective_hamiltonian_L(*(point - step), params)
            grad.append((up - down) / (2 * h))
        d_a, d_ab, d_c, d_cb = chi_alpha_rhs(*point, params)
        expected = np.array([grad[2], grad[3], -grad[0], -grad[1]])
        np.testing.assert_allclose([d_a, d_ab, d_c, d_cb], expected, rtol=1e-6, atol=1e-6)


def test_alpha_chi_flow_conserves_L(params):
    rng = np.random.default_rng(9)

    def rhs(_, y):
        return np.array(chi_alpha_rhs(*y, params))

    for _ in range(5):
        a = complex(*rng.uniform(-1.0, 1.0, 2))
        c = 0.05 * complex(*rng.uniform(-1.0, 1.0, 2))
        y0 = np.array([a, np.conj(a), c, np.conj(c)])
        times = np.linspace(0.0, 0.1, 21)
        sol = solve_ivp(rhs, (0.0, 0.1), y0, method="DOP853", rtol=1e-11, atol=1e-13, t_eval=times)
        assert sol.success
        L = np.array([effective_hamiltonian_L(*y, params) for y in sol.y.T])
        assert np.max(np.abs(L - L[0])) < 1e-7 * max(1.0, abs(L[0]))


def test_instanton_endpoints_and_action(params):
    traj = integrate_instanton(params, n_samples=4000)
    alpha0 = fixed_points(params).alpha0
    assert abs(traj.alpha[0] - alpha0) < 1e-4 * abs(alpha0)
    assert abs(traj.alpha[-1]) < 1e-4 * abs(alpha0)
    action = instanton_action(traj)
    assert action.real == pytest.approx(LN_RATE_DEFAULT, rel=1e-3)
    frame = traj.to_frame()
    assert list(frame.columns) == ["t", "re_alpha", "im_alpha", "re_chi", "im_chi", "abs_L"]
    assert np.all(np.diff(frame["t"]) >= 0)


def test_instanton_zero_detuning(params_zero_detuning):
    traj = integrate_instanton(params_zero_detuning, n_samples=4000)
    assert instanton_action(traj).real == pytest.approx(-20.0, rel=1e-3)


@pytest.mark.parametrize("which", ["minus_attractor", "plus_attractor"])
def test_instanton_symmetric_images(params, which):
    base = instanton_action(integrate_instanton(params, n_samples=4000)).real
    image = instanton_action(integrate_instanton(params, which, n_samples=4000)).real
    reflected = ModelParams(params.G, -params.Delta, params.eta)
    mirrored = instanton_action(integrate_instanton(reflected, which, n_samples=4000)).real
    assert image == pytest.approx(base, rel=1e-6)
    assert mirrored == pytest.approx(base, rel=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("G, Delta, eta", [(3.0, 1.0, 1.0), (6.0, 5.0, 0.5), (8.0, 2.0, 2.0)])
def test_instanton_action_matches_closed_form(G, Delta, eta):
    p = ModelParams(G, Delta, eta)
    action = instanton_action(integrate_instanton(p, n_samples=5000)).real
    assert action == pytest.approx(ln_rate_closed_form(p).ln_rate, rel=1e-3)


def test_downhill_path_reaches_other_attractor(params):
    path = downhill_path(params)
    alpha0 = fixed_points(params).alpha0
    assert abs(path.alpha[0]) < 1e-3
    assert abs(path.alpha[-1] + alpha0) < 1e-3 * abs(alpha0)
    assert path.kind == "downhill"


def test_closed_form_rate(params):
    result = ln_rate_closed_form(params)
    assert result.ln_rate == pytest.approx(-3.147, abs=5e-3)
    assert result.ln_rate == pytest.approx(result.potential_form, abs=1e-9)
    assert result.regime == "bistable"
    assert result.ln_rate_critical is None
    with pytest.raises(OutsideAsymptoticWindow):
        ln_rate_critical(params)


def test_zero_detuning_limit():
    G, D = 10.0, 1e-5
    rate = ln_rate_closed_form(ModelParams(G, D, 1.0)).ln_rate
    assert rate == pytest.approx(-2 * G + np.pi * D, abs=1e-8)


def test_near_critical_form():
    p = ModelParams(10.0, 9.99, 1.0)
    result = ln_rate_closed_form(p)
    assert result.regime == "critical"
    assert result.ln_rate_critical == pytest.approx(result.ln_rate, rel=1e-2)


def test_critical_power_law():
    assert critical_slope(10.0, 1.0).slope == pytest.approx(1.5, abs=0.01)


def test_rate_sweep():
    sweep = rate_sweep((5.0, 6.0, 7.0), n_delta=50)
    assert list(sweep.columns) == ["G", "Delta", "eta", "ln_rate", "ln_rate_critical"]
    starts = sweep[sweep["Delta"] == 0.0].set_index("G")["ln_rate"]
    np.testing.assert_allclose(starts.loc[[5.0, 6.0, 7.0]], [-10.0, -12.0, -14.0])
    for _, curve in sweep.groupby("G"):
        assert np.all(np.diff(curve.sort_values("Delta")["ln_rate"]) > 0)


def test_phase_portrait_samples(params):
    frame = phase_portrait(params, extent=3.0, n=11)
    assert frame.shape == (121, 4)
    center = frame.iloc[60]
    assert abs(center["x"]) < 1e-12 and abs(center["p"]) < 1e-12
    assert abs(center["dx"]) < 1e-12 and abs(center["dp"]) < 1e-12


def test_downhill_path_reports_unfinished_flow(params):
    with pytest.raises(StiffnessFailure):
        downhill_path(params, t_max=1e-3)


def test_rate_forms_must_agree(params, monkeypatch):
    def shifted(alpha, p, *args):
        return effective_potential(alpha, p, *args) + 1e-6 * abs(alpha)

    monkeypatch.setattr("app.core.instanton.effective_potential", shifted)
    with pytest.raises(RateFormsDisagree):
        ln_rate_closed_form(params)


@pytest.mark.parametrize("G", [5.0, 6.0, 7.0, 10.0])
def test_critical_window_includes_its_swept_edge(G):
    gaps = np.geomspace(1e-4, CRITICAL_WINDOW, 20)
    sweep = rate_sweep([G], delta_grid=G * (1.0 - gaps))
    assert len(sweep) == 20
    assert sweep["ln_rate_critical"].notna().all()


def test_rates_and_attractors_invariant_under_scaling(params):
    scaled = params.scaled(3.0)
    expected = ln_rate_closed_form(params).ln_rate
    assert ln_rate_closed_form(scaled).ln_rate == pytest.approx(expected, rel=1e-12)
    assert fixed_points(scaled).alpha0 == pytest.approx(fixed_points(params).alpha0, rel=1e-12)
