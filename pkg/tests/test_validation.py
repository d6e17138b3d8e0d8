import pytest

from app.core.specfun import KummerParams, log_kummer
from app.core.validation import CRITERIA, run_acceptance
from app.data.config import Settings


def test_all_criteria_registered():
    assert sorted(CRITERIA) == [f"A{k}" for k in range(1, 9)]


def test_rate_limits_pass():
    report = run_acceptance(Settings(), only=["A5"])
    assert report["passed"]
    (entry,) = report["criteria"]
    assert entry["name"] == "A5"
    assert entry["value"] == pytest.approx(1.5, abs=0.015)


def test_special_functions_pass():
    assert run_acceptance(Settings(), only=["A8"])["passed"]


def test_sign_fault_is_reported_and_cleared():
    clean = log_kummer(KummerParams(7j, 14j), 2.0)
    report = run_acceptance(Settings(), only=["A8"], inject_fault="kummer-sign")
    assert not report["passed"]
    assert report["failed"] == ["A8"]
    assert report["fault"] == "kummer-sign"
    assert log_kummer(KummerParams(7j, 14j), 2.0) == clean


def test_unknown_fault():
    with pytest.raises(ValueError):
        run_acceptance(Settings(), only=["A5"], inject_fault="gremlins")


@pytest.mark.slow
def test_sign_fault_breaks_the_exact_wigner_checks():
    settings = Settings(n_x=121, n_p=121, fock_cutoff=60)
    report = run_acceptance(settings, only=["A1", "A2"], inject_fault="kummer-sign")
    assert set(report["failed"]) == {"A1", "A2"}


@pytest.mark.slow
@pytest.mark.parametrize("name", ["A2", "A3", "A4", "A7"])
def test_acceptance_criteria_pass(name):
    report = run_acceptance(Settings(), only=[name])
    assert report["passed"], report["criteria"]


@pytest.mark.slow
def test_fock_match_passes():
    assert run_acceptance(Settings(), only=["A1"])["passed"]
