import pytest

from poisson_aoi.validation import CHECKS, default_formulas, run_suite


def test_quick_suite_passes():
    report = run_suite(quick=True, seed=1)
    assert report["passed"], report["failed"]
    assert {c["name"] for c in report["checks"]} == {n for n, (_, q) in CHECKS.items() if q}


def test_injected_age_error_is_reported():
    good = default_formulas()["delta0"]
    report = run_suite(quick=True, only=["isolated_age"],
                       inject={"delta0": lambda la, mu, *a: 1.05 * good(la, mu, *a)})
    assert not report["passed"]
    assert report["failed"] == ["isolated_age"]


def test_injected_mean_error_is_reported():
    report = run_suite(quick=True, only=["mean_mu_closed_form"],
                       inject={"mean_mu_alpha4": lambda net, q: 0.9 * default_formulas()["mean_mu_alpha4"](net, q)})
    assert report["failed"] == ["mean_mu_closed_form"]


def test_crashing_check_counts_as_failure():
    def boom(*a, **k):
        raise RuntimeError("broken")
    report = run_suite(quick=True, only=["isolated_age"], inject={"delta0": boom})
    assert report["checks"][0]["detail"]["error"].startswith("RuntimeError")


def test_unknown_check():
    with pytest.raises(KeyError):
        run_suite(only=["no_such_check"])
