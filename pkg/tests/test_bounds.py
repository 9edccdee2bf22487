import numpy as np
import pytest
from hypothesis import given, strategies as st

from poisson_aoi.bounds import InversionError, age_cdf_bounds, age_of_mu, invert_age
from poisson_aoi.params import NetworkParams, TrafficParams

NONE = TrafficParams(0.1)


def test_age_of_mu_examples():
    assert age_of_mu(0.5, NONE) == pytest.approx(12.0846, abs=1e-4)
    assert age_of_mu(1e-3, NONE) > age_of_mu(1e-2, NONE)
    assert age_of_mu(1e-3, NONE) > 1e3
    with pytest.raises(ValueError):
        age_of_mu(0.0, NONE)


def test_invert_round_trip_example():
    assert invert_age(age_of_mu(0.5, NONE), NONE) == pytest.approx(0.5, abs=1e-9)


def test_age_below_minimum():
    with pytest.raises(InversionError, match="age below minimum"):
        invert_age(age_of_mu(1.0, NONE) - 1e-6, NONE)


@given(st.floats(11.0 + 1e-6, 2000.0))
def test_invert_round_trip_property(t):
    assert age_of_mu(invert_age(t, NONE), NONE) == pytest.approx(t, rel=1e-6)


def test_policy_a_inversion_round_trip():
    tr = TrafficParams(0.1, "A", 10)
    for t in np.linspace(11.01, 34.0, 20):
        assert age_of_mu(invert_age(t, tr), tr) == pytest.approx(t, rel=1e-6)


def test_non_monotone_age_map_is_rejected():
    with pytest.raises(InversionError, match="inversion invalid for these parameters"):
        invert_age(14.0, TrafficParams(0.1, "B", 10))


def test_lambda_zero_collapses_to_step():
    t = np.linspace(5, 30, 51)
    b = age_cdf_bounds(t, NetworkParams(0.0), NONE)
    step = (t >= age_of_mu(0.5, NONE)).astype(float)
    assert np.array_equal(b.lower, step) and np.array_equal(b.upper, step)


@pytest.mark.parametrize("lam, la", [(0.05, 0.1), (0.2, 0.1), (0.05, 0.3), (0.2, 0.3)])
def test_bound_ordering_and_monotonicity(lam, la):
    t = np.linspace(2, 80, 79)
    b = age_cdf_bounds(t, NetworkParams.from_db(lam, 10.0), TrafficParams(la))
    assert np.all(b.lower <= b.upper + 1e-12)
    assert np.all(np.diff(b.lower) >= 0) and np.all(np.diff(b.upper) >= 0)
    assert np.all((b.lower >= 0) & (b.upper <= 1))
    rows = list(b.rows())
    assert rows[0]["policy"] == "none" and rows[0]["D"] == ""


def test_cdf_is_zero_below_the_minimum_age():
    b = age_cdf_bounds([1.0, 5.0, 10.9], NetworkParams.from_db(0.05, 10.0), NONE)
    assert np.all(b.lower == 0) and np.all(b.upper == 0)
    assert np.all(np.isnan(b.mu_star))
