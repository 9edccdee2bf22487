import numpy as np
import pytest
from hypothesis import given, strategies as st

from poisson_aoi.curves import check_grid, empirical_cdf, monotone_clamped, monotonicity_residual


def test_check_grid():
    assert check_grid([1, 2, 3]).dtype == float
    for bad in ([], [1, 1], [2, 1]):
        with pytest.raises(ValueError):
            check_grid(bad)


def test_empirical_cdf_right_continuous():
    assert empirical_cdf([5.0, 15.0], [4.9, 5.0, 10.0, 15.0, 16.0]).tolist() == [0, 0.5, 0.5, 1, 1]


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=50))
def test_monotone_clamped(values):
    v = monotone_clamped(np.array(values))
    assert np.all(np.diff(v) >= 0)
    assert np.all((v >= 0) & (v <= 1))


def test_monotonicity_residual():
    assert monotonicity_residual(np.array([0.0, 0.3, 0.2, 0.9])) == pytest.approx(0.1)
    assert monotonicity_residual(np.array([0.0, 0.5, 1.0])) == 0.0
