import numpy as np
import pytest
from hypothesis import given, strategies as st

from poisson_aoi.deadline import (DwellTimes, age_report, average_age_deadline, dwell_times_A,
                                  dwell_times_B, loss_and_rate_A, loss_and_rate_B, moments_B,
                                  time_fractions)
from poisson_aoi.queue import DomainError, StationaryDist, average_age, stationary_distribution

prob = st.floats(0.02, 0.98)
deadline = st.integers(1, 40)


def test_dwell_times_a_reference():
    dw = dwell_times_A(0.1, 0.5, 10)
    assert (dw.e_v0, dw.e_v1, dw.e_v2) == pytest.approx((10.0, 1.818182, 2.003906), abs=1e-6)
    assert dwell_times_A(0.5, 0.5, 10).e_v1 == pytest.approx(0.75 / 0.5625)
    assert dwell_times_A(0.1, 0.5, 60).e_v2 == pytest.approx(2.0, abs=1e-6)


def test_dwell_times_b_limits():
    assert dwell_times_B(0.1, 0.5, 200).e_v1 == pytest.approx(dwell_times_A(0.1, 0.5, 200).e_v1, rel=1e-12)
    assert dwell_times_B(0.3, 1.0, 1).e_v2 == pytest.approx(1.0)
    dw = dwell_times_B(0.1, 0.5, 10)
    assert dw.e_v2 == dwell_times_A(0.1, 0.5, 10).e_v2


def test_time_fractions_reference():
    tf = time_fractions(StationaryDist(0.891089, 0.099010, 0.009901), DwellTimes(10, 1.818182, 2.003906))
    assert (tf.p0, tf.p1, tf.p2) == pytest.approx((0.978062, 0.019759, 0.002178), abs=2e-6)
    tf = time_fractions(StationaryDist(0.5, 0.3, 0.2), DwellTimes(2, 2, 2))
    assert (tf.p0, tf.p1, tf.p2) == pytest.approx((0.5, 0.3, 0.2))
    tf = time_fractions(StationaryDist(1.0, 0.0, 0.0), DwellTimes(3, 1, 1))
    assert (tf.p0, tf.p1, tf.p2) == (1.0, 0.0, 0.0)


def test_loss_and_rate_a_reference():
    dist = stationary_distribution(0.1, 0.5)
    tf = time_fractions(dist, dwell_times_A(0.1, 0.5, 10))
    p_los, le = loss_and_rate_A(0.1, 0.5, 10, tf)
    assert p_los == pytest.approx(0.002197, abs=1e-6)
    assert le == pytest.approx(0.0997803, abs=1e-7)


def test_loss_b_certain_service():
    dist = stationary_distribution(0.3, 1.0)
    tf = time_fractions(dist, dwell_times_B(0.3, 1.0, 4))
    assert loss_and_rate_B(0.3, 1.0, 4, tf)[0] == tf.p2


@given(prob, prob, deadline)
def test_rate_identity_both_policies(la, mu, d):
    dist = stationary_distribution(la, mu)
    for dwell, loss in ((dwell_times_A, loss_and_rate_A), (dwell_times_B, loss_and_rate_B)):
        p_los, le = loss(la, mu, d, time_fractions(dist, dwell(la, mu, d)))
        assert le == pytest.approx(la * (1 - p_los), rel=1e-12, abs=1e-15)


@given(prob, prob, deadline)
def test_fractions_and_dwell_invariants(la, mu, d):
    for fn in (dwell_times_A, dwell_times_B):
        dw = fn(la, mu, d)
        assert dw.e_v0 == pytest.approx(1 / la)
        assert min(dw.e_v0, dw.e_v1, dw.e_v2) > 0
        tf = time_fractions(stationary_distribution(la, mu), dw)
        assert tf.p0 + tf.p1 + tf.p2 == pytest.approx(1.0, abs=1e-12)


@given(prob, prob, deadline)
def test_total_expectation_under_deadlines(la, mu, d):
    for pol in ("A", "B"):
        try:
            m = average_age_deadline(pol, la, mu, d).moments
        except DomainError:
            continue
        if m.pr_psi < 1:
            total = m.e_s_psi * m.pr_psi + m.e_s_psibar * (1 - m.pr_psi)
            assert total == pytest.approx(1 / mu, rel=1e-9)


def test_moments_b_limits():
    assert moments_B(0.1, 0.5, 1, 0.09, 0.9)[0] == 0.0
    e_w = moments_B(0.1, 0.5, 200, 0.09, 0.9)[0]
    assert e_w == pytest.approx(0.5 * 0.09 / 0.25, rel=1e-12)


def test_reference_ages():
    assert average_age_deadline("A", 0.1, 0.5, 10).delta0 == pytest.approx(12.408758551, rel=1e-9)
    assert average_age_deadline("B", 0.1, 0.5, 10).delta0 == pytest.approx(13.070408813, rel=1e-9)


def test_policy_a_below_policy_b_at_reference_point():
    assert average_age_deadline("A", 0.1, 0.5, 10).delta0 <= average_age_deadline("B", 0.1, 0.5, 10).delta0


def test_long_deadline_dwell_times_recover_no_deadline():
    base = average_age(0.1, 0.5)
    for pol in ("A", "B"):
        rep = average_age_deadline(pol, 0.1, 0.5, 60)
        assert rep.fractions.p0 + rep.fractions.p1 + rep.fractions.p2 == pytest.approx(1)
        assert rep.moments.e_w == pytest.approx(base.moments.e_w, rel=0.05)


def test_dispatch_and_errors():
    assert age_report(0.1, 0.5).delta0 == average_age(0.1, 0.5).delta0
    with pytest.raises(DomainError):
        average_age_deadline("none", 0.1, 0.5, 10)
    with pytest.raises(DomainError):
        average_age_deadline("A", 0.1, 0.5, 0)
    with pytest.raises(DomainError):
        average_age_deadline("A", 0.1, 0.0, 3)


def test_long_deadline_age_gap_is_documented():
    # the time-averaged occupancy weights do not reduce to the no-deadline chain
    gaps = [abs(age_report(0.1, 0.5, pol, 60).delta0 / average_age(0.1, 0.5).delta0 - 1)
            for pol in ("A", "B")]
    assert np.all(np.array(gaps) > 1e-3)
