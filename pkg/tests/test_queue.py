import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import enumerated_chain, power_iterate
from poisson_aoi.queue import (DomainError, average_age, conditional_interdeparture,
                               departure_conditionals, effective_arrival_rate,
                               interdeparture_moments, printed_mean_interdeparture,
                               service_and_waiting_moments, stationary_distribution,
                               transition_matrix)

prob = st.floats(0.01, 0.99)


def test_transition_matrix_matches_enumeration():
    for la, mu in [(0.1, 0.5), (0.3, 0.8), (0.9, 0.2)]:
        assert np.allclose(transition_matrix(la, mu), enumerated_chain(la, mu), atol=1e-15)


def test_stationary_examples():
    assert stationary_distribution(0.5, 1.0).as_array().tolist() == [1.0, 0.0, 0.0]
    assert stationary_distribution(0.0, 0.5).as_array().tolist() == [1.0, 0.0, 0.0]
    pi = stationary_distribution(0.1, 0.5).as_array()
    assert np.allclose(pi, [0.891089, 0.099010, 0.009901], atol=1e-6)
    assert np.allclose(pi, power_iterate(enumerated_chain(0.1, 0.5)), atol=1e-12)


def test_mu_zero_is_a_domain_error():
    with pytest.raises(DomainError):
        stationary_distribution(0.1, 0.0)


@given(prob, prob)
def test_stationary_balance(la, mu):
    pi = stationary_distribution(la, mu).as_array()
    assert abs(pi.sum() - 1) < 1e-12
    assert np.all(pi >= 0)
    assert np.abs(pi @ transition_matrix(la, mu) - pi).max() < 1e-12


def test_departure_conditionals_examples():
    assert departure_conditionals(0.1, 0.5)[0] == pytest.approx(0.9, abs=1e-12)
    assert departure_conditionals(0.3, 1.0) == (1.0, 0.0)
    assert departure_conditionals(0.5, 0.5)[0] == pytest.approx(0.5)
    with pytest.raises(DomainError):
        departure_conditionals(0.0, 0.5)


def test_interdeparture_examples():
    e_y, e_y2 = interdeparture_moments(0.1, 0.5)
    assert e_y == pytest.approx(11.0, rel=1e-12)
    assert e_y2 == pytest.approx(213.0, rel=1e-12)
    assert interdeparture_moments(1.0, 1.0)[0] == pytest.approx(2.0)


def test_conditional_second_moment_is_sum_of_geometrics():
    # Geometric(0.1) + Geometric(0.5) on {1, 2, ...}: mean 12, variance 90 + 2
    c = conditional_interdeparture(0.1, 0.5)
    assert c["e_y2_psi"] == pytest.approx(92 + 12**2, rel=1e-12)
    assert c["e_y_psi"] == pytest.approx(12.0)


def test_printed_mean_interdeparture_differs_from_decomposition():
    # the single-fraction expression in print gives 12.8; the decomposition gives 11
    assert printed_mean_interdeparture(0.1, 0.5) == pytest.approx(12.8, rel=1e-12)
    assert interdeparture_moments(0.1, 0.5)[0] == pytest.approx(11.0)


def test_effective_arrival_rate_examples():
    d = stationary_distribution(0.1, 0.5)
    le, pl = effective_arrival_rate(0.1, d)
    assert le == pytest.approx(0.0990099, abs=1e-7)
    assert pl == pytest.approx(0.00990099, abs=1e-8)
    assert effective_arrival_rate(0.0, stationary_distribution(0.0, 0.5))[0] == 0.0
    assert effective_arrival_rate(0.4, stationary_distribution(0.4, 1.0)) == (0.4, 0.0)


def test_service_and_waiting_examples():
    e_w, s_psi, s_psibar = service_and_waiting_moments(0.1, 0.5, 0.0990099)
    assert e_w == pytest.approx(0.198020, abs=1e-6)
    assert s_psi == pytest.approx(1.652893, abs=1e-6)
    assert s_psibar == pytest.approx(5.123967, abs=1e-6)
    e_w, s_psi, s_psibar = service_and_waiting_moments(0.1, 1.0, 0.1)
    assert e_w == 0.0
    # the printed conditional-service expression evaluates to 1 - lambda_a at mu = 1
    assert s_psi == pytest.approx(0.9)
    assert math.isnan(s_psibar)


@given(prob, prob)
def test_total_expectation_of_service(la, mu):
    pr_psi, pr_bar = departure_conditionals(la, mu)
    _, s_psi, s_bar = service_and_waiting_moments(la, mu, 0.0)
    assert s_psi * pr_psi + s_bar * pr_bar == pytest.approx(1 / mu, rel=1e-9)


@given(prob, prob)
def test_moment_invariants(la, mu):
    m = average_age(la, mu).moments
    assert 0 <= m.lambda_e <= la
    assert 0 <= m.p_los <= 1 and 0 <= m.pr_psi <= 1
    assert m.e_y2 >= m.e_y**2
    assert m.delta0 >= 1


def test_average_age_reference_value():
    rep = average_age(0.1, 0.5)
    assert rep.delta0 == pytest.approx(12.084579295, rel=1e-9)
    assert rep.moments.e_ty == pytest.approx(21.054250880, rel=1e-9)


def test_average_age_decreasing_in_mu():
    ages = [average_age(0.1, mu).delta0 for mu in np.arange(0.1, 0.95, 0.1)]
    assert np.all(np.diff(ages) < 0)


def test_age_is_continuous_at_certain_service():
    assert average_age(0.1, 1.0).delta0 == pytest.approx(average_age(0.1, 1 - 1e-9).delta0, rel=1e-7)
    assert average_age(0.1, 1.0).delta0 == pytest.approx(11.0)


def test_saturated_deterministic_queue():
    # one arrival and one delivery per slot, one-slot transmission delay
    assert average_age(1.0, 1.0).delta0 == pytest.approx(2.0, abs=1e-12)


def test_average_age_domain():
    with pytest.raises(DomainError):
        average_age(0.0, 0.5)
    with pytest.raises(DomainError):
        average_age(0.1, 0.0)
