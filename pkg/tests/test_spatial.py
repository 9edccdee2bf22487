import math

import numpy as np
import pytest
from scipy import integrate

from poisson_aoi.params import NetworkParams, RngSpec
from poisson_aoi.spatial import (ActivityModel, LinkRealization, conditional_success_probability,
                                 mean_mu_alpha4, monte_carlo_mu_cdf, sample_mu, sample_ppp,
                                 window_tail)


def test_empty_ppp_when_lambda_zero():
    link = sample_ppp(NetworkParams(0.0), 100.0, RngSpec(1, 0))
    assert link.interferer_distances.size == 0
    assert conditional_success_probability(link, NetworkParams(0.0), ActivityModel(0.5)) == 0.5


def test_ppp_count_mean():
    net = NetworkParams(0.05)
    gen = RngSpec(3, 0).generator()
    counts = np.array([sample_ppp(net, 100.0, gen).interferer_distances.size for _ in range(10_000)])
    expected = 0.05 * math.pi * 1e4
    assert abs(counts.mean() - expected) < 3 * math.sqrt(expected / counts.size)
    assert counts.var(ddof=1) == pytest.approx(expected, rel=0.05)


def test_ppp_points_inside_window_and_reproducible():
    a = sample_ppp(NetworkParams(0.05), 50.0, RngSpec(4, 2))
    b = sample_ppp(NetworkParams(0.05), 50.0, RngSpec(4, 2))
    assert np.array_equal(a.interferer_distances, b.interferer_distances)
    assert np.all((a.interferer_distances > 0) & (a.interferer_distances <= 50.0))


def test_single_equal_power_interferer():
    net = NetworkParams(0.05, r0=1.0, theta=1.0, p=1.0)
    link = LinkRealization(np.array([1.0]), 1.0, 10.0)
    assert conditional_success_probability(link, net, ActivityModel(1.0)) == pytest.approx(0.5)


def test_far_interferer_vanishes():
    net = NetworkParams(0.05)
    link = LinkRealization(np.array([1e6]), 1.0, 1e7)
    assert conditional_success_probability(link, net, ActivityModel(0.5)) == pytest.approx(0.5, rel=1e-12)


def test_adding_an_interferer_never_helps():
    net = NetworkParams(0.05)
    rng = np.random.default_rng(0)
    d = rng.uniform(0.5, 20, 30)
    mus = [conditional_success_probability(LinkRealization(d[:k], 1.0, 20.0), net, ActivityModel(0.5))
           for k in range(31)]
    assert np.all(np.diff(mus) <= 0)
    assert 0 <= mus[-1] <= net.p


def test_laplace_integral_identity():
    theta, r0 = 10.0, 1.0
    val, _ = integrate.quad(lambda r: 2 * math.pi * r * theta * r0**4 / (r**4 + theta * r0**4), 0, np.inf)
    assert val == pytest.approx(math.pi**2 * math.sqrt(theta) * r0**2 / 2, rel=1e-10)


def test_mean_mu_closed_form_value():
    assert mean_mu_alpha4(NetworkParams.from_db(0.05, 10.0), 0.5) == pytest.approx(0.338484, abs=1e-6)


def test_monte_carlo_lambda_zero_is_step():
    net = NetworkParams(0.0)
    c = monte_carlo_mu_cdf(net, ActivityModel(0.5), 10, 100.0, [0.2, 0.5, 0.7], RngSpec(1, 0))
    assert c.values.tolist() == [0.0, 1.0, 1.0]


def test_monte_carlo_seed_consistency():
    net = NetworkParams.from_db(0.05, 10.0)
    s = np.linspace(0.05, 0.45, 9)
    a = monte_carlo_mu_cdf(net, ActivityModel(0.5), 5000, 100.0, s, RngSpec(1, 0))
    b = monte_carlo_mu_cdf(net, ActivityModel(0.5), 5000, 100.0, s, RngSpec(2, 0))
    sig = np.sqrt(a.meta["sigma"] ** 2 + b.meta["sigma"] ** 2)
    assert np.all(np.abs(a.values - b.values) <= 4 * sig + 1e-12)
    assert np.all(np.diff(a.values) >= 0)
    assert a.meta["window_tail"] == pytest.approx(window_tail(net, 0.5, 100.0))


def test_sample_mu_mean_near_closed_form():
    net = NetworkParams.from_db(0.05, 10.0)
    mu = sample_mu(net, ActivityModel(0.5), 20_000, 100.0, RngSpec(11, 0))
    se = mu.std(ddof=1) / math.sqrt(mu.size)
    assert abs(mu.mean() - mean_mu_alpha4(net, 0.5)) < 3 * se + window_tail(net, 0.5, 100.0)
