import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def enumerated_chain(lambda_a, mu):
    """Occupancy chain built by enumerating (arrival, service) outcomes of one slot."""
    P = np.zeros((3, 3))
    for n in range(3):
        for a, pa in ((0, 1 - lambda_a), (1, lambda_a)):
            m = min(n + a, 2)
            if m == 0:
                P[n, 0] += pa
                continue
            P[n, m - 1] += pa * mu
            P[n, m] += pa * (1 - mu)
    return P


def power_iterate(P, tol=1e-15, max_iter=10**6):
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iter):
        nxt = pi @ P
        if np.abs(nxt - pi).max() < tol:
            return nxt
        pi = nxt
    return pi


@pytest.fixture
def fig4_net():
    from poisson_aoi import NetworkParams
    return NetworkParams.from_db(0.05, 10.0)
