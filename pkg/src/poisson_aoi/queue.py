"""Average age of a Geo/G/1/2 queue with per-slot success probability mu.

All quantities are in slots. The chain Z_k counts packets in the queue
(including the one in transmission) and moves on the transition matrix
returned by :func:`transition_matrix`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .params import Policy


class DomainError(ValueError):
    """Closed form evaluated outside its domain (e.g. mu = 0)."""


@dataclass(frozen=True)
class StationaryDist:
    pi0: float
    pi1: float
    pi2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.pi0, self.pi1, self.pi2])


@dataclass(frozen=True)
class AgeMoments:
    lambda_e: float
    p_los: float
    pr_psi: float
    e_y: float
    e_y2: float
    e_w: float
    e_s_psi: float
    e_s_psibar: float
    e_ty: float
    delta0: float


@dataclass(frozen=True)
class AgeReport:
    """Every derived quantity for one (lambda_a, mu, policy, D)."""

    lambda_a: float
    mu: float
    policy: Policy
    deadline_d: int | None
    pi: StationaryDist
    moments: AgeMoments
    dwell: object | None = None
    fractions: object | None = None

    @property
    def delta0(self) -> float:
        return self.moments.delta0

    def row(self) -> dict:
        out = {"lambda_a": self.lambda_a, "mu": self.mu, "policy": self.policy.value,
               "deadline_d": self.deadline_d if self.deadline_d is not None else "",
               "pi0": self.pi.pi0, "pi1": self.pi.pi1, "pi2": self.pi.pi2}
        if self.fractions is not None:
            out.update(p0=self.fractions.p0, p1=self.fractions.p1, p2=self.fractions.p2)
        out.update(asdict(self.moments))
        return out


def _check(lambda_a, mu):
    if not 0 <= lambda_a <= 1:
        raise DomainError(f"lambda_a outside [0,1] (got {lambda_a})")
    if not 0 < mu <= 1:
        raise DomainError(f"mu must lie in (0,1] (got {mu}); the queue never drains at mu = 0")


def transition_matrix(lambda_a: float, mu: float) -> np.ndarray:
    la = lambda_a
    return np.array([
        [1 - la + la * mu, la * (1 - mu), 0.0],
        [(1 - la) * mu, (1 - la) * (1 - mu) + la * mu, la * (1 - mu)],
        [0.0, mu, 1 - mu],
    ])


def stationary_distribution(lambda_a: float, mu: float) -> StationaryDist:
    _check(lambda_a, mu)
    la = lambda_a
    if mu == 1.0:
        # every slot drains the queue; also covers the reducible corner la = mu = 1
        return StationaryDist(1.0, 0.0, 0.0)
    w0 = (1 - la) * mu**2
    w1 = (1 - mu) * la * mu
    w2 = (1 - mu) ** 2 * la**2
    den = w0 + w1 + w2
    return StationaryDist(w0 / den, w1 / den, w2 / den)


def departure_conditionals(lambda_a: float, mu: float) -> tuple[float, float]:
    """Pr(psi), Pr(psi-bar): a departing packet leaves the queue empty / non-empty."""
    _check(lambda_a, mu)
    if lambda_a == 0:
        raise DomainError("no departures exist when lambda_a = 0")
    la = lambda_a
    num = (1 - la) * mu**2
    den = num + (1 - mu) * la * mu
    if den == 0.0:
        # la = mu = 1: follow pi = (1, 0, 0), the mu -> 1 limit
        return 1.0, 0.0
    pr_psi = num / den
    return pr_psi, 1.0 - pr_psi


def conditional_interdeparture(lambda_a: float, mu: float) -> dict:
    """E[Y|psi], E[Y^2|psi], E[Y|psibar], E[Y^2|psibar]."""
    la = lambda_a
    return {
        "e_y_psi": 1 / la + 1 / mu,
        "e_y2_psi": (2 * (la**2 + la * mu + mu**2) - la * mu * (la + mu)) / (la**2 * mu**2),
        "e_y_psibar": 1 / mu,
        "e_y2_psibar": (2 - mu) / mu**2,
    }


def _mix(pr_psi: float, lambda_a: float, mu: float) -> tuple[float, float]:
    c = conditional_interdeparture(lambda_a, mu)
    pb = 1.0 - pr_psi
    e_y = c["e_y_psi"] * pr_psi + c["e_y_psibar"] * pb
    e_y2 = c["e_y2_psi"] * pr_psi + c["e_y2_psibar"] * pb
    return e_y, e_y2


def interdeparture_moments(lambda_a: float, mu: float) -> tuple[float, float]:
    """(E[Y], E[Y^2]) from the psi / psi-bar decomposition."""
    pr_psi, _ = departure_conditionals(lambda_a, mu)
    return _mix(pr_psi, lambda_a, mu)


def printed_mean_interdeparture(lambda_a: float, mu: float) -> float:
    """The single-fraction closed form for E[Y] as it appears in print.

    Kept for comparison only; it disagrees with the decomposition used by
    :func:`interdeparture_moments` (the ``(1-mu)*lambda_a`` numerator term
    would have to be ``(1-mu)*lambda_a**2`` to agree).
    """
    la = lambda_a
    num = (la + mu) * (1 - la) * mu + (1 - mu) * la
    return num / (la * ((1 - la) * mu**2 + (1 - mu) * la * mu))


def effective_arrival_rate(lambda_a: float, dist: StationaryDist) -> tuple[float, float]:
    """(lambda_e, P_los); an arrival is lost iff the queue is full."""
    p_los = dist.pi2
    return lambda_a * (1.0 - p_los), p_los


def service_and_waiting_moments(lambda_a: float, mu: float, lambda_e: float
                                ) -> tuple[float, float, float]:
    """(E[W|served], E[S|psi], E[S|psibar]).

    ``E[S|psibar]`` is NaN when Pr(psibar) = 0; that branch then carries no
    weight in the age.
    """
    pr_psi, pr_psibar = departure_conditionals(lambda_a, mu)
    la = lambda_a
    e_w = (1 - mu) * lambda_e / mu**2
    if pr_psi > 0:
        e_s_psi = (1 - la) * mu / (1 - (1 - la) * (1 - mu)) ** 2 / pr_psi
    else:
        e_s_psi = math.nan
    e_s_psibar = _total_expectation_rest(mu, e_s_psi, pr_psi, pr_psibar)
    return e_w, e_s_psi, e_s_psibar


def _total_expectation_rest(mu, e_s_psi, pr_psi, pr_psibar):
    if pr_psibar <= 0:
        return math.nan
    known = e_s_psi * pr_psi if pr_psi > 0 else 0.0
    return (1 / mu - known) / pr_psibar


def cross_moment(lambda_a, mu, pr_psi, e_w, e_s_psi) -> float:
    """E[T_{k-1} Y_k]: T and Y conditionally independent given psi / psi-bar.

    The psi-bar service term enters as Pr(psibar) E[S|psibar] = 1/mu - Pr(psi) E[S|psi],
    which stays finite as Pr(psibar) -> 0 (mu -> 1) while E[S|psibar] itself diverges.
    """
    c = conditional_interdeparture(lambda_a, mu)
    pb = 1.0 - pr_psi
    s_rest = 1 / mu - (e_s_psi * pr_psi if pr_psi > 0 else 0.0)
    total = (e_w * pb + s_rest) * c["e_y_psibar"]
    if pr_psi > 0:
        total += (e_w + e_s_psi) * c["e_y_psi"] * pr_psi
    return total


def age_from_moments(lambda_e, e_y, e_y2, e_ty) -> float:
    return lambda_e * (0.5 * e_y2 + e_ty - 0.5 * e_y)


def average_age(lambda_a: float, mu: float) -> AgeReport:
    """Full age report for the queue without deadline."""
    if not 0 < lambda_a <= 1:
        raise DomainError(f"lambda_a must lie in (0,1] (got {lambda_a})")
    dist = stationary_distribution(lambda_a, mu)
    lambda_e, p_los = effective_arrival_rate(lambda_a, dist)
    pr_psi, _ = departure_conditionals(lambda_a, mu)
    e_y, e_y2 = _mix(pr_psi, lambda_a, mu)
    e_w = (1 - mu) * lambda_e / mu**2
    la = lambda_a
    e_s_psi = ((1 - la) * mu / (1 - (1 - la) * (1 - mu)) ** 2 / pr_psi) if pr_psi > 0 else math.nan
    e_s_psibar = _total_expectation_rest(mu, e_s_psi, pr_psi, 1 - pr_psi)
    e_ty = cross_moment(lambda_a, mu, pr_psi, e_w, e_s_psi)
    delta0 = age_from_moments(lambda_e, e_y, e_y2, e_ty)
    moments = AgeMoments(lambda_e, p_los, pr_psi, e_y, e_y2, e_w, e_s_psi, e_s_psibar, e_ty, delta0)
    return AgeReport(lambda_a, mu, Policy.NONE, None, dist, moments)
