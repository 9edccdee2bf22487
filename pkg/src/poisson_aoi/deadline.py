"""Average age under deterministic deadlines.

Policy A drops a packet that has waited D slots without entering service;
policy B drops the packet in service after D slots of unsuccessful service.
Occupancy fractions come from time averaging: the stationary distribution of
the no-deadline chain weighted by the mean dwell time per visit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import Policy
from .queue import (AgeMoments, AgeReport, DomainError, StationaryDist, _mix,
                    _total_expectation_rest, age_from_moments, cross_moment,
                    stationary_distribution)


@dataclass(frozen=True)
class DwellTimes:
    e_v0: float
    e_v1: float
    e_v2: float


@dataclass(frozen=True)
class TimeFractions:
    p0: float
    p1: float
    p2: float


def _check(lambda_a, mu, d):
    if not 0 < lambda_a <= 1:
        raise DomainError(f"lambda_a must lie in (0,1] (got {lambda_a})")
    if not 0 < mu <= 1:
        raise DomainError(f"mu must lie in (0,1] (got {mu})")
    if int(d) != d or d < 1:
        raise DomainError(f"deadline must be a positive integer (got {d})")


def _e_v2(mu, d):
    return (1 + (mu**2 * d + mu - 1) * (1 - mu) ** d) / mu


def dwell_times_A(lambda_a: float, mu: float, d: int) -> DwellTimes:
    _check(lambda_a, mu, d)
    c = (1 - mu) * (1 - lambda_a)
    e_v1 = (mu + (1 - mu) * lambda_a) / (1 - c) ** 2
    return DwellTimes(1 / lambda_a, e_v1, _e_v2(mu, d))


def dwell_times_B(lambda_a: float, mu: float, d: int) -> DwellTimes:
    _check(lambda_a, mu, d)
    la = lambda_a
    c = (1 - mu) * (1 - la)
    lead = la * (1 - mu) + mu
    cd = c**d
    e_v1 = (lead * (1 - (d + 1) * cd) / (1 - c) ** 2
            + lead * d * cd * c / (1 - c) ** 2
            + d * cd)
    return DwellTimes(1 / la, e_v1, _e_v2(mu, d))


def time_fractions(dist: StationaryDist, dwell: DwellTimes) -> TimeFractions:
    w = (dist.pi0 * dwell.e_v0, dist.pi1 * dwell.e_v1, dist.pi2 * dwell.e_v2)
    total = sum(w)
    return TimeFractions(*(x / total for x in w))


def loss_and_rate_A(lambda_a, mu, d, tf: TimeFractions) -> tuple[float, float]:
    q = (1 - mu) ** d
    p_los = tf.p2 + tf.p1 * q
    return p_los, lambda_a * (tf.p0 + tf.p1 * (1 - q))


def loss_and_rate_B(lambda_a, mu, d, tf: TimeFractions) -> tuple[float, float]:
    q = (1 - mu) ** d
    p_los = tf.p2 + (tf.p0 + tf.p1) * q
    return p_los, lambda_a * (tf.p0 + tf.p1) * (1 - q)


def pr_psi_from_fractions(tf: TimeFractions) -> float:
    return tf.p0 / (tf.p0 + tf.p1)


def moments_A(lambda_a, mu, d, p_los, lambda_e, pr_psi) -> tuple[float, float, float]:
    """(E[W|served], E[S|psi], E[S|psibar]) under policy A."""
    la = lambda_a
    scale = 1 - la - la * p_los
    if scale <= 0:
        raise DomainError(f"1 - lambda_a - lambda_a*P_los = {scale} <= 0")
    e_w = (1 - mu) * lambda_e / mu**2
    if pr_psi > 0:
        bracket = ((1 - la) / (1 - (1 - la) * (1 - mu))
                   - la**2 * p_los**2 / ((1 - la) * (1 - (1 - mu) * la * p_los)))
        e_s_psi = (1 - la) * mu / (pr_psi * scale) * bracket
    else:
        e_s_psi = math.nan
    return e_w, e_s_psi, _total_expectation_rest(mu, e_s_psi, pr_psi, 1 - pr_psi)


def moments_B(lambda_a, mu, d, lambda_e, pr_psi) -> tuple[float, float, float]:
    """(E[W|served], E[S|psi], E[S|psibar]) under policy B."""
    la = lambda_a
    if 1 - la <= 0:
        raise DomainError("policy-B service moments need lambda_a < 1")
    tail = (1 - mu) ** (d - 1)
    e_w = ((1 - mu) / mu**2 * (1 - tail) * lambda_e
           + d * (d - 1) / 2 * tail * lambda_e)
    if pr_psi > 0:
        c = (1 - mu) * (1 - la)
        cd = c**d
        total = (mu * (1 - la) * (1 - (d + 1) * cd) / (1 - c) ** 2
                 + d * mu * (1 - la) * cd * c / (1 - c) ** 2)
        e_s_psi = total / pr_psi
    else:
        e_s_psi = math.nan
    return e_w, e_s_psi, _total_expectation_rest(mu, e_s_psi, pr_psi, 1 - pr_psi)


def average_age_deadline(policy, lambda_a: float, mu: float, d: int) -> AgeReport:
    policy = Policy.parse(policy)
    if policy is Policy.NONE:
        raise DomainError("average_age_deadline needs policy A or B")
    _check(lambda_a, mu, d)
    dist = stationary_distribution(lambda_a, mu)
    if policy is Policy.A:
        dwell = dwell_times_A(lambda_a, mu, d)
        tf = time_fractions(dist, dwell)
        p_los, lambda_e = loss_and_rate_A(lambda_a, mu, d, tf)
        pr_psi = pr_psi_from_fractions(tf)
        e_w, e_s_psi, e_s_psibar = moments_A(lambda_a, mu, d, p_los, lambda_e, pr_psi)
    else:
        dwell = dwell_times_B(lambda_a, mu, d)
        tf = time_fractions(dist, dwell)
        p_los, lambda_e = loss_and_rate_B(lambda_a, mu, d, tf)
        pr_psi = pr_psi_from_fractions(tf)
        e_w, e_s_psi, e_s_psibar = moments_B(lambda_a, mu, d, lambda_e, pr_psi)
    e_y, e_y2 = _mix(pr_psi, lambda_a, mu)
    e_ty = cross_moment(lambda_a, mu, pr_psi, e_w, e_s_psi)
    delta0 = age_from_moments(lambda_e, e_y, e_y2, e_ty)
    moments = AgeMoments(lambda_e, p_los, pr_psi, e_y, e_y2, e_w, e_s_psi, e_s_psibar, e_ty, delta0)
    return AgeReport(lambda_a, mu, policy, int(d), dist, moments, dwell, tf)


def age_report(lambda_a: float, mu: float, policy=Policy.NONE, d: int | None = None) -> AgeReport:
    """Dispatch on the policy."""
    from .queue import average_age
    policy = Policy.parse(policy)
    if policy is Policy.NONE:
        return average_age(lambda_a, mu)
    return average_age_deadline(policy, lambda_a, mu, d)
