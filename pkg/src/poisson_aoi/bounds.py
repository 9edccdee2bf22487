"""Bounds on the cdf of the per-link average age.

The average age is a decreasing function of the link success probability mu,
so P(age <= t) = P(mu >= mu*(t)) = 1 - F(mu*(t)) with mu*(t) the inverse of
the age map. The dummy-packet cdf of mu (stochastically smallest mu) gives the
lower bound, the drop-system cdf the upper one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .curves import check_grid
from .deadline import age_report
from .meta import QuadratureSpec, System, cdf_at
from .params import NetworkParams, Policy, TrafficParams

MU_LO = 1e-4
N_TAB = 64


class InversionError(ValueError):
    pass


def age_of_mu(mu: float, traffic: TrafficParams) -> float:
    """Average age of a link with per-slot success probability ``mu``."""
    if not 0 < mu <= 1:
        raise ValueError(f"mu outside (0,1] (got {mu})")
    d = traffic.deadline_d if traffic.policy is not Policy.NONE else None
    return float(age_report(traffic.lambda_a, mu, traffic.policy, d).delta0)


@lru_cache(maxsize=128)
def _tabulate(traffic: TrafficParams, mu_lo: float) -> tuple[np.ndarray, np.ndarray]:
    mus = np.geomspace(mu_lo, 1.0, N_TAB)
    ages = np.array([age_of_mu(m, traffic) for m in mus])
    if np.any(np.diff(ages) >= 0):
        k = int(np.argmax(np.diff(ages) >= 0))
        raise InversionError(
            f"inversion invalid for these parameters: age map not decreasing in mu near "
            f"mu={mus[k]:.4g} (age {ages[k]:.6g} -> {ages[k + 1]:.6g})")
    return mus, ages


def check_invertible(traffic: TrafficParams, mu_lo: float = MU_LO) -> None:
    _tabulate(traffic, mu_lo)


def invert_age(t: float, traffic: TrafficParams, mu_lo: float = MU_LO, tol: float = 1e-10) -> float:
    """mu* in [mu_lo, 1] with age_of_mu(mu*) = t.

    Ages at or above age_of_mu(mu_lo) return ``mu_lo``.
    """
    mus, ages = _tabulate(traffic, mu_lo)
    if t < ages[-1]:
        raise InversionError(f"age below minimum: t={t} < {ages[-1]:.10g} reached at mu=1")
    if t == ages[-1]:
        return 1.0
    if t >= ages[0]:
        return mu_lo
    k = int(np.searchsorted(-ages, -t))
    lo, hi = mus[k - 1], mus[k]
    return float(brentq(lambda m: age_of_mu(m, traffic) - t, lo, hi, xtol=tol * 1e-2, rtol=1e-14))


@dataclass
class AgeCdfBounds:
    t_grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    mu_star: np.ndarray
    params: dict = field(default_factory=dict)

    def rows(self):
        pol = self.params.get("policy", "none")
        d = self.params.get("deadline_d", "")
        for k in range(self.t_grid.size):
            yield {"t": float(self.t_grid[k]), "lower_cdf": float(self.lower[k]),
                   "upper_cdf": float(self.upper[k]), "mu_star": float(self.mu_star[k]),
                   "policy": pol, "D": d if pol != "none" else ""}


def age_cdf_bounds(t_grid, net: NetworkParams, traffic: TrafficParams,
                   quad: QuadratureSpec | None = None, mu_lo: float = MU_LO) -> AgeCdfBounds:
    t = check_grid(t_grid)
    net.validate()
    traffic.validate()
    params = {"lambda": net.lam, "r0": net.r0, "alpha": net.alpha, "theta": net.theta, "p": net.p,
              "lambda_a": traffic.lambda_a, "policy": traffic.policy.value,
              "deadline_d": traffic.deadline_d}
    if net.lam == 0:
        step = (t >= age_of_mu(net.p, traffic)).astype(float)
        return AgeCdfBounds(t, step, step.copy(), np.full(t.size, net.p), params)
    mus, ages = _tabulate(traffic, mu_lo)
    mu_star = np.full(t.size, np.nan)
    for k, tk in enumerate(t):
        if tk >= ages[-1]:
            mu_star[k] = invert_age(tk, traffic, mu_lo)
    ok = np.isfinite(mu_star)
    lower = np.zeros(t.size)
    upper = np.zeros(t.size)
    if np.any(ok):
        # the cdf of mu has no atom for lambda > 0, so P(mu < s) = P(mu <= s)
        fa = cdf_at(mu_star[ok], net, System.A_DUMMY, traffic.lambda_a, quad)
        fb = cdf_at(mu_star[ok], net, System.B_DROP, traffic.lambda_a, quad)
        lower[ok] = 1 - fa
        upper[ok] = 1 - fb
    lower = np.clip(np.maximum.accumulate(lower), 0, 1)
    upper = np.clip(np.maximum.accumulate(upper), 0, 1)
    return AgeCdfBounds(t, lower, upper, mu_star, params)
