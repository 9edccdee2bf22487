"""Poisson bipolar network sampling and the per-link success probability.

The typical receiver sits at the origin and its transmitter at distance r0.
Under the reduced Palm distribution the interferers form an ordinary PPP,
simulated here on a disk of radius ``region_radius``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import CdfCurve, check_grid, empirical_cdf
from .params import NetworkParams, RngSpec, split_stream


@dataclass(frozen=True)
class LinkRealization:
    interferer_distances: np.ndarray
    r0: float
    region_radius: float


@dataclass(frozen=True)
class ActivityModel:
    """Per-slot independent transmit probability ``q`` of each interferer."""

    q: float

    def __post_init__(self):
        if not 0 <= self.q <= 1:
            raise ValueError(f"q outside [0,1] (got {self.q})")

    @classmethod
    def system_a(cls, net: NetworkParams) -> "ActivityModel":
        """Interferers always backlogged (dummy packets)."""
        return cls(net.p)

    @classmethod
    def system_b(cls, net: NetworkParams, lambda_a: float) -> "ActivityModel":
        """Interferers hold a packet for one slot only."""
        return cls(lambda_a * net.p)


def sample_ppp(net: NetworkParams, region_radius: float, rng) -> LinkRealization:
    if region_radius <= 0:
        raise ValueError("region_radius must be positive")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    n = gen.poisson(net.lam * math.pi * region_radius**2) if net.lam > 0 else 0
    r = region_radius * np.sqrt(gen.random(n))
    # a zero draw is measure-zero; keep distances strictly positive
    r = np.maximum(r, np.finfo(float).tiny)
    return LinkRealization(r, net.r0, region_radius)


def success_factors(distances, net: NetworkParams, q: float) -> np.ndarray:
    """Per-interferer factor 1 - q + q / (1 + theta (r0/x)^alpha)."""
    x = np.asarray(distances, dtype=float)
    g = net.theta * (net.r0 / x) ** net.alpha
    return 1.0 - q * g / (1.0 + g)


def conditional_success_probability(link: LinkRealization, net: NetworkParams,
                                    act: ActivityModel) -> float:
    """p times the product of per-interferer factors (Rayleigh fading marginalised)."""
    if link.interferer_distances.size == 0:
        return float(net.p)
    logs = np.log(success_factors(link.interferer_distances, net, act.q))
    return float(net.p * math.exp(logs.sum()))


def sample_mu(net: NetworkParams, act: ActivityModel, n_real: int, region_radius: float,
              rng: RngSpec) -> np.ndarray:
    """mu(Phi) for ``n_real`` independent realizations, one substream each."""
    out = np.empty(n_real)
    for k, spec in enumerate(split_stream(rng, n_real)):
        out[k] = conditional_success_probability(sample_ppp(net, region_radius, spec), net, act)
    return out


def mean_mu_alpha4(net: NetworkParams, q: float) -> float:
    """E[mu] for alpha = 4: p exp(-lambda q pi^2 sqrt(theta) r0^2 / 2)."""
    return net.p * math.exp(-net.lam * q * math.pi**2 * math.sqrt(net.theta) * net.r0**2 / 2)


def window_tail(net: NetworkParams, q: float, region_radius: float) -> float:
    """First-order mass lambda q int_R^inf 2 pi r theta r0^a r^-a dr ignored by the window."""
    return (2 * math.pi * net.lam * q * net.theta * net.r0**net.alpha
            * region_radius ** (2 - net.alpha) / (net.alpha - 2))


def monte_carlo_mu_cdf(net: NetworkParams, act: ActivityModel, n_real: int,
                       region_radius: float, s_grid, rng: RngSpec,
                       samples: np.ndarray | None = None) -> CdfCurve:
    grid = check_grid(s_grid)
    if n_real < 1:
        raise ValueError("n_real must be >= 1")
    if samples is None:
        samples = sample_mu(net, act, n_real, region_radius, rng)
    values = empirical_cdf(samples, grid)
    sigma = np.sqrt(values * (1 - values) / samples.size)
    meta = {
        "n_real": int(samples.size), "q": act.q, "region_radius": region_radius,
        "mean": float(samples.mean()),
        "stderr": float(samples.std(ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else math.nan,
        "window_tail": window_tail(net, act.q, region_radius),
        "sigma": sigma,
    }
    return CdfCurve(grid, values, meta, raw=values.copy())
