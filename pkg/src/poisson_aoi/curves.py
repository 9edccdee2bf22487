"""Sampled cumulative distribution functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class CdfCurve:
    """A nondecreasing function sampled on a strictly increasing grid.

    ``raw`` keeps the values before monotonisation and clamping;
    ``residual`` is the largest downward step found in ``raw``.
    """

    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    raw: np.ndarray | None = None

    @property
    def residual(self) -> float:
        return monotonicity_residual(self.raw if self.raw is not None else self.values)

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)


def check_grid(grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def monotonicity_residual(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(max(0.0, np.max(np.maximum.accumulate(values) - values)))


def monotone_clamped(raw) -> np.ndarray:
    return np.clip(np.maximum.accumulate(np.asarray(raw, dtype=float)), 0.0, 1.0)


def empirical_cdf(samples, grid) -> np.ndarray:
    """Right-continuous empirical cdf of ``samples`` evaluated at ``grid``."""
    s = np.sort(np.asarray(samples, dtype=float))
    return np.searchsorted(s, np.asarray(grid, dtype=float), side="right") / s.size
