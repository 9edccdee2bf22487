"""Cdf of the conditional success probability by Gil-Pelaez inversion.

For interferers active independently with probability q,

    P(mu <= s) = 1/2 - 1/pi int_0^inf Im{ exp(j w ln(p/s) + I(w)) } / w dw,
    I(w) = -2 pi lambda int_0^inf [1 - z(r)^{jw}] r dr,
    z(r) = 1 - q + q / (1 + theta r0^a r^-a).

q = p gives the dummy-packet system (an upper bound on the cdf) and
q = lambda_a p the drop system (a lower bound).

The inner integral is rewritten with u = r^2 = r0^2 theta^(2/a) w and then,
by parts, in the variable y = -ln z in (0, y0], y0 = -ln(1-q):

    I(w) = -j w pi lambda r0^2 theta^(2/a) int_0^y0 wr(y) e^{-j w y} dy,
    wr(y) = (q / (1 - e^-y) - 1)^(2/a),

a finite Fourier integral whose y^(-2/a) endpoint singularity is removed by
y = y0 s^m, m = a/(a-2). For q = 1 the closed form
-pi lambda r0^2 theta^(2/a) Gamma(1-d) Gamma(jw+d) / Gamma(jw), d = 2/a, is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import loggamma

from .curves import CdfCurve, check_grid, monotone_clamped, monotonicity_residual
from .params import NetworkParams


class QuadratureError(RuntimeError):
    pass


class System(str, Enum):
    A_DUMMY = "A_dummy"
    B_DROP = "B_drop"

    @classmethod
    def parse(cls, value) -> "System":
        if isinstance(value, System):
            return value
        v = str(value).lower()
        if v in ("a", "a_dummy", "dummy", "systema"):
            return cls.A_DUMMY
        if v in ("b", "b_drop", "drop", "systemb"):
            return cls.B_DROP
        raise ValueError(f"unknown interference system {value!r}")


@dataclass(frozen=True)
class QuadratureSpec:
    """Numerical knobs.

    omega_max: outer truncation; ``None`` picks the smallest power of two
        where |exp(I(w))| < ``amp_tol``.
    rel_tol / abs_tol: acceptance for the inner-integral self check.
    r_substitution: when False the inner integral is done directly in r with
        adaptive quadrature (slow, scalar only; used for cross-checks).
    """

    omega_max: float | None = None
    rel_tol: float = 1e-7
    abs_tol: float = 1e-9
    amp_tol: float = 1e-9
    r_substitution: bool = True
    inner_rad_per_panel: float = 4.0
    outer_rad_per_panel: float = 10.0
    omega_cap: float = 2.0**22

    def __post_init__(self):
        if self.omega_max is not None and not self.omega_max > 0:
            raise ValueError("omega_max must be positive")
        if min(self.rel_tol, self.abs_tol, self.amp_tol) <= 0:
            raise ValueError("tolerances must be positive")


_GL16 = leggauss(16)
_GL24 = leggauss(24)


def q_for(system, net: NetworkParams, lambda_a: float | None) -> float:
    system = System.parse(system)
    if system is System.A_DUMMY:
        return net.p
    if lambda_a is None:
        raise ValueError("the drop system needs lambda_a")
    return lambda_a * net.p


def _scale(net: NetworkParams) -> float:
    return math.pi * net.lam * net.r0**2 * net.theta ** (2.0 / net.alpha)


def _graded_edges(n_uniform: int) -> np.ndarray:
    """Panel edges on [0, 1], geometrically refined toward both ends."""
    fine = np.geomspace(1e-10, 0.5 / max(n_uniform, 1), 12)
    core = np.linspace(fine[-1], 1 - fine[-1], max(n_uniform, 1) + 1)
    return np.unique(np.concatenate([[0.0], fine, core, 1 - fine[::-1], [1.0]]))


@lru_cache(maxsize=64)
def _inner_nodes(y0: float, delta: float, q: float, n_uniform: int):
    m = 1.0 / (1.0 - delta)
    edges = _graded_edges(n_uniform)
    x, wt = _GL16
    a, b = edges[:-1, None], edges[1:, None]
    s = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    ws = (0.5 * (b - a) * wt).ravel()
    y = y0 * s**m
    with np.errstate(divide="ignore", invalid="ignore"):
        base = np.maximum(q / (-np.expm1(-y)) - 1.0, 0.0)
        g = base**delta * y0 * m * s ** (m - 1)
    g = np.where(np.isfinite(g), g, 0.0)
    return y, ws * g


def _inner_fourier(omega: np.ndarray, net: NetworkParams, q: float, spec: QuadratureSpec,
                   refine: int = 1) -> np.ndarray:
    delta = 2.0 / net.alpha
    y0 = -math.log1p(-q)
    m = 1.0 / (1.0 - delta)
    out = np.empty(omega.shape, dtype=complex)
    order = np.argsort(np.abs(omega))
    for chunk in np.array_split(order, max(1, omega.size // 128)):
        if chunk.size == 0:
            continue
        wmax = float(np.max(np.abs(omega[chunk])))
        n_uni = refine * (int(math.ceil(wmax * y0 * m / spec.inner_rad_per_panel)) + 8)
        y, gw = _inner_nodes(y0, delta, q, n_uni)
        w = omega[chunk]
        f = np.exp(-1j * np.outer(w, y)) @ gw
        out[chunk] = -1j * w * f
    return out * _scale(net)


def _inner_closed_q1(omega: np.ndarray, net: NetworkParams) -> np.ndarray:
    delta = 2.0 / net.alpha
    out = np.zeros(omega.shape, dtype=complex)
    nz = omega != 0
    b = 1j * omega[nz]
    out[nz] = -_scale(net) * np.exp(loggamma(1 - delta) + loggamma(b + delta) - loggamma(b))
    return out


def _inner_direct(omega: float, net: NetworkParams, q: float, spec: QuadratureSpec) -> complex:
    """Adaptive quadrature of -2 pi lambda int [1 - z^{jw}] r dr directly in r."""
    k = net.theta * net.r0**net.alpha

    def integrand(r, part):
        lz = math.log1p(-q * k / (r**net.alpha + k))
        v = 1.0 - complex(math.cos(omega * lz), math.sin(omega * lz))
        return (v.real if part == 0 else v.imag) * r

    # beyond r_cut the first-order expansion 1 - z^{jw} ~ -j w ln z is exact to O((w q k r^-a)^2)
    r_cut = max(10 * net.r0, (abs(omega) * q * k / 1e-6) ** (1 / net.alpha))
    pts = np.geomspace(1e-3 * net.r0, r_cut, 40)
    pts = np.concatenate([[0.0], pts])
    re = im = 0.0
    err = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        for part in (0, 1):
            val, e = integrate.quad(integrand, lo, hi, args=(part,), limit=500,
                                    epsabs=spec.abs_tol * 1e-2, epsrel=spec.rel_tol * 1e-2)
            err += e
            if part == 0:
                re += val
            else:
                im += val
    tail_ln, e = integrate.quad(lambda r: -math.log1p(-q * k / (r**net.alpha + k)) * r,
                                r_cut, np.inf, limit=200)
    im += omega * tail_ln
    if err > spec.rel_tol * abs(complex(re, im)) + spec.abs_tol:
        raise QuadratureError(f"direct inner quadrature reached only {err:.3g}")
    return -2 * math.pi * net.lam * complex(re, im)


def inner_exponent(omega, net: NetworkParams, q: float, quad: QuadratureSpec | None = None,
                   check: bool = False):
    """-2 pi lambda int_0^inf [1 - z(r)^{j omega}] r dr for scalar or array omega.

    With ``check=True`` the result is recomputed on a doubled mesh and
    :class:`QuadratureError` is raised when the two disagree by more than
    rel_tol |I| + abs_tol.
    """
    spec = quad or QuadratureSpec()
    scalar = np.ndim(omega) == 0
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if not 0 <= q <= 1:
        raise ValueError(f"q outside [0,1] (got {q})")
    if net.lam == 0 or q == 0:
        out = np.zeros(w.shape, dtype=complex)
    elif q == 1:
        out = _inner_closed_q1(w, net)
    elif not spec.r_substitution:
        out = np.array([_inner_direct(x, net, q, spec) for x in w])
    else:
        out = _inner_fourier(w, net, q, spec)
        if check:
            fine = _inner_fourier(w, net, q, spec, refine=2)
            err = np.abs(fine - out)
            bad = err > spec.rel_tol * np.abs(fine) + spec.abs_tol
            if np.any(bad):
                raise QuadratureError(
                    f"inner quadrature did not converge: achieved {err.max():.3g} at omega={w[bad][0]}")
            out = fine
    return complex(out[0]) if scalar else out


def _omega_max(net, q, spec) -> tuple[float, float]:
    if spec.omega_max is not None:
        om = float(spec.omega_max)
        return om, float(np.exp(inner_exponent(om, net, q, spec).real))
    om = 8.0
    while om < spec.omega_cap:
        amp = float(np.exp(inner_exponent(om, net, q, spec).real))
        if amp < spec.amp_tol:
            return om, amp
        om *= 2
    return om, float(np.exp(inner_exponent(om, net, q, spec).real))


@lru_cache(maxsize=32)
def _outer_rule(net: NetworkParams, q: float, spec: QuadratureSpec, log_span: float):
    """Outer nodes, weights and exp(I(w))/w for one interference model."""
    om, amp = _omega_max(net, q, spec)
    y0 = -math.log1p(-q) if q < 1 else 8.0
    period_step = 2 * math.pi / (40 * y0)
    pts = [0.0, *np.geomspace(1e-7, 0.05, 60)]
    w = 0.05
    while w < om:
        w += min(period_step, max(0.005, 0.02 * w))
        pts.append(min(w, om))
    wgrid = np.unique(np.asarray(pts))
    ivals = inner_exponent(wgrid, net, q, spec)
    spline_re = CubicSpline(wgrid, ivals.real)
    spline_im = CubicSpline(wgrid, ivals.imag)
    rate = float(np.max(np.abs(spline_im(wgrid, 1)))) + log_span + 1.0
    h = min(2.0, spec.outer_rad_per_panel / rate)
    edges = np.unique(np.concatenate([[0.0], np.geomspace(1e-6, min(1.0, om), 13),
                                      np.arange(1.0, om, h), [om]]))
    edges = edges[edges <= om]
    x, wt = _GL24
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    weights = (0.5 * (b - a) * wt).ravel()
    ev = np.exp(spline_re(nodes) + 1j * spline_im(nodes)) / nodes
    info = {"omega_max": om, "truncation_amplitude": amp, "outer_nodes": int(nodes.size),
            "interp_points": int(wgrid.size), "q": q}
    return nodes, weights, ev, info


def _step_cdf(s: np.ndarray, p: float) -> np.ndarray:
    # mu is the constant p: right-continuous CDF
    return np.where(s < p, 0.0, 1.0)


def success_cdf_curve(s_grid, net: NetworkParams, system, lambda_a: float | None = None,
                      quad: QuadratureSpec | None = None) -> CdfCurve:
    """Gil-Pelaez cdf of mu on ``s_grid`` (strictly increasing, inside (0,1))."""
    spec = quad or QuadratureSpec()
    s = check_grid(s_grid)
    if np.any((s <= 0) | (s >= 1)):
        raise ValueError("s values must lie in (0,1)")
    system = System.parse(system)
    q = q_for(system, net, lambda_a)
    meta = {"system": system.value, "q": q, "lambda": net.lam}
    if net.lam == 0 or q == 0:
        raw = _step_cdf(s, net.p)
        meta.update(omega_max=0.0, truncation_amplitude=0.0, method="deterministic mu = p")
        return CdfCurve(s, raw.copy(), meta, raw=raw)
    log_ratio = np.log(net.p / s)
    span = float(np.max(np.abs(log_ratio)))
    # round the span up so that nearby grids share one cached rule
    span = float(2.0 ** math.ceil(math.log2(max(span, 0.25))))
    nodes, weights, ev, info = _outer_rule(net, q, spec, span)
    wev_re, wev_im = weights * ev.real, weights * ev.imag
    raw = np.empty(s.size)
    for k, L in enumerate(log_ratio):
        ph = nodes * L
        raw[k] = 0.5 - (wev_im @ np.cos(ph) + wev_re @ np.sin(ph)) / math.pi
    meta.update(info)
    meta["overshoot"] = float(max(0.0, -raw.min(), raw.max() - 1.0))
    return CdfCurve(s, monotone_clamped(raw), meta, raw=raw)


def success_cdf(s: float, net: NetworkParams, system, lambda_a: float | None = None,
                quad: QuadratureSpec | None = None) -> float:
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0,1) (got {s})")
    curve = success_cdf_curve([s], net, system, lambda_a, quad)
    return float(np.clip(curve.raw[0], 0.0, 1.0))


def cdf_at(mu_values, net: NetworkParams, system, lambda_a=None, quad=None) -> np.ndarray:
    """P(mu <= s) at arbitrary points, using P = 0 for s <= 0 and P = 1 for s >= p."""
    s = np.asarray(mu_values, dtype=float)
    out = np.where(s >= net.p, 1.0, 0.0)
    inside = (s > 0) & (s < net.p)
    if np.any(inside):
        uniq = np.unique(s[inside])
        curve = success_cdf_curve(uniq, net, system, lambda_a, quad)
        out[inside] = np.interp(s[inside], uniq, curve.values)
    if net.lam == 0 or q_for(system, net, lambda_a) == 0:
        out = np.where(s >= net.p, 1.0, 0.0)
    return out


__all__ = ["System", "QuadratureSpec", "QuadratureError", "inner_exponent", "success_cdf",
           "success_cdf_curve", "cdf_at", "q_for", "monotonicity_residual"]
