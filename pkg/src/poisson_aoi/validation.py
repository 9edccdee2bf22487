"""Named oracle cross-checks behind the ``validate`` subcommand.

Each check returns a :class:`CheckResult`. Formulas under test are looked up
in a table that callers may override, which is how the harness itself is
tested with a deliberately wrong formula.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import MU_LO, age_cdf_bounds, age_of_mu, invert_age
from .deadline import age_report
from .meta import System, success_cdf_curve
from .params import NetworkParams, Policy, RngSpec, TrafficParams
from .queue import average_age, stationary_distribution, transition_matrix
from .simulator import run_isolated_queue
from .spatial import ActivityModel, mean_mu_alpha4, monte_carlo_mu_cdf


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    runtime_s: float = 0.0


def default_formulas() -> dict:
    return {
        "delta0": lambda la, mu, policy=Policy.NONE, d=None: float(
            age_report(la, mu, policy, d).delta0),
        "mean_mu_alpha4": mean_mu_alpha4,
    }


FIG4_NET = NetworkParams.from_db(0.05, 10.0)
GRID = [(la, mu) for la in (0.05, 0.1, 0.3) for mu in (0.3, 0.5, 0.8)]


def check_stationary_balance(ctx):
    worst = 0.0
    for la, mu in GRID + [(1.0, 0.5), (0.5, 1.0), (0.0, 0.3)]:
        pi = stationary_distribution(la, mu).as_array()
        worst = max(worst, float(np.abs(pi @ transition_matrix(la, mu) - pi).max()))
    return worst < 1e-12, {"max_residual": worst}


def check_isolated_age(ctx):
    slots = 2_000_000 if ctx["quick"] else 10_000_000
    tol = 0.02 if ctx["quick"] else 0.01
    points = [(0.1, 0.5)] if ctx["quick"] else GRID
    worst = 0.0
    rows = []
    for k, (la, mu) in enumerate(points):
        sim = run_isolated_queue(TrafficParams(la), mu, slots, 1000, RngSpec(ctx["seed"], 100 + k))
        ref = ctx["formulas"]["delta0"](la, mu)
        err = abs(float(sim.time_avg_age[0]) / ref - 1)
        worst = max(worst, err)
        rows.append({"lambda_a": la, "mu": mu, "analytic": ref, "simulated": float(sim.time_avg_age[0])})
    return worst <= tol, {"max_rel_error": worst, "tolerance": tol, "points": rows}


def _deadline_check(ctx, policy, tol):
    slots = 10_000_000
    worst = 0.0
    rows = []
    k = 0
    for d in (3, 10, 30):
        for la, mu in GRID:
            tr = TrafficParams(la, policy, d)
            sim = run_isolated_queue(tr, mu, slots, 1000, RngSpec(ctx["seed"], 200 + k))
            ref = ctx["formulas"]["delta0"](la, mu, policy, d)
            err = abs(float(sim.time_avg_age[0]) / ref - 1)
            worst = max(worst, err)
            rows.append({"lambda_a": la, "mu": mu, "D": d, "analytic": ref,
                         "simulated": float(sim.time_avg_age[0])})
            k += 1
    return worst <= tol, {"max_rel_error": worst, "tolerance": tol, "points": rows}


def check_deadline_a(ctx):
    return _deadline_check(ctx, Policy.A, 0.01)


def check_deadline_b(ctx):
    return _deadline_check(ctx, Policy.B, 0.02)


def check_deadline_limit(ctx):
    worst = 0.0
    for la, mu in GRID:
        ref = average_age(la, mu)
        for pol in (Policy.A, Policy.B):
            rep = age_report(la, mu, pol, 60)
            for name in ("lambda_e", "pr_psi", "e_y", "e_y2", "e_w", "e_s_psi", "e_ty", "delta0"):
                a, b = getattr(rep.moments, name), getattr(ref.moments, name)
                worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    return worst <= 1e-3, {"max_rel_error": worst}


def check_rate_identity(ctx):
    worst = 0.0
    for la, mu in GRID:
        m = average_age(la, mu).moments
        worst = max(worst, abs(m.lambda_e * m.e_y - 1))
    return worst <= 1e-9, {"max_abs_error": worst}


def check_conservation(ctx):
    worst = 0
    for k, pol in enumerate((Policy.NONE, Policy.A, Policy.B)):
        s = run_isolated_queue(TrafficParams(0.3, pol, 3), 0.3, 200_000, 777, RngSpec(ctx["seed"], 300 + k))
        worst = max(worst, int(np.abs(s.conservation_residual()).max()))
    return worst == 0, {"max_residual": worst}


def check_determinism(ctx):
    a = run_isolated_queue(TrafficParams(0.2, Policy.A, 5), 0.4, 100_000, 10, RngSpec(ctx["seed"], 400))
    b = run_isolated_queue(TrafficParams(0.2, Policy.A, 5), 0.4, 100_000, 10, RngSpec(ctx["seed"], 400))
    same = a.age_sum.tobytes() == b.age_sum.tobytes() and np.array_equal(a.delivered, b.delivered)
    return bool(same), {}


def check_mean_mu(ctx):
    net = FIG4_NET
    s = np.linspace(1e-6, net.p - 1e-6, 4001)
    curve = success_cdf_curve(s, net, System.A_DUMMY)
    numeric = float(np.trapezoid(1 - curve.values, s))
    closed = ctx["formulas"]["mean_mu_alpha4"](net, net.p)
    err = abs(numeric - closed)
    return err < 1e-4, {"numeric": numeric, "closed_form": closed, "abs_error": err}


def check_meta_vs_mc(ctx):
    net = FIG4_NET
    n = 20_000 if ctx["quick"] else 100_000
    # sup over 24 correlated grid points: the quick run widens the band to 4 sigma
    z = 4.0 if ctx["quick"] else 3.0
    s = np.linspace(0.02, 0.48, 24)
    worst = 0.0
    ok = True
    for k, (system, act) in enumerate(((System.A_DUMMY, ActivityModel.system_a(net)),
                                        (System.B_DROP, ActivityModel.system_b(net, 0.1)))):
        ana = success_cdf_curve(s, net, system, 0.1)
        mc = monte_carlo_mu_cdf(net, act, n, 100.0, s, RngSpec(ctx["seed"], 10_000_000 * (k + 1)))
        tol = np.maximum(z * mc.meta["sigma"], 5e-3)
        dev = np.abs(ana.values - mc.values)
        worst = max(worst, float(dev.max()))
        ok &= bool(np.all(dev <= tol))
    return ok, {"max_abs_deviation": worst, "realizations": n}


def check_inversion(ctx):
    worst = 0.0
    for tr in (TrafficParams(0.1), TrafficParams(0.3), TrafficParams(0.1, Policy.A, 10)):
        lo, hi = age_of_mu(1.0, tr), age_of_mu(MU_LO, tr)
        for t in np.linspace(lo + 1e-3, min(lo * 5, hi - 1e-6), 25):
            worst = max(worst, abs(age_of_mu(invert_age(t, tr), tr) / t - 1))
    return worst <= 1e-6, {"max_rel_error": worst}


def check_bound_ordering(ctx):
    worst = 0.0
    for lam in (0.05, 0.2):
        for la in (0.1, 0.3):
            b = age_cdf_bounds(np.linspace(5, 60, 56), NetworkParams.from_db(lam, 10.0), TrafficParams(la))
            worst = max(worst, float((b.lower - b.upper).max()))
    return worst <= 1e-9, {"max_violation": worst}


CHECKS = {
    "stationary_balance": (check_stationary_balance, True),
    "isolated_age": (check_isolated_age, True),
    "conservation": (check_conservation, True),
    "determinism": (check_determinism, True),
    "mean_mu_closed_form": (check_mean_mu, True),
    "meta_vs_monte_carlo": (check_meta_vs_mc, True),
    "inversion_round_trip": (check_inversion, True),
    "bound_ordering": (check_bound_ordering, True),
    "rate_identity": (check_rate_identity, False),
    "deadline_limit": (check_deadline_limit, False),
    "deadline_a_isolated": (check_deadline_a, False),
    "deadline_b_isolated": (check_deadline_b, False),
}


def run_suite(quick: bool = False, seed: int = 1, only=None, inject: dict | None = None) -> dict:
    """Run the checks (the quick subset when ``quick``) and collect a JSON-ready report."""
    formulas = default_formulas()
    formulas.update(inject or {})
    ctx = {"quick": quick, "seed": seed, "formulas": formulas}
    names = list(only) if only else [n for n, (_, q) in CHECKS.items() if q or not quick]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {unknown}")
    results = []
    for name in names:
        fn = CHECKS[name][0]
        t = time.perf_counter()
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t))
    return {
        "quick": quick, "seed": seed,
        "passed": all(r.passed for r in results),
        "failed": [r.name for r in results if not r.passed],
        "checks": [{"name": r.name, "passed": r.passed, "runtime_s": round(r.runtime_s, 3),
                    "detail": r.detail} for r in results],
    }


__all__ = ["CHECKS", "CheckResult", "run_suite", "default_formulas"]
