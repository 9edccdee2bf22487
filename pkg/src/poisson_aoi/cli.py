"""Command-line front end.

    poisson-aoi analytic  --config cfg.json --out out/
    poisson-aoi meta      --oracle 100000
    poisson-aoi bounds    --preset fig5
    poisson-aoi simulate  --threads 4
    poisson-aoi validate  --quick

Each subcommand writes delimited data (CSV with a ``# params:`` line, or JSON)
and, unless ``--no-figures``, a PNG rendering of the same data.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .bounds import age_cdf_bounds
from .curves import check_grid
from .deadline import age_report
from .meta import System, success_cdf_curve
from .params import (ParameterError, Policy, RngSpec, TrafficParams, load_config,
                     network_from_config, traffic_from_config)
from .simulator import aggregate, run_realizations
from .spatial import ActivityModel, monte_carlo_mu_cdf

PRESETS = {
    "fig4": [dict(lam=lam, lambda_a=la, policy="none") for lam in (0.05, 0.2) for la in (0.1, 0.3)],
    "fig5": [dict(lam=0.05, lambda_a=0.1, policy="none"), dict(lam=0.05, lambda_a=0.1, policy="A")],
    "fig6": [dict(lam=0.05, lambda_a=0.1, policy="A"), dict(lam=0.05, lambda_a=0.1, policy="B")],
}

ANALYTIC_COLUMNS = ["lambda_a", "mu", "policy", "D", "pi0", "pi1", "pi2", "lambda_e", "p_los",
                    "pr_psi", "e_y", "e_y2", "e_w", "e_s_psi", "e_s_psibar", "e_ty", "delta0", "error"]


class ConfigError(ValueError):
    pass


def _grid(cfg, key, default):
    val = cfg.get(key, default)
    if val is None:
        return None
    try:
        return check_grid(val)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _list(cfg, key, default):
    val = cfg.get(key, default)
    return list(val) if isinstance(val, (list, tuple)) else [val]


def cmd_analytic(cfg, args) -> int:
    la_grid = _list(cfg, "lambda_a_grid", [cfg["lambda_a"]])
    mu_grid = _list(cfg, "mu_grid", [cfg.get("mu", 0.5)])
    policies = [Policy.parse(p) for p in _list(cfg, "policies", [cfg["policy"]])]
    deadlines = _list(cfg, "deadlines", [cfg["deadline_d"]])
    if not la_grid or not mu_grid or not policies or not deadlines:
        raise ConfigError("empty analytic grid")
    rows = []
    for la in la_grid:
        for mu in mu_grid:
            for pol in policies:
                for d in (deadlines if pol is not Policy.NONE else [None]):
                    row = {"lambda_a": la, "mu": mu, "policy": pol.value, "D": d}
                    try:
                        rep = age_report(float(la), float(mu), pol, d)
                        row.update(rep.row())
                        row["policy"], row["D"] = pol.value, d
                    except (ValueError, ZeroDivisionError) as exc:
                        row["error"] = f"{type(exc).__name__}: {exc}"
                    rows.append(row)
    out = Path(args.out)
    io.write_csv(out / "analytic.csv", rows, ANALYTIC_COLUMNS, cfg)
    if not args.no_figures:
        from .plotting import plot_age_vs_mu
        plot_age_vs_mu(rows, out / "analytic.png")
    n_err = sum(1 for r in rows if r.get("error"))
    print(f"analytic: {len(rows)} rows, {n_err} errors -> {out / 'analytic.csv'}")
    return 1 if n_err else 0


def cmd_meta(cfg, args) -> int:
    net = network_from_config(cfg)
    la = float(cfg["lambda_a"])
    s = _grid(cfg, "s_grid", np.linspace(0.01, net.p - 0.01, 49).tolist())
    curves = {"systemA": success_cdf_curve(s, net, System.A_DUMMY, la),
              "systemB": success_cdf_curve(s, net, System.B_DROP, la)}
    residual = max(c.residual for c in curves.values())
    cols = ["s", "cdf_upper_systemA", "cdf_lower_systemB", "monotonicity_residual"]
    rows = [{"s": x, "cdf_upper_systemA": curves["systemA"].values[i],
             "cdf_lower_systemB": curves["systemB"].values[i], "monotonicity_residual": residual}
            for i, x in enumerate(s)]
    emp = {}
    if args.oracle:
        n = int(args.oracle)
        acts = {"systemA": ActivityModel.system_a(net), "systemB": ActivityModel.system_b(net, la)}
        for k, (name, act) in enumerate(acts.items()):
            emp[name] = monte_carlo_mu_cdf(net, act, n, float(cfg["region_radius"]), s,
                                           RngSpec(int(cfg["seed"]), 1_000_000_000 * (k + 1)))
            cols.append(f"mc_{name}")
            for i, r in enumerate(rows):
                r[f"mc_{name}"] = emp[name].values[i]
    out = Path(args.out)
    io.write_csv(out / "meta.csv", rows, cols, {**cfg, "oracle": args.oracle})
    if not args.no_figures:
        from .plotting import plot_mu_cdf
        plot_mu_cdf({"system A (upper)": curves["systemA"], "system B (lower)": curves["systemB"]},
                    out / "meta.png", {f"Monte Carlo {k}": v for k, v in emp.items()})
    print(f"meta: {len(rows)} points -> {out / 'meta.csv'}")
    return 0


def cmd_bounds(cfg, args) -> int:
    t = _grid(cfg, "t_grid", np.linspace(1.0, 60.0, 237).tolist())
    if args.preset:
        sets = PRESETS[args.preset]
    else:
        sets = [dict(lam=cfg["lambda"], lambda_a=cfg["lambda_a"], policy=cfg["policy"])]
    cols = ["t", "lower_cdf", "upper_cdf", "mu_star", "policy", "D", "lambda", "lambda_a"]
    rows, errors, curves = [], [], {}
    for st in sets:
        c = dict(cfg, **{"lambda": st["lam"], "lambda_a": st["lambda_a"], "policy": st["policy"]})
        net, tr = network_from_config(c), traffic_from_config(c)
        label = f"lambda={net.lam}, lambda_a={tr.lambda_a}, policy={tr.policy.value}"
        try:
            b = age_cdf_bounds(t, net, tr)
        except ValueError as exc:
            errors.append({"set": label, "error": str(exc)})
            print(f"bounds: {label}: {exc}", file=sys.stderr)
            continue
        curves[label] = b
        for r in b.rows():
            rows.append({**r, "lambda": net.lam, "lambda_a": tr.lambda_a})
    out = Path(args.out)
    name = f"bounds_{args.preset}" if args.preset else "bounds"
    io.write_csv(out / f"{name}.csv", rows, cols, {**cfg, "preset": args.preset, "errors": errors})
    if curves and not args.no_figures:
        from .plotting import plot_age_bounds
        plot_age_bounds(curves, out / f"{name}.png")
    print(f"bounds: {len(curves)} curve pairs, {len(errors)} errors -> {out / (name + '.csv')}")
    return 1 if errors else 0


def cmd_simulate(cfg, args) -> int:
    net, tr = network_from_config(cfg), traffic_from_config(cfg)
    slots, warm = int(cfg["slots"]), int(cfg["warmup_slots"])
    if args.quick:
        slots, warm = max(slots // 10, warm + 1000), warm
    t0 = time.perf_counter()
    stats = run_realizations(net, tr, cfg.get("mode", "Actual"), slots, warm,
                             float(cfg["region_radius"]), RngSpec(int(cfg["seed"]), 0),
                             n_real=int(cfg["realizations"]), threads=args.threads,
                             guard=float(cfg.get("guard", 0.2)), fading=cfg.get("fading", "marginal"),
                             cutoff_radius=cfg.get("cutoff_radius"))
    out = Path(args.out)
    cols = ["realization_id", "link_id", "empirical_mu", "time_avg_age", "delivered",
            "dropped_full", "dropped_deadline"]
    io.write_csv(out / "links.csv", list(stats.rows()), cols, cfg)
    curve, summary = aggregate(stats, int(cfg.get("min_deliveries", 10)))
    io.write_csv(out / "age_cdf.csv", [{"t": x, "cdf": v} for x, v in zip(curve.grid, curve.values)],
                 ["t", "cdf"], cfg)
    io.write_json(out / "simulate.json", {
        "params": cfg, "slots_run": slots, "links": summary.n_links, "links_used": summary.n_used,
        "excluded_fraction": summary.excluded_fraction, "mean_age": summary.mean_age,
        "runtime_s": round(time.perf_counter() - t0, 3)})
    if not args.no_figures:
        from .plotting import plot_age_bounds
        plot_age_bounds({}, out / "age_cdf.png", {"simulated": curve})
    print(f"simulate: {summary.n_links} links, {summary.excluded_fraction:.3f} excluded -> {out}")
    return 0


def cmd_validate(cfg, args) -> int:
    from .validation import run_suite
    report = run_suite(quick=args.quick, seed=int(cfg["seed"]), only=cfg.get("checks"))
    report["params"] = cfg
    io.write_json(Path(args.out) / "validate.json", report)
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}  ({c['runtime_s']:.1f} s)")
    return 0 if report["passed"] else 1


COMMANDS = {"analytic": cmd_analytic, "meta": cmd_meta, "bounds": cmd_bounds,
            "simulate": cmd_simulate, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poisson-aoi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON parameter file")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--quick", action="store_true", help="reduced run sizes")
        p.add_argument("--no-figures", action="store_true", help="skip PNG output")
        if name == "meta":
            p.add_argument("--oracle", type=float, default=0,
                           help="add a Monte Carlo column with this many realizations")
        if name == "bounds":
            p.add_argument("--preset", choices=sorted(PRESETS))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.oracle = getattr(args, "oracle", 0)
    args.preset = getattr(args, "preset", None)
    try:
        cfg = load_config(args.config, seed=args.seed)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, ParameterError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
