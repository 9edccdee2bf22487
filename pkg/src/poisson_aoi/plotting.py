"""Figure helpers (file output only, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.2,
    "figure.figsize": (4.2, 3.0),
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}

COLORS = ["#1b6ca8", "#d1495b", "#2e8b57", "#edae49", "#6a4c93", "#00798c"]


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_mu_cdf(curves: dict, path, empirical: dict | None = None):
    """``curves`` maps label -> CdfCurve of the success probability."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, (label, c) in enumerate(curves.items()):
            ax.plot(c.grid, c.values, color=COLORS[k % len(COLORS)], label=label)
        for k, (label, c) in enumerate((empirical or {}).items()):
            ax.plot(c.grid, c.values, "o", ms=2.5, mfc="none",
                    color=COLORS[k % len(COLORS)], label=label)
        ax.set_xlabel(r"success probability $s$")
        ax.set_ylabel(r"$P(\mu \leq s)$")
        ax.set_ylim(-0.02, 1.02)
        ax.grid(alpha=0.3)
        ax.legend(loc="upper left", frameon=False)
        return _save(fig, path)


def plot_age_bounds(bounds: dict, path, simulated: dict | None = None):
    """``bounds`` maps label -> AgeCdfBounds; lower bounds solid, upper dashed."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, (label, b) in enumerate(bounds.items()):
            col = COLORS[k % len(COLORS)]
            ax.plot(b.t_grid, b.lower, "-", color=col, label=f"{label} lower")
            ax.plot(b.t_grid, b.upper, "--", color=col, label=f"{label} upper")
        for k, (label, c) in enumerate((simulated or {}).items()):
            ax.step(c.grid, c.values, where="post", color="k", lw=0.8,
                    alpha=0.8, label=label)
        ax.set_xlabel("mean age $t$ (slots)")
        ax.set_ylabel(r"$P(\Delta_0 \leq t)$")
        ax.set_ylim(-0.02, 1.02)
        ax.grid(alpha=0.3)
        ax.legend(loc="lower right", frameon=False)
        return _save(fig, path)


def plot_age_vs_mu(rows, path):
    """Average age against mu, one line per (policy, D) group of analytic rows."""
    groups: dict = {}
    for r in rows:
        if r.get("delta0") is None:
            continue
        groups.setdefault((r["policy"], r.get("D"), r["lambda_a"]), []).append((r["mu"], r["delta0"]))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for k, (key, pts) in enumerate(sorted(groups.items(), key=lambda kv: str(kv[0]))):
            pts = np.array(sorted(pts))
            pol, d, la = key
            label = rf"{pol}, $\lambda_a$={la}" + (f", D={d}" if pol != "none" else "")
            ax.plot(pts[:, 0], pts[:, 1], "o-", ms=2.5, color=COLORS[k % len(COLORS)], label=label)
        ax.set_xlabel(r"$\mu$")
        ax.set_ylabel(r"$\Delta_0$ (slots)")
        ax.set_yscale("log")
        ax.grid(alpha=0.3)
        ax.legend(frameon=False)
        return _save(fig, path)
