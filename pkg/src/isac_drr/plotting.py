"""Matplotlib figures written next to the CSV outputs (static SVG, one plot per file)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .shapes import BoundaryPolyline, boundary_points  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": [fig_width, fig_width * golden_mean],
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "axes.grid": True,
    "grid.alpha": 0.3,
    # reproducible SVG ids and no timestamp
    "svg.hashsalt": "isac-drr",
    "svg.fonttype": "path",
}

_STYLES = {
    "exact": dict(color="k", lw=1.6),
    "circle": dict(color="tab:blue", ls="--"),
    "conic_expansion": dict(color="tab:red", ls="-."),
    "conic_paper": dict(color="tab:orange", ls=":"),
}


def save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_coverage(shapes: dict, d_v: float, path) -> Path:
    """Sensing-region boundaries of every case and method, BS at the origin."""
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width * 0.8))
        ax.plot([0], [0], "k^", ms=7, label="BS")
        ax.plot([d_v], [0], "ks", ms=5, label="DRV")
        for case, methods in shapes.items():
            for name, shape in methods.items():
                pts = boundary_points(shape, 720)
                if isinstance(shape, BoundaryPolyline):
                    pts = np.vstack([pts, pts[:1]])
                else:
                    pts = np.vstack([pts, pts[:1]])
                ax.plot(pts[:, 0], pts[:, 1], label=f"{case}: {name}", **_STYLES.get(name, {}))
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.legend(loc="upper left", ncol=1, framealpha=0.8)
        fig.tight_layout()
        return save(fig, path)


def plot_sweep(table, path, log_x: bool = False) -> Path:
    """Analytic DRR curves with simulated points and 95% intervals."""
    cols = table.columns
    x_name = cols[0]
    has_series = cols[1] not in ("xi_analytic",)
    rows = np.array([[float(v) for v in r] for r in table.rows])
    x = rows[:, 0]
    series = rows[:, 1] if has_series else np.zeros(len(rows))
    k = cols.index
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for i, s in enumerate(dict.fromkeys(series)):
            sel = series == s
            label = f"{cols[1]} = {s:.4g}" if has_series else "analytic"
            color = f"C{i}"
            ax.plot(x[sel], rows[sel, k("xi_analytic")], color=color, label=label)
            emp = rows[sel, k("xi_empirical")]
            if np.any(np.isfinite(emp)):
                err = np.vstack([emp - rows[sel, k("ci_low")], rows[sel, k("ci_high")] - emp])
                ax.errorbar(x[sel], emp, yerr=err, fmt="o", color=color, mfc="none", capsize=2)
        if log_x:
            ax.set_xscale("log")
        ax.set_xlabel(x_name)
        ax.set_ylabel("DRR ξ [events/s]")
        ax.legend()
        fig.tight_layout()
        return save(fig, path)
