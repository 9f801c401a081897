"""Experiment orchestration: coverage comparison and DRR sweeps as result tables."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import ExperimentConfig, SweepAxis
from .coverage import (DegenerateConicError, circle_approximation, conic_mode_divergence,
                       conic_to_ellipse, exact_boundary, least_squares_beta, numeric_beta,
                       taylor_conic)
from .drr import dynamic_ranging_rate
from .montecarlo import SimConfig, aggregate, simulate
from .params import mmse_beta
from .pointprocess import Window, default_window
from .shapes import BoundaryPolyline, Circle, boundary_points, shape_area
from .coverage import approximation_quality

logger = logging.getLogger(__name__)

TOOL_DEFAULTS_NOTE = ("sweep ranges, PRI values, wavelength and RCS values are tool defaults, "
                      "not published values")


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, table has {len(self.columns)} columns")
        self.rows.append(list(values))

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.provenance.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        return path


def read_table(path) -> ResultTable:
    """Parse a CSV written by :meth:`ResultTable.write` (numbers become floats)."""
    prov, body = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            prov[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(body))
    table = ResultTable(rows[0], provenance=prov)
    for r in rows[1:]:
        vals = []
        for v in r:
            try:
                vals.append(float(v))
            except ValueError:
                vals.append(v)
        table.rows.append(vals)
    return table


def provenance(cfg: ExperimentConfig, **extra) -> dict:
    out = {"tool": f"isac-drr {__version__}", "seed": cfg.seed, "config_sha256": cfg.config_hash}
    out.update(extra)
    return out


# ------------------------------------------------------------------- coverage

def _ray_hits(shape, origin, theta: np.ndarray) -> Optional[np.ndarray]:
    """Boundary points of a circle/ellipse along rays from ``origin`` (must be inside)."""
    if isinstance(shape, Circle):
        cx, cy, s1, s2, rot = shape.center.x, shape.center.y, shape.radius, shape.radius, 0.0
    else:
        cx, cy, s1, s2, rot = shape.center.x, shape.center.y, shape.s1, shape.s2, shape.rotation
    c, s = math.cos(rot), math.sin(rot)
    ox, oy = origin[0] - cx, origin[1] - cy
    # origin and ray direction in the shape frame, scaled to the unit circle
    pu, pv = (c * ox + s * oy) / s1, (-s * ox + c * oy) / s2
    if pu * pu + pv * pv >= 1:
        return None
    du = (c * np.cos(theta) + s * np.sin(theta)) / s1
    dv = (-s * np.cos(theta) + c * np.sin(theta)) / s2
    a = du * du + dv * dv
    b = 2 * (pu * du + pv * dv)
    cc = pu * pu + pv * pv - 1
    t = (-b + np.sqrt(b * b - 4 * a * cc)) / (2 * a)
    return np.column_stack([origin[0] + t * np.cos(theta), origin[1] + t * np.sin(theta)])


def _polygon_centroid(pts: np.ndarray) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6 * a)


@dataclass
class CoverageOutputs:
    boundary: ResultTable
    summary: ResultTable
    beta: ResultTable
    divergence: ResultTable
    shapes: dict  # case -> {method: shape}


def run_coverage(cfg: ExperimentConfig) -> CoverageOutputs:
    """Exact contour, circle and both conic modes for every configured case."""
    prov = provenance(cfg, note=TOOL_DEFAULTS_NOTE)
    boundary = ResultTable(["case", "method", "theta", "x", "y", "radius"], provenance=prov)
    summary = ResultTable(["case", "method", "alpha_b", "alpha_v", "w", "area_m2", "iou",
                           "max_residual", "center_x", "center_y", "s1", "s2"], provenance=prov)
    beta = ResultTable(["case", "alpha_hat", "d_v", "beta_formula", "beta_l1_numeric",
                        "beta_l2"], provenance=prov)
    divergence = ResultTable(["case", "alpha_hat", "coefficient", "expansion", "paper",
                              "difference", "predicted"], provenance=prov)
    d_v = cfg.drv_distance
    n = cfg.n_angles
    theta = 2 * np.pi * np.arange(n) / n
    drv = (d_v, 0.0)
    shapes = {}
    for case in cfg.cases:
        net = replace(cfg.net, bs=replace(cfg.net.bs, path_loss_exponent=case.alpha_b),
                      drv=replace(cfg.net.drv, path_loss_exponent=case.alpha_v))
        w, ah = net.w, net.alpha_hat
        exact = exact_boundary(w, ah, d_v, n)
        methods = {"exact": exact,
                   "circle": circle_approximation(w, mmse_beta(ah, d_v), d_v)}
        for mode in ("expansion", "paper"):
            try:
                methods[f"conic_{mode}"] = conic_to_ellipse(
                    taylor_conic(w, ah, d_v, cfg.expansion_point, mode))
            except DegenerateConicError as exc:
                logger.warning("%s: conic (%s mode) degenerate: %s", case.name, mode, exc)
        shapes[case.name] = methods
        centroid = _polygon_centroid(exact.points)
        for name, shape in methods.items():
            if isinstance(shape, BoundaryPolyline):
                pts, th, center = shape.points, theta, centroid
            else:
                pts = _ray_hits(shape, drv, theta)
                th = theta
                if pts is None:
                    logger.warning("%s/%s does not contain the DRV; sampling parametrically",
                                   case.name, name)
                    pts = boundary_points(shape, n)
                    th = np.mod(np.arctan2(pts[:, 1], pts[:, 0] - d_v), 2 * np.pi)
                center = np.array(shape.center)
            for t, (x, y) in zip(th, pts):
                boundary.add(case.name, name, t, x, y, math.hypot(x - center[0], y - center[1]))
            if isinstance(shape, BoundaryPolyline):
                iou, res = 1.0, float(np.abs(w * np.hypot(*pts.T) ** (2 * ah)
                                             - np.hypot(pts[:, 0] - d_v, pts[:, 1]) ** 2).max()) / d_v**2
                cx, cy, s1, s2 = centroid[0], centroid[1], math.nan, math.nan
            else:
                iou, res = approximation_quality(exact, shape, w, ah, d_v, cfg.grid)
                cx, cy = shape.center
                s1, s2 = (shape.radius, shape.radius) if isinstance(shape, Circle) else (shape.s1, shape.s2)
            area = shape_area(shape)
            summary.add(case.name, name, case.alpha_b, case.alpha_v, w, area, iou, res, cx, cy, s1, s2)
            logger.info("%s %-16s area %.6g m^2  IoU %.5f", case.name, name, area, iou)
        beta.add(case.name, ah, d_v, mmse_beta(ah, d_v), numeric_beta(ah, d_v),
                 least_squares_beta(ah, d_v))
        for row in conic_mode_divergence(w, ah, d_v, cfg.expansion_point):
            divergence.add(case.name, ah, row["coefficient"], row["expansion"], row["paper"],
                           row["difference"], row["predicted"])
    return CoverageOutputs(boundary, summary, beta, divergence, shapes)


# ----------------------------------------------------------------------- sweeps

SWEEP_COLUMNS = ["xi_analytic", "xi_r_analytic", "p_dwell_analytic", "xi_empirical",
                 "ci_low", "ci_high", "events"]
_UNIT_SUFFIX = {"drv_intensity": "per_m2", "pri": "s", "speed": "m_per_s"}


def _sim_config(cfg: ExperimentConfig, net) -> SimConfig:
    window = (Window.square(cfg.window_side) if cfg.window_side
              else default_window(net.bs_intensity, net.drv_intensity))
    return SimConfig(net, window, cfg.replications, cfg.periods_per_drv, cfg.seed, cfg.fidelity)


def run_sweep(cfg: ExperimentConfig, axis: SweepAxis, simulate_mc: bool = True) -> ResultTable:
    """Analytic and (optionally) simulated DRR along one sweep axis.

    Points that differ only in the PRI share one simulation: the PRI is a
    threshold applied to recorded dwell times, not an input to the paths.
    """
    x_col = f"{axis.parameter}_{_UNIT_SUFFIX[axis.parameter]}"
    cols = [x_col]
    if axis.series_parameter:
        cols.append(f"{axis.series_parameter}_{_UNIT_SUFFIX[axis.series_parameter]}")
    table = ResultTable(cols + SWEEP_COLUMNS,
                        provenance=provenance(cfg, sweep=axis.name, fidelity=cfg.fidelity,
                                              replications=cfg.replications,
                                              periods_per_drv=cfg.periods_per_drv,
                                              note=TOOL_DEFAULTS_NOTE))
    series = axis.series_values or (None,)
    cache = {}
    for s in series:
        for x in axis.values:
            changes = {axis.parameter: x}
            if axis.series_parameter:
                changes[axis.series_parameter] = s
            net = replace(cfg.net, **changes)
            a = dynamic_ranging_rate(net)
            emp, lo, hi, events = math.nan, math.nan, math.nan, 0
            if simulate_mc:
                key = replace(net, pri=0.0)
                if key not in cache:
                    sc = _sim_config(cfg, key)
                    logger.info("%s: simulating %s", axis.name,
                                {k: v for k, v in changes.items() if k != "pri"})
                    cache[key] = (sc, simulate(sc, cfg.workers))
                sc, results = cache[key]
                rep = aggregate(sc, results, pri=net.pri)
                emp, lo, hi = rep.empirical_xi.value, rep.empirical_xi.low, rep.empirical_xi.high
                events = rep.event_count
            row = [x] + ([s] if axis.series_parameter else [])
            table.add(*row, a.xi, a.xi_r, a.p_dwell, emp, lo, hi, events)
    return table
