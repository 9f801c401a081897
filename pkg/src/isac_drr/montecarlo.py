"""Seeded Monte-Carlo engine for sensing events of moving DRV disks.

One replication realises the full network on a torus:

1. BSs and initial DRV positions are independent PPPs (BSs stay put).
2. A static target sits at the window centre.
3. Every DRV follows the random-waypoint model for a fixed horizon of
   ``periods_per_drv`` mean movement periods.  At the start of each period
   the DRV's sensing disk is set from its current nearest-BS distance d:
   radius √W d/(1-W), centred d W/(1-W) beyond the DRV on the BS-DRV line.
   The disk then translates rigidly with the DRV for the whole transition.
4. An event is one outside-to-inside crossing of the target by a moving
   disk.  Events from different DRVs count separately.

Fidelity modes differ only in the dwell assigned to an event:

``assumption_matched``
    full line chord / u, as if the DRV always traverses the whole disk.
``full``
    the part of the chord actually travelled before the transition ends,
    plus the following pause if the target is still inside.

Random streams are keyed by (seed, replication), so a replication's draws do
not depend on which worker runs it or in what order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .mobility import MobilityParams, expected_period
from .params import NetworkParams
from .pointprocess import Window, default_window
from .shapes import Circle, Point2

logger = logging.getLogger(__name__)

FIDELITIES = ("assumption_matched", "full")
Z95 = 1.959963984540054


@dataclass(frozen=True)
class SimConfig:
    net: NetworkParams
    window: Optional[Window] = None
    replications: int = 1000
    periods_per_drv: int = 100
    seed: int = 0
    fidelity: str = "assumption_matched"
    rc_sample_periods: int = 10

    def __post_init__(self):
        if self.replications < 1 or self.periods_per_drv < 1:
            raise ValueError("replications and periods_per_drv must be >= 1")
        if self.fidelity not in FIDELITIES:
            raise ValueError(f"fidelity must be one of {FIDELITIES}, got {self.fidelity!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.window is None:
            object.__setattr__(
                self, "window", default_window(self.net.bs_intensity, self.net.drv_intensity)
            )

    @property
    def mobility(self) -> MobilityParams:
        n = self.net
        return MobilityParams(n.drv_intensity, n.speed, n.pause_mean)

    @property
    def horizon(self) -> float:
        """Simulated seconds per replication."""
        return self.periods_per_drv * expected_period(self.mobility)


@dataclass(frozen=True)
class DwellEvent:
    drv_index: int
    transition_index: int
    dwell: float
    qualifying: bool


@dataclass(frozen=True)
class Estimate:
    value: float
    half_width: float

    @property
    def low(self) -> float:
        return self.value - self.half_width

    @property
    def high(self) -> float:
        return self.value + self.half_width

    def covers(self, x: float) -> bool:
        return self.low <= x <= self.high


@dataclass
class ReplicationResult:
    rep_index: int
    sim_time: float = 0.0
    rc_sum: float = 0.0
    rc_count: int = 0
    dwells: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n_drv: int = 0
    n_transitions: int = 0
    bs_resamples: int = 0
    dwell_events: list = field(default_factory=list)


@dataclass(frozen=True)
class SimReport:
    empirical_xi: Estimate
    empirical_xi_r: Estimate
    empirical_p_dwell: Optional[Estimate]
    mean_rc: Estimate
    event_count: int
    qualifying_count: int
    rc_samples: int
    sim_time: float
    seed: int
    replications: int
    fidelity: str
    pri: float = 0.0
    mean_dwell: Optional[float] = None

    def as_dict(self) -> dict:
        def est(e):
            return None if e is None else {"value": e.value, "half_width": e.half_width}
        return {
            "empirical_xi": est(self.empirical_xi),
            "empirical_xi_r": est(self.empirical_xi_r),
            "empirical_p_dwell": est(self.empirical_p_dwell),
            "mean_rc": est(self.mean_rc),
            "event_count": self.event_count,
            "qualifying_count": self.qualifying_count,
            "rc_samples": self.rc_samples,
            "sim_time": self.sim_time,
            "seed": self.seed,
            "replications": self.replications,
            "fidelity": self.fidelity,
            "pri": self.pri,
            "mean_dwell": self.mean_dwell,
        }


# ------------------------------------------------------------ segment geometry

def _crossings(v0: np.ndarray, v1: np.ndarray, radius: np.ndarray):
    """Entry of segments v0 -> v1 into disks of ``radius`` centred at the origin.

    Returns (entered, t_in, t_out, seg_len) with t the segment parameter of
    the two line/circle intersections.  A segment enters when it starts
    strictly outside and the first intersection lies on the segment.
    """
    d = v1 - v0
    a = np.einsum("...i,...i->...", d, d)
    b = 2 * np.einsum("...i,...i->...", v0, d)
    c = np.einsum("...i,...i->...", v0, v0) - radius * radius
    disc = b * b - 4 * a * c
    ok = (a > 0) & (c > 0) & (disc >= 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    safe_a = np.where(a > 0, a, 1.0)
    t_in = (-b - sq) / (2 * safe_a)
    t_out = (-b + sq) / (2 * safe_a)
    entered = ok & (t_in >= 0) & (t_in <= 1)
    return entered, t_in, t_out, np.sqrt(a)


def segment_disk_dwell(seg_start: Point2, seg_end: Point2, disk: Circle, speed: float,
                       fidelity: str = "assumption_matched") -> Optional[float]:
    """Dwell time of a point moving along a segment through a disk.

    Returns None when the segment does not enter the disk.  In
    ``assumption_matched`` mode the dwell is the full chord of the segment's
    line divided by ``speed``; in ``full`` mode only the travelled part of
    the chord counts.  Tangency yields a zero dwell.
    """
    if not speed > 0:
        raise ValueError("speed must be > 0")
    c = np.array(disk.center)
    v0 = np.asarray(seg_start, dtype=float) - c
    v1 = np.asarray(seg_end, dtype=float) - c
    entered, t_in, t_out, seg_len = _crossings(v0, v1, np.float64(disk.radius))
    if not entered:
        return None
    t_exit = t_out if fidelity == "assumption_matched" else min(t_out, 1.0)
    return float((t_exit - t_in) * seg_len / speed)


# ----------------------------------------------------------------- replication

def _streams(seed: int, rep_index: int):
    ss = np.random.SeedSequence(seed, spawn_key=(rep_index,))
    return [np.random.default_rng(s) for s in ss.spawn(3)]


def _draw_steps(mob: MobilityParams, rng: np.random.Generator, n: int, m: int):
    length = rng.rayleigh(mob.rayleigh_scale, size=(n, m))
    direction = rng.uniform(0.0, 2 * math.pi, size=(n, m))
    pause = rng.exponential(mob.pause_mean, size=(n, m)) if mob.pause_mean > 0 else np.zeros((n, m))
    return length, direction, pause


def run_replication(cfg: SimConfig, rep_index: int, keep_events: bool = False) -> ReplicationResult:
    """Simulate one network realisation for ``cfg.horizon`` seconds."""
    net, win, mob = cfg.net, cfg.window, cfg.mobility
    bs_rng, drv_rng, mob_rng = _streams(cfg.seed, rep_index)
    size = np.array([win.width, win.height])
    out = ReplicationResult(rep_index)
    horizon = cfg.horizon
    out.sim_time = horizon

    n_bs = bs_rng.poisson(net.bs_intensity * win.area)
    while n_bs == 0:
        out.bs_resamples += 1
        n_bs = bs_rng.poisson(net.bs_intensity * win.area)
    if out.bs_resamples:
        logger.info("replication %d: resampled empty BS pattern %d time(s)", rep_index, out.bs_resamples)
    bs = bs_rng.random((n_bs, 2)) * size
    tree = cKDTree(bs, boxsize=size) if win.wrap else cKDTree(bs)

    n_drv = drv_rng.poisson(net.drv_intensity * win.area)
    out.n_drv = int(n_drv)
    if n_drv == 0:
        return out
    start = drv_rng.random((n_drv, 2)) * size

    # draw enough periods to cover the horizon for every DRV
    m = cfg.periods_per_drv + int(6 * math.sqrt(cfg.periods_per_drv)) + 8
    length, direction, pause = _draw_steps(mob, mob_rng, n_drv, m)
    dur = length / mob.speed
    t_start = np.cumsum(dur + pause, axis=1) - (dur + pause)
    while np.any(t_start[:, -1] + dur[:, -1] + pause[:, -1] < horizon):
        l2, d2, p2 = _draw_steps(mob, mob_rng, n_drv, m)
        length = np.hstack([length, l2])
        direction = np.hstack([direction, d2])
        pause = np.hstack([pause, p2])
        dur = length / mob.speed
        t_start = np.cumsum(dur + pause, axis=1) - (dur + pause)

    active = t_start < horizon
    # fraction of each transition completed before the horizon
    frac = np.clip((horizon - t_start) / np.where(dur > 0, dur, 1.0), 0.0, 1.0)
    step = np.stack([np.cos(direction), np.sin(direction)], axis=-1) * length[..., None]
    pos = start[:, None, :] + np.cumsum(step, axis=1) - step  # period start positions

    w = net.w
    k_radius = math.sqrt(w) / (1 - w)
    k_offset = w / (1 - w)
    target = np.array(win.center)

    # R_c statistics from every DRV's first periods (unbiased, independent of the target)
    n_rc = min(cfg.rc_sample_periods, pos.shape[1])
    rc_pts = pos[:, :n_rc].reshape(-1, 2)[active[:, :n_rc].ravel()]
    rc_d, _ = tree.query(np.mod(rc_pts, size) if win.wrap else rc_pts)
    out.rc_sum = float(math.fsum(k_radius * rc_d))
    out.rc_count = int(rc_d.size)
    out.n_transitions = int(active.sum())

    # Only transitions that can reach the target need the nearest-BS query:
    # d(p) <= |p - T| + d(T), and a hit needs |p - T| <= (k_radius + k_offset) d(p) + L.
    rel = target - pos
    if win.wrap:
        rel -= size * np.round(rel / size)
    gap = np.hypot(rel[..., 0], rel[..., 1])
    d_target = float(tree.query(target)[0])
    k_reach = k_radius + k_offset
    if k_reach < 1:
        reach = (k_reach * d_target + length) / (1 - k_reach)
        active &= gap <= reach * (1 + 1e-9) + 1e-9
    idx = np.nonzero(active)
    p0 = pos[idx]
    if win.wrap:
        p0 = np.mod(p0, size)
    dist, nearest = tree.query(p0)
    radius = k_radius * dist

    away = p0 - bs[nearest]
    if win.wrap:
        away -= size * np.round(away / size)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(dist[:, None] > 0, away / dist[:, None], 0.0)
    center = p0 + unit * (k_offset * dist)[:, None]

    v0 = target - center
    if win.wrap:
        v0 -= size * np.round(v0 / size)
    move = step[idx] * frac[idx][:, None]
    v1 = v0 - move
    entered, t_in, t_out, seg_len = _crossings(v0, v1, radius)

    if cfg.fidelity == "assumption_matched":
        dwell = (t_out - t_in) * seg_len / mob.speed
    else:
        dwell = (np.minimum(t_out, 1.0) - t_in) * seg_len / mob.speed
        # still inside when a completed transition ends: the following pause counts too
        t_left = horizon - t_start[idx] - dur[idx]
        pause_in = np.where((frac[idx] >= 1.0) & (t_out > 1.0),
                            np.clip(np.minimum(pause[idx], t_left), 0.0, None), 0.0)
        dwell = dwell + pause_in
    out.dwells = dwell[entered]
    if keep_events:
        drv_i, tr_i = idx[0][entered], idx[1][entered]
        out.dwell_events = [DwellEvent(int(a), int(b), float(c), bool(c >= net.pri))
                            for a, b, c in zip(drv_i, tr_i, out.dwells)]
    return out


# ------------------------------------------------------------------ aggregation

def _ratio_ci(num: np.ndarray, den: np.ndarray) -> Optional[Estimate]:
    """Ratio of sums with a delta-method 95% interval over replications."""
    total = den.sum()
    if total == 0:
        return None
    r = float(num.sum() / total)
    n = len(num)
    if n < 2:
        return Estimate(r, math.inf)
    resid = num - r * den
    half = Z95 * float(np.std(resid, ddof=1)) / (math.sqrt(n) * float(den.mean()))
    return Estimate(r, half)


def aggregate(cfg: SimConfig, results: list[ReplicationResult],
              pri: Optional[float] = None) -> SimReport:
    """Combine replications into a report.

    ``pri`` overrides the qualifying threshold of ``cfg.net``; sample paths
    do not depend on it, so one simulation serves a whole family of PRIs.
    """
    tau = cfg.net.pri if pri is None else pri
    results = sorted(results, key=lambda r: r.rep_index)
    events = np.array([len(r.dwells) for r in results], dtype=float)
    qual = np.array([np.count_nonzero(r.dwells >= tau) for r in results], dtype=float)
    times = np.array([r.sim_time for r in results])
    rc_sum = np.array([r.rc_sum for r in results])
    rc_n = np.array([r.rc_count for r in results], dtype=float)
    if times.sum() <= 0:
        raise ValueError("zero total simulated time")
    n_events = int(events.sum())
    dwell_total = math.fsum(math.fsum(r.dwells) for r in results)
    return SimReport(
        empirical_xi=_ratio_ci(qual, times),
        empirical_xi_r=_ratio_ci(events, times),
        empirical_p_dwell=_ratio_ci(qual, events),
        mean_rc=_ratio_ci(rc_sum, rc_n) or Estimate(math.nan, math.inf),
        event_count=n_events,
        qualifying_count=int(qual.sum()),
        rc_samples=int(rc_n.sum()),
        sim_time=float(times.sum()),
        seed=cfg.seed,
        replications=len(results),
        fidelity=cfg.fidelity,
        pri=tau,
        mean_dwell=dwell_total / n_events if n_events else None,
    )


def _run_one(args):
    cfg, rep = args
    return run_replication(cfg, rep)


def simulate(cfg: SimConfig, workers: int = 1) -> list[ReplicationResult]:
    """All replications of ``cfg`` in replication order, for any ``workers``."""
    jobs = [(cfg, r) for r in range(cfg.replications)]
    if workers > 1:
        chunk = max(1, cfg.replications // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs, chunksize=chunk))
    return [_run_one(j) for j in jobs]


def estimate(cfg: SimConfig, workers: int = 1) -> SimReport:
    """Run all replications and aggregate; the output does not depend on ``workers``."""
    return aggregate(cfg, simulate(cfg, workers))
