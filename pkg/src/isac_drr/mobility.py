"""Random-waypoint DRV mobility with Rayleigh transition lengths.

A movement period is one straight transition at speed ``u`` followed by a
pause.  Transitions are drawn as (length, direction) pairs: the length is
Rayleigh with mean 1/(2√λ_v), which is the distance from a point to the
nearest node of a PPP with the waypoint intensity, and the direction is
uniform.  Pauses are exponential with the configured mean; only the mean
enters the rate formulas, and the exponential keeps the period sequence a
memoryless renewal process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .shapes import Point2


@dataclass(frozen=True)
class MobilityParams:
    waypoint_intensity: float
    speed: float
    pause_mean: float

    def __post_init__(self):
        if not self.waypoint_intensity > 0:
            raise ValueError("waypoint_intensity must be > 0")
        if not self.speed > 0:
            raise ValueError("speed must be > 0")
        if not self.pause_mean >= 0:
            raise ValueError("pause_mean must be >= 0")

    @property
    def rayleigh_scale(self) -> float:
        """σ = 1/√(2πλ_v), so that σ√(π/2) = 1/(2√λ_v)."""
        return 1.0 / math.sqrt(2 * math.pi * self.waypoint_intensity)

    @property
    def mean_length(self) -> float:
        return 0.5 / math.sqrt(self.waypoint_intensity)


@dataclass(frozen=True)
class Transition:
    start: Point2
    end: Point2
    length: float
    duration: float
    pause_after: float


@dataclass(frozen=True)
class Trajectory:
    transitions: tuple = field(default_factory=tuple)
    total_time: float = 0.0


def expected_period(params: MobilityParams) -> float:
    """E[T_s] + E[L]/u."""
    return params.pause_mean + params.mean_length / params.speed


def sample_steps(params: MobilityParams, rng: np.random.Generator, size):
    """Vectorised (length, direction, pause) draws of any shape."""
    length = rng.rayleigh(params.rayleigh_scale, size=size)
    direction = rng.uniform(0.0, 2 * math.pi, size=size)
    if params.pause_mean > 0:
        pause = rng.exponential(params.pause_mean, size=size)
    else:
        pause = np.zeros(() if size is None else size)
    return length, direction, pause


def sample_transition(current: Point2, params: MobilityParams,
                      rng: np.random.Generator) -> Transition:
    length, direction, pause = (float(v) for v in sample_steps(params, rng, None))
    end = Point2(current[0] + length * math.cos(direction),
                 current[1] + length * math.sin(direction))
    return Transition(Point2(*current), end, length, length / params.speed, pause)


def build_trajectory(start: Point2, duration: float, params: MobilityParams,
                     rng: np.random.Generator) -> Trajectory:
    """Transitions until ``duration`` is filled; the last one is cut to fit exactly.

    Positions are in the unwrapped plane; map them into a toroidal window
    with :meth:`Window.wrap_points` if needed.
    """
    if not duration > 0:
        raise ValueError("duration must be > 0")
    out = []
    elapsed = 0.0
    pos = Point2(*start)
    while True:
        tr = sample_transition(pos, params, rng)
        if elapsed + tr.duration >= duration:
            frac = (duration - elapsed) / tr.duration
            end = Point2(pos[0] + frac * (tr.end[0] - pos[0]),
                         pos[1] + frac * (tr.end[1] - pos[1]))
            out.append(Transition(pos, end, frac * tr.length, duration - elapsed, 0.0))
            break
        if elapsed + tr.duration + tr.pause_after >= duration:
            tr = Transition(tr.start, tr.end, tr.length, tr.duration,
                            duration - elapsed - tr.duration)
            out.append(tr)
            break
        out.append(tr)
        elapsed += tr.duration + tr.pause_after
        pos = tr.end
    total = math.fsum(t.duration + t.pause_after for t in out)
    return Trajectory(tuple(out), total)
