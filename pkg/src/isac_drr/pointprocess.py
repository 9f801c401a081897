"""Homogeneous Poisson point processes and nearest-neighbour distance laws."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .shapes import Point2


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle [0, width) x [0, height), optionally a torus."""

    width: float
    height: float
    wrap: bool = True

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("window sides must be > 0")

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point2:
        return Point2(self.width / 2, self.height / 2)

    @classmethod
    def square(cls, side: float, wrap: bool = True) -> "Window":
        return cls(side, side, wrap)

    def displacement(self, frm, to) -> np.ndarray:
        """``to - frm``, reduced to the minimum image on a torus."""
        delta = np.asarray(to, dtype=float) - np.asarray(frm, dtype=float)
        if self.wrap:
            size = np.array([self.width, self.height])
            delta = delta - size * np.round(delta / size)
        return delta

    def wrap_points(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=float)
        if not self.wrap:
            return xy
        return np.mod(xy, [self.width, self.height])


def default_window(*intensities: float) -> Window:
    """Torus with side 10/√min(λ), keeping edge effects far below 1%."""
    return Window.square(10.0 / math.sqrt(min(intensities)))


@dataclass(frozen=True, eq=False)
class PointPattern:
    points: np.ndarray
    intensity: float
    window: Window

    def __len__(self):
        return len(self.points)


def sample_ppp(intensity: float, window: Window, rng: np.random.Generator) -> PointPattern:
    """Poisson(λ|A|) points placed i.i.d. uniformly in ``window``."""
    if intensity < 0:
        raise ValueError(f"intensity must be >= 0, got {intensity!r}")
    n = rng.poisson(intensity * window.area) if intensity > 0 else 0
    pts = rng.random((n, 2)) * [window.width, window.height]
    return PointPattern(pts, intensity, window)


def _tree(pattern: PointPattern) -> cKDTree:
    w = pattern.window
    if w.wrap:
        # cKDTree's periodic box is half-open; fold any coordinate equal to the side
        pts = np.mod(pattern.points, [w.width, w.height])
        return cKDTree(pts, boxsize=[w.width, w.height])
    return cKDTree(pattern.points)


def nearest_distances(origins, pattern: PointPattern) -> np.ndarray:
    """Distance from each of ``origins`` (n, 2) to its nearest pattern point."""
    if len(pattern) == 0:
        raise ValueError("nearest distance of an empty pattern is undefined")
    q = np.atleast_2d(np.asarray(origins, dtype=float))
    if pattern.window.wrap:
        q = pattern.window.wrap_points(q)
    dist, _ = _tree(pattern).query(q)
    return dist


def nearest_distance(origin: Point2, pattern: PointPattern) -> float:
    return float(nearest_distances([origin], pattern)[0])


def mean_nearest_distance(intensity: float) -> float:
    """1/(2√λ), the mean of the Rayleigh nearest-point distance."""
    if not intensity > 0:
        raise ValueError(f"intensity must be > 0, got {intensity!r}")
    return 0.5 / math.sqrt(intensity)


def nearest_distance_cdf(r, intensity: float):
    """P(D <= r) = 1 - exp(-πλr²)."""
    return -np.expm1(-math.pi * intensity * np.square(r))


def rc_scale(w: float) -> float:
    """√W/(1-W): sensing radius per metre of BS-DRV distance (β = 1)."""
    if not 0 < w < 1:
        raise ValueError(f"need 0 < W < 1, got {w!r}")
    return math.sqrt(w) / (1 - w)


def expected_rc(w: float, lambda_b: float) -> float:
    """Mean sensing radius when the BS-DRV distance is Rayleigh with intensity λ_b."""
    return rc_scale(w) * mean_nearest_distance(lambda_b)


def rc_pdf(r, w: float, lambda_b: float):
    """Density of R_c = k D, D Rayleigh(λ_b), k = √W/(1-W).

    Change of variables gives f(r) = (2πλ_b r / k²) exp(-πλ_b r²/k²), r >= 0.
    """
    k = rc_scale(w)
    r = np.asarray(r, dtype=float)
    out = 2 * math.pi * lambda_b * r / k**2 * np.exp(-math.pi * lambda_b * r**2 / k**2)
    return np.where(r >= 0, out, 0.0)


def sample_nearest_distances(intensity: float, window: Window, n: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Nearest-point distance from the window centre in ``n`` independent PPP draws.

    Realisations that come out empty are redrawn.
    """
    counts = rng.poisson(intensity * window.area, size=n)
    while np.any(counts == 0):
        empty = counts == 0
        counts[empty] = rng.poisson(intensity * window.area, size=int(empty.sum()))
    pts = rng.random((int(counts.sum()), 2)) * [window.width, window.height]
    delta = window.displacement(window.center, pts)
    d = np.hypot(delta[:, 0], delta[:, 1])
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return np.minimum.reduceat(d, starts)
