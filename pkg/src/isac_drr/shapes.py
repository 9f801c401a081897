"""Planar sensing-region shapes: circle, ellipse and closed boundary polyline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from matplotlib.path import Path

# relative slack for boundary-inclusive containment
_BOUNDARY_RTOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Circle:
    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(*self.center))
        if not self.radius >= 0:
            raise ValueError(f"radius must be >= 0, got {self.radius!r}")


@dataclass(frozen=True)
class Ellipse:
    """Ellipse with semi-axes ``s1 <= s2``.

    ``rotation`` is the angle in [0, π) between the x-axis and the axis
    carrying ``s1``.
    """

    center: Point2
    s1: float
    s2: float
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(*self.center))
        if not 0 < self.s1 <= self.s2:
            raise ValueError(f"need 0 < s1 <= s2, got s1={self.s1!r}, s2={self.s2!r}")
        if not 0 <= self.rotation < math.pi:
            raise ValueError(f"rotation must lie in [0, pi), got {self.rotation!r}")


@dataclass(frozen=True, eq=False)
class BoundaryPolyline:
    """Closed polygon; the closing edge from the last vertex back to the first is implicit."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise ValueError("a boundary polyline needs at least 3 (x, y) vertices")
        if not np.all(np.isfinite(pts)):
            raise ValueError("polyline vertices must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


SensingShape = Union[Circle, Ellipse, BoundaryPolyline]


def shape_area(shape: SensingShape) -> float:
    if isinstance(shape, Circle):
        return math.pi * shape.radius**2
    if isinstance(shape, Ellipse):
        return math.pi * shape.s1 * shape.s2
    if isinstance(shape, BoundaryPolyline):
        x, y = shape.points[:, 0], shape.points[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _on_polyline(pts: np.ndarray, q: np.ndarray, tol: float) -> np.ndarray:
    a = pts
    b = np.roll(pts, -1, axis=0)
    ab = b - a
    len2 = np.einsum("ij,ij->i", ab, ab)
    # (n_query, n_edges)
    t = ((q[:, None, 0] - a[None, :, 0]) * ab[None, :, 0]
         + (q[:, None, 1] - a[None, :, 1]) * ab[None, :, 1]) / np.where(len2 > 0, len2, 1.0)
    t = np.clip(t, 0.0, 1.0)
    px = a[None, :, 0] + t * ab[None, :, 0]
    py = a[None, :, 1] + t * ab[None, :, 1]
    dist2 = (q[:, None, 0] - px) ** 2 + (q[:, None, 1] - py) ** 2
    return np.any(dist2 <= tol**2, axis=1)


def contains_points(shape: SensingShape, xy, include_boundary: bool = True) -> np.ndarray:
    """Vectorised containment for an ``(n, 2)`` array of query points.

    Polylines use the even-odd crossing rule.  The exact on-edge test is
    O(n_points * n_edges); pass ``include_boundary=False`` for dense grids
    where the boundary has measure zero.
    """
    q = np.atleast_2d(np.asarray(xy, dtype=float))
    if isinstance(shape, Circle):
        d2 = (q[:, 0] - shape.center.x) ** 2 + (q[:, 1] - shape.center.y) ** 2
        return d2 <= shape.radius**2 * (1 + _BOUNDARY_RTOL)
    if isinstance(shape, Ellipse):
        c, s = math.cos(shape.rotation), math.sin(shape.rotation)
        dx, dy = q[:, 0] - shape.center.x, q[:, 1] - shape.center.y
        u = (c * dx + s * dy) / shape.s1
        v = (-s * dx + c * dy) / shape.s2
        return u * u + v * v <= 1 + _BOUNDARY_RTOL
    if isinstance(shape, BoundaryPolyline):
        pts = shape.points
        inside = Path(pts, closed=False).contains_points(q)
        if include_boundary:
            scale = float(np.ptp(pts, axis=0).max()) or 1.0
            inside |= _on_polyline(pts, q, _BOUNDARY_RTOL * scale)
        return inside
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def grid_contains(shape: SensingShape, xs, ys) -> np.ndarray:
    """Interior mask on the lattice ``xs`` x ``ys`` (shape ``(len(ys), len(xs))``).

    Polylines are rasterised by scanlines under the even-odd rule, which costs
    O(rows * edges) instead of O(cells * edges); boundary points are not
    guaranteed either way.
    """
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if not isinstance(shape, BoundaryPolyline):
        gx, gy = np.meshgrid(xs, ys)
        q = np.column_stack([gx.ravel(), gy.ravel()])
        return contains_points(shape, q, include_boundary=False).reshape(len(ys), len(xs))
    a = shape.points
    b = np.roll(a, -1, axis=0)
    y = ys[:, None]
    crosses = (a[None, :, 1] > y) != (b[None, :, 1] > y)
    dy = np.where(b[:, 1] != a[:, 1], b[:, 1] - a[:, 1], 1.0)
    x_cross = a[None, :, 0] + (y - a[None, :, 1]) * (b[None, :, 0] - a[None, :, 0]) / dy
    x_cross = np.sort(np.where(crosses, x_cross, np.inf), axis=1)
    left = np.array([np.searchsorted(row, xs, side="right") for row in x_cross])
    return (left % 2) == 1


def shape_contains(shape: SensingShape, p: Point2) -> bool:
    """True iff ``p`` lies inside ``shape`` or on its boundary."""
    return bool(contains_points(shape, [p])[0])


def boundary_points(shape: SensingShape, n: int = 720) -> np.ndarray:
    """``(n, 2)`` boundary samples; polylines return their own vertices."""
    if isinstance(shape, BoundaryPolyline):
        return np.array(shape.points)
    theta = 2 * np.pi * np.arange(n) / n
    if isinstance(shape, Circle):
        return np.column_stack([
            shape.center.x + shape.radius * np.cos(theta),
            shape.center.y + shape.radius * np.sin(theta),
        ])
    if isinstance(shape, Ellipse):
        c, s = math.cos(shape.rotation), math.sin(shape.rotation)
        u, v = shape.s1 * np.cos(theta), shape.s2 * np.sin(theta)
        return np.column_stack([
            shape.center.x + c * u - s * v,
            shape.center.y + s * u + c * v,
        ])
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def bounding_box(shape: SensingShape) -> tuple[float, float, float, float]:
    """(xmin, ymin, xmax, ymax)."""
    if isinstance(shape, Circle):
        cx, cy = shape.center
        r = shape.radius
        return cx - r, cy - r, cx + r, cy + r
    if isinstance(shape, Ellipse):
        c, s = math.cos(shape.rotation), math.sin(shape.rotation)
        hx = math.hypot(shape.s1 * c, shape.s2 * s)
        hy = math.hypot(shape.s1 * s, shape.s2 * c)
        cx, cy = shape.center
        return cx - hx, cy - hy, cx + hx, cy + hy
    pts = shape.points
    return (*pts.min(axis=0), *pts.max(axis=0))
