"""DRV sensing region: exact equal-power contour, circle and Taylor-conic fits.

With the BS at the origin and the DRV at ``(d_v, 0)``, a target at ``(x, y)``
sees equal echo power from both nodes when

    W (x² + y²)^α̂ - ((x - d_v)² + y²) = 0.

The region inside this contour (residual > 0) is where the DRV out-senses
the BS.  Three representations are computed here:

* ``exact_boundary`` traces the contour numerically (ray bisection from the
  DRV); it is the reference every approximation is scored against.
* ``circle_approximation`` replaces ``(x² + y²)^α̂`` by ``β (x² + y²)``,
  which is exact when α̂ = 1.
* ``taylor_conic`` replaces it by its second-order Taylor polynomial around
  an expansion point and returns the conic ``a x² + 2b xy + c y² + 2d x +
  2f y + g = 0``; ``conic_to_ellipse`` turns that into an :class:`Ellipse`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from .channel import rsp_residual
from .params import mmse_beta
from .shapes import (BoundaryPolyline, Circle, Ellipse, Point2, SensingShape,
                     bounding_box, boundary_points, grid_contains)

__all__ = [
    "ContourNotFoundError", "DegenerateConicError", "NotAnEllipseError",
    "ConicCoefficients", "CoverageResult", "exact_boundary", "mmse_beta",
    "numeric_beta", "least_squares_beta", "circle_approximation", "taylor_conic",
    "conic_to_ellipse", "approximation_quality", "conic_mode_divergence",
    "analyze_coverage",
]


class ContourNotFoundError(RuntimeError):
    """No sign change of the equal-power residual along a ray."""


class DegenerateConicError(ValueError):
    pass


class NotAnEllipseError(DegenerateConicError):
    pass


# ---------------------------------------------------------------- exact contour

def exact_boundary(w: float, alpha_hat: float, d_v: float, n_angles: int = 720,
                   xtol: float = 1e-12) -> BoundaryPolyline:
    """Trace the equal-power contour on ``n_angles`` rays from the DRV.

    For each ray angle θ the first root r > 0 of
    ``W((d_v + r cosθ)² + (r sinθ)²)^α̂ - r²`` is bracketed by doubling r from
    ``1e-6 d_v`` (capped at ``10 d_v``) and then bisected until the bracket
    is narrower than ``xtol * d_v``.  Only the upper half-plane is solved;
    the lower half is its mirror image, so the polyline is exactly symmetric
    about the x-axis.
    """
    if not 0 < w < 1:
        raise ValueError(f"need 0 < W < 1, got {w!r}")
    if not 0 < alpha_hat <= 1:
        raise ValueError(f"need 0 < alpha_hat <= 1, got {alpha_hat!r}")
    if not d_v > 0:
        raise ValueError(f"need d_v > 0, got {d_v!r}")
    if n_angles < 16:
        raise ValueError("n_angles must be >= 16")

    k_half = np.arange(n_angles // 2 + 1)
    theta = 2 * np.pi * k_half / n_angles
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    # the ray at θ = π is exactly the negative x-axis
    if n_angles % 2 == 0:
        cos_t[-1], sin_t[-1] = -1.0, 0.0
    sin_t[0] = 0.0

    def residual(r):
        shape = (-1,) + (1,) * (np.ndim(r) - 1)
        x = d_v + r * cos_t.reshape(shape)
        y = r * sin_t.reshape(shape)
        return w * (x * x + y * y) ** alpha_hat - r * r

    n_steps = math.ceil(math.log2(10.0 / 1e-6))
    steps = np.minimum(1e-6 * d_v * 2.0 ** np.arange(n_steps + 1), 10.0 * d_v)
    grid = np.broadcast_to(steps, (len(theta), len(steps)))
    res = residual(grid)
    crossed = res <= 0
    if not np.all(crossed.any(axis=1)):
        bad = theta[~crossed.any(axis=1)]
        raise ContourNotFoundError(
            f"no equal-power crossing within 10 d_v at {len(bad)} ray(s), e.g. theta={bad[0]:.4f}"
        )
    first = crossed.argmax(axis=1)
    hi = steps[first]
    lo = np.where(first > 0, steps[np.maximum(first - 1, 0)], 0.0)
    tol = xtol * d_v
    for _ in range(200):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        inside = residual(mid) > 0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    r = 0.5 * (lo + hi)

    upper = np.column_stack([d_v + r * cos_t, r * sin_t])
    k = np.arange(n_angles)
    src = np.where(k <= n_angles // 2, k, n_angles - k)
    pts = upper[src].copy()
    pts[k > n_angles // 2, 1] *= -1.0
    return BoundaryPolyline(pts)


# ------------------------------------------------------------------ beta fits

def _abs_error_integral(beta: float, alpha_hat: float, d_v: float, n: int) -> float:
    r = np.linspace(0.0, d_v, n)
    return float(np.trapezoid(np.abs(r ** (2 * alpha_hat) - beta * r * r), r))


def numeric_beta(alpha_hat: float, d_v: float, n_quad: int = 10_000,
                 rtol: float = 1e-6) -> float:
    """Minimise ∫₀^{d_v} |r^(2α̂) - β r²| dr over β by golden-section search.

    The search runs in log β on a trapezoid rule with ``n_quad`` nodes.  For
    α̂ < 1 the minimiser lies between d_v^(2α̂-2) and (d_v/1000)^(2α̂-2), which
    seeds the bracket.
    """
    if not d_v > 0:
        raise ValueError(f"need d_v > 0, got {d_v!r}")
    lo = 2 * (alpha_hat - 1) * math.log(d_v) - 1.0
    hi = 2 * (alpha_hat - 1) * math.log(d_v / 1000.0) + 1.0
    mid = 0.5 * (lo + hi)

    def objective(log_beta):
        return _abs_error_integral(math.exp(log_beta), alpha_hat, d_v, n_quad)

    # golden's tol is relative to |x|; convert to an absolute log-β tolerance
    tol = rtol / max(abs(mid), 1.0)
    brack = (lo, mid, hi)
    if not (objective(mid) < objective(lo) and objective(mid) < objective(hi)):
        brack = (lo, hi)
    res = optimize.minimize_scalar(objective, bracket=brack, method="golden",
                                   options={"xtol": tol})
    return math.exp(res.x)


def least_squares_beta(alpha_hat: float, d_v: float) -> float:
    """β minimising the squared error ∫₀^{d_v} (r^(2α̂) - β r²)² dr: 5 d_v^(2α̂-2)/(2α̂+3)."""
    return 5.0 * d_v ** (2 * (alpha_hat - 1)) / (2 * alpha_hat + 3)


# --------------------------------------------------------------------- circle

def circle_approximation(w: float, beta: float, d_v: float) -> Circle:
    """Centre (d_v/(1-βW), 0), radius √(βW) d_v / (1-βW)."""
    bw = beta * w
    if not bw < 1:
        raise DegenerateConicError(f"beta*W = {bw:.6g} >= 1: circle centre diverges")
    if not bw > 0:
        raise ValueError(f"beta*W must be > 0, got {bw!r}")
    if d_v < 0:
        raise ValueError(f"need d_v >= 0, got {d_v!r}")
    return Circle(Point2(d_v / (1 - bw), 0.0), math.sqrt(bw) * d_v / (1 - bw))


# ---------------------------------------------------------------------- conic

@dataclass(frozen=True)
class ConicCoefficients:
    """a x² + 2b xy + c y² + 2d x + 2f y + g = 0 plus its centre data.

    ``h`` is the constant of the conic translated to its centre and
    ``lam_min``/``lam_max`` the eigenvalues of [[a, b], [b, c]].
    """

    a: float
    b: float
    c: float
    d: float
    f: float
    g: float
    center: Point2
    h: float
    lam_min: float
    lam_max: float
    mode: str = "raw"

    @classmethod
    def from_quadratic(cls, a, b, c, d, f, g, mode="raw") -> "ConicCoefficients":
        disc = b * b - a * c
        if disc == 0:
            raise NotAnEllipseError("b^2 - ac = 0: conic has no unique centre")
        xe = (c * d - b * f) / disc
        ye = (a * f - b * d) / disc
        h = g - a * xe * xe - 2 * b * xe * ye - c * ye * ye
        root = math.sqrt((a - c) ** 2 + 4 * b * b)
        lam1, lam2 = ((a + c) - root) / 2, ((a + c) + root) / 2
        return cls(a, b, c, d, f, g, Point2(xe, ye), h, lam1, lam2, mode)

    @property
    def coefficients(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.f, self.g)

    def evaluate(self, xy) -> np.ndarray:
        q = np.asarray(xy, dtype=float)
        x, y = q[..., 0], q[..., 1]
        return (self.a * x * x + 2 * self.b * x * y + self.c * y * y
                + 2 * self.d * x + 2 * self.f * y + self.g)

    def normalized(self) -> "ConicCoefficients":
        """Same conic scaled so the quadratic form is positive definite.

        Raises NotAnEllipseError when no such scaling exists.
        """
        if self.b * self.b - self.a * self.c >= 0:
            raise NotAnEllipseError(
                f"b^2 - ac = {self.b * self.b - self.a * self.c:.6g} >= 0: not an ellipse"
            )
        if self.a + self.c > 0:
            return self
        return ConicCoefficients.from_quadratic(*(-v for v in self.coefficients), mode=self.mode)


def _taylor_terms(alpha_hat: float, i: float, j: float):
    """Value, gradient and Hessian of (x² + y²)^α̂ at (i, j)."""
    s = i * i + j * j
    p = s ** (alpha_hat - 1)
    q = s ** (alpha_hat - 2)
    f0 = s**alpha_hat
    fx = 2 * alpha_hat * i * p
    fy = 2 * alpha_hat * j * p
    fxx = 2 * alpha_hat * (p + 2 * (alpha_hat - 1) * i * i * q)
    fxy = 4 * alpha_hat * (alpha_hat - 1) * i * j * q
    fyy = 2 * alpha_hat * (p + 2 * (alpha_hat - 1) * j * j * q)
    return f0, fx, fy, fxx, fxy, fyy


def _expansion_coefficients(w, alpha_hat, d_v, i, j):
    f0, fx, fy, fxx, fxy, fyy = _taylor_terms(alpha_hat, i, j)
    # W*T(x, y) - (x² + y² - 2 d_v x + d_v²) with T the quadratic Taylor polynomial,
    # collected by monomial
    a = w * fxx / 2 - 1
    b = w * fxy / 2
    c = w * fyy / 2 - 1
    d = w * (fx - fxx * i - fxy * j) / 2 + d_v
    f = w * (fy - fyy * j - fxy * i) / 2
    const = f0 - fx * i - fy * j + fxx * i * i / 2 + fxy * i * j + fyy * j * j / 2
    g = w * const - d_v * d_v
    return a, b, c, d, f, g


def _paper_coefficients(w, alpha_hat, d_v, i, j):
    s = i * i + j * j
    p = s ** (alpha_hat - 1)
    q = s ** (alpha_hat - 2)
    ah = alpha_hat
    a = w * ah * p + w * ah * (ah - 1) * 2 * i * i * q - 1
    b = w * ah * (ah - 1) * i * j * q
    c = w * ah * p + w * ah * (ah - 1) * 2 * j * j * q - 1
    d = w * ah * i * p + d_v
    f = w * ah * j * p
    g = w * s**ah - d_v * d_v
    return a, b, c, d, f, g


def taylor_conic(w: float, alpha_hat: float, d_v: float,
                 expansion_point: Optional[Point2] = None,
                 mode: str = "expansion") -> ConicCoefficients:
    """Quadratic-Taylor conic of the equal-power contour.

    ``mode="expansion"`` substitutes the full second-order Taylor polynomial
    of (x² + y²)^α̂ about ``expansion_point`` (default: the DRV at (d_v, 0))
    and collects monomials.  ``mode="paper"`` uses the published coefficient
    list verbatim; the two differ in b, d, f and g, see
    :func:`conic_mode_divergence`.
    """
    if not 0 < alpha_hat <= 1:
        raise ValueError(f"need 0 < alpha_hat <= 1, got {alpha_hat!r}")
    i, j = expansion_point if expansion_point is not None else (d_v, 0.0)
    if i == 0 and j == 0:
        raise ValueError("expansion point must differ from the BS at the origin")
    if mode == "expansion":
        coeffs = _expansion_coefficients(w, alpha_hat, d_v, i, j)
    elif mode == "paper":
        coeffs = _paper_coefficients(w, alpha_hat, d_v, i, j)
    else:
        raise ValueError(f"unknown conic mode {mode!r}")
    conic = ConicCoefficients.from_quadratic(*coeffs, mode=mode)
    norm = conic.normalized()
    if not norm.h < 0:
        raise DegenerateConicError(f"translated constant h = {norm.h:.6g}: empty or point conic")
    return conic


def conic_to_ellipse(coeffs: ConicCoefficients) -> Ellipse:
    """Centre, semi-axes and orientation of an elliptic conic.

    The coefficients are first scaled so that [[a, b], [b, c]] is positive
    definite; the translated constant ``h`` must then be negative and the
    semi-axes are √(|h|/λ_max) ≤ √(|h|/λ_min).  ``rotation`` is the
    direction of the λ_max eigenvector, which carries the shorter axis.
    """
    n = coeffs.normalized()
    if not n.h < 0 or not n.lam_min > 0:
        raise DegenerateConicError(
            f"non-positive radicand: h = {n.h:.6g}, eigenvalues = ({n.lam_min:.6g}, {n.lam_max:.6g})"
        )
    s1 = math.sqrt(-n.h / n.lam_max)
    s2 = math.sqrt(-n.h / n.lam_min)
    rotation = (0.5 * math.atan2(2 * n.b, n.a - n.c)) % math.pi
    return Ellipse(n.center, s1, s2, rotation)


def conic_mode_divergence(w: float, alpha_hat: float, d_v: float,
                          expansion_point: Optional[Point2] = None) -> list[dict]:
    """Coefficient-by-coefficient comparison of the two conic modes.

    Each row holds ``expansion``, ``paper``, the observed difference
    ``paper - expansion`` and the ``predicted`` difference derived from the
    Taylor terms, so the gap is explained rather than just measured.  For d
    the prediction splits into a linear-term part W α̂ i s^(α̂-1) and a
    quadratic-term part 2 W α̂ (α̂-1) i s^(α̂-1), s = i² + j².
    """
    i, j = expansion_point if expansion_point is not None else (d_v, 0.0)
    exp = _expansion_coefficients(w, alpha_hat, d_v, i, j)
    pap = _paper_coefficients(w, alpha_hat, d_v, i, j)
    f0, fx, fy, fxx, fxy, fyy = _taylor_terms(alpha_hat, i, j)
    predicted = {
        "a": 0.0,
        "b": -w * fxy / 4,
        "c": 0.0,
        "d": w * (fxx * i + fxy * j) / 2,
        "f": w * (fyy * j + fxy * i) / 2,
        "g": w * (fx * i + fy * j - fxx * i * i / 2 - fxy * i * j - fyy * j * j / 2),
    }
    s = i * i + j * j
    linear_part = w * alpha_hat * i * s ** (alpha_hat - 1)
    quad_part = 2 * w * alpha_hat * (alpha_hat - 1) * i * s ** (alpha_hat - 1)
    rows = []
    for name, e, p in zip("abcdfg", exp, pap):
        row = {"coefficient": name, "expansion": e, "paper": p,
               "difference": p - e, "predicted": predicted[name]}
        if name == "d":
            row["predicted_linear_term"] = linear_part
            row["predicted_quadratic_terms"] = quad_part
        rows.append(row)
    return rows


# -------------------------------------------------------------------- quality

def approximation_quality(exact: BoundaryPolyline, approx: SensingShape, w: float,
                          alpha_hat: float, d_v: float, grid: int = 512,
                          n_boundary: int = 720) -> tuple[float, float]:
    """IoU of the two interiors and the worst equal-power residual on ``approx``.

    IoU is measured on a ``grid`` x ``grid`` lattice of cell centres over the
    joint bounding box.  The residual is normalised by d_v².
    """
    boxes = np.array([bounding_box(exact), bounding_box(approx)])
    x0, y0 = boxes[:, 0].min(), boxes[:, 1].min()
    x1, y1 = boxes[:, 2].max(), boxes[:, 3].max()
    if not (x1 > x0 and y1 > y0):
        raise ValueError("empty shapes")
    xs = x0 + (np.arange(grid) + 0.5) * (x1 - x0) / grid
    ys = y0 + (np.arange(grid) + 0.5) * (y1 - y0) / grid
    in_exact = grid_contains(exact, xs, ys)
    in_approx = grid_contains(approx, xs, ys)
    union = np.count_nonzero(in_exact | in_approx)
    iou = np.count_nonzero(in_exact & in_approx) / union if union else 0.0
    pts = boundary_points(approx, n_boundary)
    res = np.abs(rsp_residual(w, alpha_hat, pts, (d_v, 0.0))) / d_v**2
    return float(iou), float(res.max())


@dataclass(frozen=True)
class CoverageResult:
    exact: BoundaryPolyline
    approx: SensingShape
    iou: float
    max_boundary_residual: float


def analyze_coverage(w: float, alpha_hat: float, d_v: float, method: str = "auto",
                     mode: str = "expansion", expansion_point: Optional[Point2] = None,
                     n_angles: int = 720, grid: int = 512) -> CoverageResult:
    """Exact contour, one approximation (``circle`` or ``conic``) and their agreement."""
    if method == "auto":
        method = "circle" if alpha_hat == 1 else "conic"
    exact = exact_boundary(w, alpha_hat, d_v, n_angles)
    if method == "circle":
        approx = circle_approximation(w, mmse_beta(alpha_hat, d_v), d_v)
    elif method == "conic":
        approx = conic_to_ellipse(taylor_conic(w, alpha_hat, d_v, expansion_point, mode))
    else:
        raise ValueError(f"unknown coverage method {method!r}")
    iou, res = approximation_quality(exact, approx, w, alpha_hat, d_v, grid)
    return CoverageResult(exact, approx, iou, res)
