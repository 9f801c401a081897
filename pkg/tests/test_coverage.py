import math

import numpy as np
import pytest
import sympy as sp
from scipy import integrate, optimize
from hypothesis import given, strategies as st

from isac_drr.channel import rsp_residual
from isac_drr.coverage import (ConicCoefficients, ContourNotFoundError, DegenerateConicError, NotAnEllipseError,
                               analyze_coverage, approximation_quality, circle_approximation,
                               conic_mode_divergence, conic_to_ellipse, exact_boundary,
                               least_squares_beta, numeric_beta, taylor_conic)
from isac_drr.params import default_network, mmse_beta
from isac_drr.shapes import BoundaryPolyline, Circle, Ellipse, boundary_points, shape_area

W5 = default_network(alpha_b=3.0, alpha_v=5.0).w


@pytest.mark.parametrize("w", [0.1, 0.25, 0.5])
@pytest.mark.parametrize("d", [100.0, 500.0, 1000.0])
def test_exact_boundary_on_unit_alpha_circle(w, d):
    poly = exact_boundary(w, 1.0, d)
    center, radius = d / (1 - w), math.sqrt(w) * d / (1 - w)
    dev = np.abs(np.hypot(poly.points[:, 0] - center, poly.points[:, 1]) - radius)
    assert dev.max() <= 1e-6


def test_case1_circle_values():
    c = circle_approximation(0.25, 1.0, 300.0)
    assert c.center == (pytest.approx(400.0), 0.0)
    assert c.radius == pytest.approx(200.0)
    z = circle_approximation(0.25, 1.0, 0.0)
    assert z.center == (0.0, 0.0) and z.radius == 0.0
    w = default_network().w
    c = circle_approximation(w, 1.0, 500.0)
    assert c.center.x == pytest.approx(582.2441759, abs=1e-6)
    assert c.radius == pytest.approx(218.8291397, abs=1e-6)
    with pytest.raises(DegenerateConicError):
        circle_approximation(0.5, 2.0, 10.0)


@given(st.floats(0.05, 0.7), st.floats(0.3, 1.0), st.floats(10, 5000))
def test_exact_boundary_symmetry_and_residual(w, alpha_hat, d):
    poly = exact_boundary(w, alpha_hat, d, 180)
    pts = poly.points
    k = np.arange(1, 180)
    assert np.allclose(pts[k, 0], pts[180 - k, 0], rtol=0, atol=1e-9 * d)
    assert np.allclose(pts[k, 1], -pts[180 - k, 1], rtol=0, atol=1e-9 * d)
    res = rsp_residual(w, alpha_hat, pts, (d, 0.0))
    # first-root bisection to 1e-12 d: residual is tiny on the scale of d²
    assert np.abs(res).max() <= 1e-8 * d * d


def test_contour_beyond_bracket_cap_is_reported():
    # far edge at d(sqrt(W) + W)/(1 - W) from the DRV exceeds the 10 d cap
    with pytest.raises(ContourNotFoundError):
        exact_boundary(0.875, 1.0, 10.0)


def test_fig2_setting_contour():
    poly = exact_boundary(W5, 0.6, 500.0)
    assert isinstance(poly, BoundaryPolyline)
    assert shape_area(poly) == pytest.approx(1138.57, abs=0.01)


def test_beta_fits():
    assert numeric_beta(1.0, 500.0) == pytest.approx(1.0, abs=1e-6)
    # the absolute-error minimiser balances the two sides: r*³ = d³/2
    closed = (500.0 * 2 ** (-1 / 3)) ** (2 * 0.75 - 2)
    got = numeric_beta(0.75, 500.0)
    assert got == pytest.approx(closed, rel=2e-5)
    assert numeric_beta(0.75, 500.0, n_quad=20_000) == pytest.approx(got, rel=1e-5)
    assert least_squares_beta(1.0, 123.0) == pytest.approx(1.0)
    assert mmse_beta(0.75, 500.0) == pytest.approx(0.0447213595, abs=1e-10)


@given(st.floats(0.3, 0.99), st.floats(10, 2000))
def test_least_squares_beta_minimises_squared_error(alpha_hat, d):
    def err(b):
        return integrate.quad(lambda r: (r ** (2 * alpha_hat) - b * r * r) ** 2, 0, d)[0]
    b0 = d ** (2 * alpha_hat - 2)
    best = optimize.minimize_scalar(err, bracket=(0.1 * b0, b0), tol=1e-10).x
    assert least_squares_beta(alpha_hat, d) == pytest.approx(best, rel=1e-5)


def sympy_expansion(w, ah, dv, i, j):
    """Collect W*T2(x, y) - ((x - dv)² + y²) symbolically."""
    x, y = sp.symbols("x y", real=True)
    F = (x**2 + y**2) ** sp.nsimplify(ah)
    terms = {s: F.diff(*s) if s else F for s in [(), (x,), (y,), (x, x), (x, y), (y, y)]}
    ev = {k: sp.N(v.subs({x: i, y: j}), 30) for k, v in terms.items()}
    T2 = (ev[()] + ev[(x,)] * (x - i) + ev[(y,)] * (y - j)
          + ev[(x, x)] * (x - i) ** 2 / 2 + ev[(x, y)] * (x - i) * (y - j)
          + ev[(y, y)] * (y - j) ** 2 / 2)
    poly = sp.Poly(sp.expand(w * T2 - ((x - dv) ** 2 + y**2)), x, y)
    co = lambda m: float(poly.coeff_monomial(m))
    return co(x**2), co(x * y) / 2, co(y**2), co(x) / 2, co(y) / 2, co(1)


@pytest.mark.parametrize("ah,ep", [(0.6, None), (0.75, (480.0, 30.0)), (0.9, (520.0, -15.0)),
                                   (1.0, (300.0, 200.0))])
def test_expansion_coefficients_match_sympy(ah, ep):
    w = 0.2
    i, j = ep if ep else (500.0, 0.0)
    got = taylor_conic(w, ah, 500.0, ep, "expansion").coefficients
    want = sympy_expansion(w, ah, 500.0, i, j)
    for g_, w_ in zip(got, want):
        assert g_ == pytest.approx(w_, rel=1e-10, abs=1e-9)


def test_axis_expansion_point_gives_axis_aligned_conic():
    for mode in ("expansion", "paper"):
        c = taylor_conic(W5, 0.6, 500.0, None, mode)
        assert c.b == 0 and c.f == 0
        assert conic_to_ellipse(c).rotation in (0.0, math.pi / 2)


def test_near_unit_alpha_reproduces_circle():
    w = default_network().w
    ell = conic_to_ellipse(taylor_conic(w, 1 - 1e-9, 500.0))
    ref = circle_approximation(w, 1.0, 500.0)
    assert ell.center.x == pytest.approx(ref.center.x, rel=1e-6)
    assert ell.s1 == pytest.approx(ref.radius, rel=1e-6)
    assert ell.s2 == pytest.approx(ref.radius, rel=1e-6)


def test_conic_to_ellipse_circle_example():
    c = ConicCoefficients.from_quadratic(-1.0, 0.0, -1.0, 2.0, 0.0, -3.0)
    e = conic_to_ellipse(c)
    assert e.center == (pytest.approx(2.0), pytest.approx(0.0))
    assert e.s1 == pytest.approx(1.0) and e.s2 == pytest.approx(1.0)
    assert e.rotation == 0.0
    with pytest.raises(NotAnEllipseError):
        conic_to_ellipse(ConicCoefficients.from_quadratic(1.0, 0.0, -1.0, 0.0, 0.0, -1.0))
    with pytest.raises(DegenerateConicError):
        conic_to_ellipse(ConicCoefficients.from_quadratic(1.0, 0.0, 1.0, 0.0, 0.0, 1.0))


conics = st.builds(
    lambda cx, cy, s1, k, rot, scale: (cx, cy, s1, s1 * k, rot, scale),
    st.floats(-100, 100), st.floats(-100, 100), st.floats(0.5, 50), st.floats(1.0, 4.0),
    st.floats(0.0, 3.1), st.floats(-5, 5).filter(lambda v: abs(v) > 0.1))


@given(conics)
def test_ellipse_round_trip_and_self_consistency(p):
    cx, cy, s1, s2, rot, scale = p
    c, s = math.cos(rot), math.sin(rot)
    # (u/s1)² + (v/s2)² = 1 with u along rot, expanded to general form
    A = c * c / s1**2 + s * s / s2**2
    B = c * s * (1 / s1**2 - 1 / s2**2)
    C = s * s / s1**2 + c * c / s2**2
    D = -(A * cx + B * cy)
    F = -(B * cx + C * cy)
    G = A * cx * cx + 2 * B * cx * cy + C * cy * cy - 1
    conic = ConicCoefficients.from_quadratic(*(scale * v for v in (A, B, C, D, F, G)))
    e = conic_to_ellipse(conic)
    assert e.center.x == pytest.approx(cx, abs=1e-7) and e.center.y == pytest.approx(cy, abs=1e-7)
    assert e.s1 == pytest.approx(s1, rel=1e-7) and e.s2 == pytest.approx(s2, rel=1e-7)
    pts = boundary_points(e, 64)
    assert np.abs(conic.evaluate(pts)).max() <= 1e-9 * max(abs(conic.g), abs(scale))
    n = conic.normalized()
    assert n.lam_min + n.lam_max == pytest.approx(n.a + n.c, rel=1e-12)
    assert n.lam_min * n.lam_max == pytest.approx(n.a * n.c - n.b**2, rel=1e-9)


def test_iou_examples():
    c = Circle((0, 0), 10.0)
    poly = BoundaryPolyline(boundary_points(c, 720))
    assert approximation_quality(poly, c, 0.25, 1.0, 300.0)[0] >= 0.999
    far = Circle((100, 0), 1.0)
    assert approximation_quality(poly, far, 0.25, 1.0, 300.0)[0] == 0.0


def test_iou_grid_convergence():
    res = analyze_coverage(W5, 0.6, 500.0, "conic", grid=512)
    fine = analyze_coverage(W5, 0.6, 500.0, "conic", grid=1024)
    assert abs(res.iou - fine.iou) < 0.002
    assert res.iou > 0.999


def test_case1_analysis_is_circle():
    res = analyze_coverage(0.25, 1.0, 300.0)
    assert isinstance(res.approx, Circle)
    assert res.iou >= 0.999 and res.max_boundary_residual < 1e-12


def test_mode_areas_against_exact():
    """Expansion mode lands closer to the exact area than the published coefficients."""
    exact = shape_area(exact_boundary(W5, 0.6, 500.0))
    exp_area = shape_area(conic_to_ellipse(taylor_conic(W5, 0.6, 500.0, None, "expansion")))
    pap_area = shape_area(conic_to_ellipse(taylor_conic(W5, 0.6, 500.0, None, "paper")))
    assert abs(exp_area - exact) <= abs(pap_area - exact)


@given(st.floats(0.05, 0.6), st.floats(0.3, 0.999), st.floats(50, 2000),
       st.floats(-0.2, 0.2), st.floats(-0.2, 0.2))
def test_divergence_predictions(w, ah, d, di, dj):
    ep = (d * (1 + di), d * dj)
    for row in conic_mode_divergence(w, ah, d, ep):
        scale = max(abs(row["expansion"]), abs(row["paper"]), 1.0)
        assert row["difference"] == pytest.approx(row["predicted"], abs=1e-9 * scale)
    drow = next(r for r in conic_mode_divergence(w, ah, d) if r["coefficient"] == "d")
    i = d
    assert drow["predicted_linear_term"] + drow["predicted_quadratic_terms"] == pytest.approx(
        w * ah * i * (i * i) ** (ah - 1) * (2 * ah - 1), rel=1e-12)
    assert drow["difference"] == pytest.approx(
        drow["predicted_linear_term"] + drow["predicted_quadratic_terms"], rel=1e-9, abs=1e-12)


def test_bad_inputs():
    with pytest.raises(ValueError):
        exact_boundary(1.2, 1.0, 10.0)
    with pytest.raises(ValueError):
        taylor_conic(0.2, 0.6, 500.0, (0.0, 0.0))
    with pytest.raises(ValueError):
        taylor_conic(0.2, 0.6, 500.0, None, "other")
    with pytest.raises(ValueError):
        analyze_coverage(0.2, 0.6, 500.0, "square")
    assert isinstance(analyze_coverage(W5, 0.6, 500.0).approx, Ellipse)
