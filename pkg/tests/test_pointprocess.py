import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from isac_drr.drr import ranging_event_probability
from isac_drr.mobility import MobilityParams
from isac_drr.pointprocess import (PointPattern, Window, default_window, expected_rc,
                                   mean_nearest_distance, nearest_distance, nearest_distance_cdf,
                                   nearest_distances, rc_pdf, rc_scale, sample_nearest_distances,
                                   sample_ppp)
from isac_drr.shapes import Point2


def test_zero_intensity_is_empty(rng):
    assert len(sample_ppp(0.0, Window.square(10.0), rng)) == 0
    with pytest.raises(ValueError):
        sample_ppp(-1.0, Window.square(10.0), rng)


def test_poisson_count_moments(rng):
    win = Window.square(10.0)
    counts = np.array([len(sample_ppp(1.0, win, rng)) for _ in range(10_000)])
    assert counts.mean() == pytest.approx(100.0, abs=1.0)
    assert counts.var() == pytest.approx(100.0, rel=0.05)


def test_points_inside_window(rng):
    win = Window(30.0, 20.0)
    p = sample_ppp(0.5, win, rng).points
    assert (p >= 0).all() and (p[:, 0] < 30).all() and (p[:, 1] < 20).all()


def test_nearest_distance_examples():
    win = Window.square(100.0, wrap=False)
    pat = PointPattern(np.array([[3.0, 4.0]]), 1.0, win)
    assert nearest_distance(Point2(0, 0), pat) == pytest.approx(5.0)
    assert nearest_distance(Point2(3, 4), pat) == 0.0
    with pytest.raises(ValueError):
        nearest_distance(Point2(0, 0), PointPattern(np.zeros((0, 2)), 1.0, win))


def test_torus_uses_minimum_image():
    win = Window.square(100.0)
    pat = PointPattern(np.array([[99.0, 50.0]]), 1.0, win)
    assert nearest_distance(Point2(1.0, 50.0), pat) == pytest.approx(2.0)
    assert nearest_distances([[101.0, 50.0]], pat)[0] == pytest.approx(2.0)


def test_mean_nearest_distance_values():
    assert mean_nearest_distance(1.0) == 0.5
    assert mean_nearest_distance(0.25) == 1.0
    assert mean_nearest_distance(0.5e-6) == pytest.approx(707.1067812, abs=1e-6)


def test_empirical_nearest_distance_law(rng):
    lam = 1e-6
    d = sample_nearest_distances(lam, default_window(lam), 100_000, rng)
    assert d.mean() == pytest.approx(500.0, rel=0.01)
    assert stats.kstest(d, lambda r: nearest_distance_cdf(r, lam)).statistic <= 0.01


def test_expected_rc_values(rng):
    assert expected_rc(0.25, 0.25) == pytest.approx(2 / 3)
    assert expected_rc(0.141253754462275, 0.5e-6) == pytest.approx(309.4711372, abs=1e-4)
    d = sample_nearest_distances(0.5e-6, default_window(0.5e-6), 100_000, rng)
    w = 0.25
    assert (math.sqrt(w) * d / (1 - w)).mean() == pytest.approx(expected_rc(w, 0.5e-6), rel=0.01)


@given(st.floats(0.01, 0.9), st.floats(1e-8, 1e-4))
def test_rc_pdf_normalised_with_expected_mean(w, lam):
    scale = rc_scale(w) / math.sqrt(lam)
    mass = integrate.quad(lambda r: rc_pdf(r, w, lam), 0, 20 * scale)[0]
    mean = integrate.quad(lambda r: r * rc_pdf(r, w, lam), 0, 20 * scale)[0]
    assert mass == pytest.approx(1.0, rel=1e-7)
    assert mean == pytest.approx(expected_rc(w, lam), rel=1e-7)


@given(st.floats(0.01, 0.9), st.floats(1e-8, 1e-4), st.floats(1e-8, 1e-4))
def test_expected_rc_reproduces_event_probability(w, lb, lv):
    area = 1e3 / min(lb, lv)
    mean_len = MobilityParams(lv, 1.0, 0.0).mean_length
    assert 2 * mean_len * expected_rc(w, lb) / area == pytest.approx(
        ranging_event_probability(w, lb, lv, area), rel=1e-12)
