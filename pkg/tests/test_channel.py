import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from isac_drr.channel import (ClutterModel, RcsSample, equal_rsp_residual, received_sensing_power,
                              rsp_residual, sample_rcs)
from isac_drr.params import RadioNodeParams, default_network
from isac_drr.shapes import Point2


def test_unit_constant():
    node = RadioNodeParams(1.0, 1.0, 2.000001)
    got = received_sensing_power(RadioNodeParams(1.0, 1.0, 3.0), 1.0, 2.0, 1.0, 1.0)
    assert got == pytest.approx(1 / (4 * math.pi) ** 3, rel=1e-15)
    assert got == pytest.approx(5.0393e-4, rel=1e-4)
    assert received_sensing_power(node, 1.0, 2.0, 1.0, 1.0) == pytest.approx(got)


def test_equal_rcs_gives_zero_and_negative_is_kept():
    node = RadioNodeParams(1.0, 1.0, 4.0)
    assert received_sensing_power(node, 10.0, 1.0, 1.0, 0.1) == 0.0
    assert received_sensing_power(node, 10.0, 0.5, 1.0, 0.1) < 0


@given(st.floats(2.1, 5.9), st.floats(1.0, 1e4))
def test_doubling_distance(alpha, d):
    node = RadioNodeParams(2.0, 3.0, alpha)
    a = received_sensing_power(node, d, 2.0, 0.5, 0.1)
    b = received_sensing_power(node, 2 * d, 2.0, 0.5, 0.1)
    assert b / a == pytest.approx(2 ** (-2 * alpha), rel=1e-12)


@given(st.floats(2.1, 5.9), st.floats(1.0, 1e3), st.floats(1.001, 10))
def test_rsp_strictly_decreasing(alpha, d, k):
    node = RadioNodeParams(1.0, 1.0, alpha)
    assert received_sensing_power(node, d * k, 2.0, 1.0, 0.1) < received_sensing_power(node, d, 2.0, 1.0, 0.1)


def test_zero_distance_rejected():
    with pytest.raises(ZeroDivisionError):
        received_sensing_power(RadioNodeParams(1.0, 1.0, 4.0), 0.0, 1.0, 0.0, 0.1)


def test_rcs_sampler_moments(rng):
    x = sample_rcs(1.0, rng, 1_000_000)
    assert (x >= 0).all()
    assert x.mean() == pytest.approx(1.0, abs=0.01)
    assert np.count_nonzero(x <= 1.0) / x.size == pytest.approx(1 - math.exp(-1), abs=0.005)
    assert x.var() == pytest.approx(1.0, rel=0.03)
    assert isinstance(sample_rcs(2.0, rng), RcsSample)
    with pytest.raises(ValueError):
        sample_rcs(0.0, rng)
    with pytest.raises(ValueError):
        RcsSample(-1.0)
    with pytest.raises(ValueError):
        ClutterModel(-0.1)


def test_residual_on_case1_circle():
    w, d = 0.25, 300.0
    th = np.linspace(0, 2 * np.pi, 50)
    pts = np.column_stack([400 + 200 * np.cos(th), 200 * np.sin(th)])
    assert np.abs(rsp_residual(w, 1.0, pts, (d, 0.0))).max() <= 1e-9 * d * d


def test_residual_at_drv_and_mirror():
    net = default_network()
    assert equal_rsp_residual(net, Point2(500, 0), Point2(500, 0)) == pytest.approx(net.w * 500.0**2)
    assert equal_rsp_residual(net, Point2(300, 70), Point2(500, 0)) == equal_rsp_residual(
        net, Point2(300, -70), Point2(500, 0))
    with pytest.raises(ValueError):
        equal_rsp_residual(net, Point2(0, 0), Point2(500, 0))


@given(st.floats(-2000, 2000), st.floats(-2000, 2000), st.floats(0.2, 5.0), st.floats(0.0, 0.19))
def test_residual_sign_matches_power_comparison(x, y, sigma_t, sigma_c):
    """The residual's sign says which echo is stronger, for any RCS and wavelength."""
    net = default_network(alpha_b=3.0, alpha_v=5.0)
    drv = (500.0, 0.0)
    d_b, d_v = math.hypot(x, y), math.hypot(x - drv[0], y - drv[1])
    assume(d_b > 1 and d_v > 1)
    s_b = received_sensing_power(net.bs, d_b, sigma_t, sigma_c, 0.3)
    s_v = received_sensing_power(net.drv, d_v, sigma_t, sigma_c, 0.3)
    res = equal_rsp_residual(net, Point2(x, y), Point2(*drv))
    assume(abs(math.log(s_v / s_b)) > 1e-9)
    assert (res > 0) == (s_v > s_b)
