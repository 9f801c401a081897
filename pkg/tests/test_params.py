import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from isac_drr.params import (ModelValidityError, NetworkParams, RadioNodeParams, db_to_linear,
                             dbm_to_watts, default_network, derive_params, equal_rsp_ratio,
                             linear_to_db, mmse_beta)


def test_db_identity_and_definition():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(10.0) == pytest.approx(10.0, rel=1e-15)


def test_46_dbm_in_watts():
    assert dbm_to_watts(46.0) == pytest.approx(float(mpmath.mpf(10) ** 4.6 / 1000), rel=1e-14)
    assert dbm_to_watts(46.0) == pytest.approx(39.8107, abs=1e-4)


@given(st.floats(-100, 100))
def test_db_round_trip(x):
    assert linear_to_db(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


def test_db_rejects_bad_values():
    with pytest.raises(ValueError):
        db_to_linear(math.inf)
    with pytest.raises(ValueError):
        linear_to_db(0.0)


def test_equal_power_gain_is_invalid():
    node = RadioNodeParams(1.0, 2.0, 4.0)
    with pytest.raises(ModelValidityError):
        equal_rsp_ratio(node, node)


def test_ratio_sixteen_gives_half():
    bs = RadioNodeParams(16.0, 1.0, 4.0)
    drv = RadioNodeParams(1.0, 1.0, 4.0)
    assert equal_rsp_ratio(bs, drv) == pytest.approx(0.5, rel=1e-15)


def w_oracle(pb_dbm, gb_dbi, pv_dbm, gv_dbi, alpha_v):
    mpmath.mp.dps = 40
    ratio = mpmath.mpf(10) ** ((pv_dbm + 2 * gv_dbi - pb_dbm - 2 * gb_dbi) / mpmath.mpf(10))
    return float(ratio ** (1 / mpmath.mpf(alpha_v)))


def test_default_w_matches_high_precision_value():
    net = default_network()
    assert net.w == pytest.approx(w_oracle(46, 14, 30, 5, 4), rel=1e-13)
    assert net.w == pytest.approx(0.14125, abs=1e-4)
    assert default_network(alpha_v=5.0, alpha_b=3.0).w == pytest.approx(w_oracle(46, 14, 30, 5, 5), rel=1e-13)


@given(st.floats(1e-3, 1e3))
def test_common_power_scaling_leaves_w_unchanged(k):
    net = default_network()
    scaled = derive_params(default_network(
        bs=RadioNodeParams(net.bs.tx_power * k, net.bs.antenna_gain, 4.0),
        drv=RadioNodeParams(net.drv.tx_power * k, net.drv.antenna_gain, 4.0)), 500.0)
    assert scaled.w == pytest.approx(net.w, rel=1e-12)


@given(st.floats(1e-6, 1e6))
def test_beta_is_one_for_unit_alpha_hat(d):
    assert mmse_beta(1.0, d) == 1.0


@given(st.floats(0.1, 1.0))
def test_beta_at_unit_distance(alpha_hat):
    assert mmse_beta(alpha_hat, 1.0) == 1.0


def test_beta_value():
    assert mmse_beta(0.75, 500.0) == pytest.approx(float(mpmath.mpf(500) ** -0.5), rel=1e-14)
    assert mmse_beta(1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        mmse_beta(0.5, 0.0)


def test_network_validation():
    with pytest.raises(ValueError):
        default_network(speed=0.0)
    with pytest.raises(ValueError):
        default_network(pri=-1.0)
    with pytest.raises(ModelValidityError):
        default_network(alpha_b=5.0, alpha_v=4.0)
    with pytest.raises(ValueError):
        RadioNodeParams(1.0, 1.0, 6.5)
    assert default_network(pri=0.0).pri == 0.0


def test_derive_params():
    d = derive_params(default_network(alpha_b=3.0, alpha_v=5.0), 500.0)
    assert d.alpha_hat == pytest.approx(0.6)
    assert d.beta == pytest.approx(500.0 ** -0.8)
    assert isinstance(default_network(), NetworkParams)
