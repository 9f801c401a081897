"""Network parameters, unit conversion and derived model quantities.

Everything inside the package is strict SI: metres, seconds, watts and
points per square metre.  Decibel and per-km² inputs are converted once, at
the configuration boundary (see :mod:`isac_drr.config`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ModelValidityError(ValueError):
    """Parameters violate an assumption the closed forms rely on."""


def db_to_linear(value_db: float) -> float:
    """Convert a decibel ratio to a linear ratio."""
    if not math.isfinite(value_db):
        raise ValueError(f"non-finite dB value: {value_db!r}")
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0:
        raise ValueError(f"linear ratio must be positive, got {value!r}")
    return 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    return db_to_linear(value_dbm) * 1e-3


@dataclass(frozen=True)
class RadioNodeParams:
    """Transmit power [W], antenna gain (linear, G_t = G_r) and path-loss exponent."""

    tx_power: float
    antenna_gain: float
    path_loss_exponent: float

    def __post_init__(self):
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be > 0 W, got {self.tx_power!r}")
        if not self.antenna_gain > 0:
            raise ValueError(f"antenna_gain must be > 0, got {self.antenna_gain!r}")
        if not 2.0 < self.path_loss_exponent < 6.0:
            raise ValueError(
                f"path_loss_exponent must lie in (2, 6), got {self.path_loss_exponent!r}"
            )

    @property
    def eirp_gain(self) -> float:
        """P G², the monostatic power-gain product."""
        return self.tx_power * self.antenna_gain**2


def equal_rsp_ratio(bs: RadioNodeParams, drv: RadioNodeParams) -> float:
    """W = (P_v G_v² / (P_b G_b²))^(1/α_v).

    Raises ModelValidityError when W >= 1, i.e. when the DRV is at least as
    strong as the BS and its sensing region is no longer bounded.
    """
    w = (drv.eirp_gain / bs.eirp_gain) ** (1.0 / drv.path_loss_exponent)
    if not w < 1.0:
        raise ModelValidityError(
            f"DRV dominates BS: W = {w:.6g} >= 1 (need P_v G_v^2 < P_b G_b^2)"
        )
    return w


@dataclass(frozen=True)
class NetworkParams:
    """All radio, deployment, mobility and radar parameters in SI units."""

    bs: RadioNodeParams
    drv: RadioNodeParams
    wavelength: float
    mean_rcs: float
    clutter_rcs: float
    bs_intensity: float
    drv_intensity: float
    speed: float
    pause_mean: float
    pri: float

    def __post_init__(self):
        positive = ("wavelength", "mean_rcs", "bs_intensity", "drv_intensity", "speed")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("pause_mean", "clutter_rcs", "pri"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        equal_rsp_ratio(self.bs, self.drv)
        alpha_hat = self.bs.path_loss_exponent / self.drv.path_loss_exponent
        if not 0.0 < alpha_hat <= 1.0:
            raise ModelValidityError(
                f"alpha_b/alpha_v = {alpha_hat:.6g} outside (0, 1]; need alpha_b <= alpha_v"
            )

    @property
    def w(self) -> float:
        return equal_rsp_ratio(self.bs, self.drv)

    @property
    def alpha_hat(self) -> float:
        return self.bs.path_loss_exponent / self.drv.path_loss_exponent


@dataclass(frozen=True)
class DerivedParams:
    w: float
    alpha_hat: float
    beta: float


def mmse_beta(alpha_hat: float, d_v: float) -> float:
    """Circle scaling β = d_v^(2(α̂-1)); exactly 1 when α̂ = 1 (also at d_v = 0)."""
    if d_v < 0:
        raise ValueError(f"d_v must be >= 0, got {d_v!r}")
    if alpha_hat == 1.0:
        return 1.0
    if d_v == 0:
        raise ValueError("beta diverges at d_v = 0 for alpha_hat < 1")
    return d_v ** (2.0 * (alpha_hat - 1.0))


def derive_params(net: NetworkParams, d_v: float) -> DerivedParams:
    """W, α̂ and β for a DRV at distance ``d_v`` from the BS."""
    w = equal_rsp_ratio(net.bs, net.drv)
    return DerivedParams(w=w, alpha_hat=net.alpha_hat, beta=mmse_beta(net.alpha_hat, d_v))


def default_network(**overrides) -> NetworkParams:
    """Network at the reference operating point.

    Powers and gains: BS 46 dBm / 14 dBi, DRV 30 dBm / 5 dBi.  Intensities
    λ_b = 0.5 and λ_v = 1 per km², u = 1.4 m/s, mean pause 0.5 s.  Both
    path-loss exponents default to 4.  Wavelength (0.1 m), RCS values and
    the PRI (0.05 s) are tool defaults; the first three cancel out of every
    coverage and rate formula.
    """
    alpha_b = overrides.pop("alpha_b", 4.0)
    alpha_v = overrides.pop("alpha_v", 4.0)
    fields = dict(
        bs=RadioNodeParams(dbm_to_watts(46.0), db_to_linear(14.0), alpha_b),
        drv=RadioNodeParams(dbm_to_watts(30.0), db_to_linear(5.0), alpha_v),
        wavelength=0.1,
        mean_rcs=1.0,
        clutter_rcs=0.1,
        bs_intensity=0.5e-6,
        drv_intensity=1e-6,
        speed=1.4,
        pause_mean=0.5,
        pri=0.05,
    )
    fields.update(overrides)
    return NetworkParams(**fields)
