"""Monostatic radar-equation echo power and Swerling-1 RCS sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import NetworkParams, RadioNodeParams
from .shapes import Point2


@dataclass(frozen=True)
class RcsSample:
    sigma_t: float

    def __post_init__(self):
        if not self.sigma_t >= 0:
            raise ValueError(f"RCS must be >= 0, got {self.sigma_t!r}")


@dataclass(frozen=True)
class ClutterModel:
    """Point clutter centred on the target with a fixed RCS."""

    clutter_rcs: float
    placement: str = "point clutter centered at target"

    def __post_init__(self):
        if not self.clutter_rcs >= 0:
            raise ValueError(f"clutter RCS must be >= 0, got {self.clutter_rcs!r}")


def received_sensing_power(node: RadioNodeParams, d, sigma_t: float, sigma_c: float,
                           wavelength: float):
    """Echo power P G² λ² (σ_t - σ_c) / ((4π)³ d^(2α)) in watts.

    The result is negative when clutter outweighs the target; it is returned
    as is so that a misconfigured clutter level stays visible.  ``d`` may be
    an array.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ZeroDivisionError("received sensing power is singular at d = 0")
    if wavelength <= 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength!r}")
    if sigma_t < 0 or sigma_c < 0:
        raise ValueError("RCS values must be >= 0")
    num = node.eirp_gain * wavelength**2 * (sigma_t - sigma_c)
    out = num / ((4 * math.pi) ** 3 * d ** (2 * node.path_loss_exponent))
    return float(out) if out.ndim == 0 else out


def sample_rcs(mean_rcs: float, rng: np.random.Generator, size=None):
    """Swerling-1 RCS draw(s): exponential with mean ``mean_rcs``.

    With ``size=None`` a single :class:`RcsSample` is returned, otherwise a
    float array of draws.
    """
    if not mean_rcs > 0:
        raise ValueError(f"mean RCS must be > 0, got {mean_rcs!r}")
    if size is None:
        return RcsSample(float(rng.exponential(mean_rcs)))
    return rng.exponential(mean_rcs, size=size)


def rsp_residual(w: float, alpha_hat: float, target, drv_pos) -> np.ndarray:
    """W d_b^(2α̂) - d_v'² for BS at the origin; positive inside the DRV region.

    ``target`` may be a single point or an ``(n, 2)`` array.
    """
    t = np.asarray(target, dtype=float)
    db2 = t[..., 0] ** 2 + t[..., 1] ** 2
    dv2 = (t[..., 0] - drv_pos[0]) ** 2 + (t[..., 1] - drv_pos[1]) ** 2
    return w * db2**alpha_hat - dv2


def equal_rsp_residual(net: NetworkParams, target: Point2, drv_pos: Point2) -> float:
    """Signed distance-form residual of the equal-echo-power condition.

    Zero exactly on the DRV sensing boundary.  Wavelength and both RCS values
    cancel from the balance and are not used.
    """
    # target == drv_pos is allowed: the residual is W d_b^(2α̂) there
    if target[0] == 0 and target[1] == 0:
        raise ValueError("target coincides with the BS")
    return float(rsp_residual(net.w, net.alpha_hat, target, drv_pos))
