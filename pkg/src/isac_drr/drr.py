"""Closed-form dynamic ranging rate (DRR).

The DRR of a static target is the rate of qualifying DRV sensing events:

    ξ = ξ_r · P(κ >= τ)

where ξ_r counts how often DRV sensing disks sweep over the target per
second and P(κ >= τ) is the chance that the target then stays inside for at
least one pulse repetition interval τ.  All rates use the β = 1 circle
radius R_c = √W d / (1 - W).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ModelValidityError, NetworkParams


class DilutionError(ValueError):
    """Per-period hit probability exceeds one: the area of interest is too small."""


@dataclass(frozen=True)
class DrrAnalytic:
    p_r: float
    xi_r: float
    p_dwell: float
    xi: float


def _check_w(w: float):
    if not 0 < w < 1:
        raise ModelValidityError(f"need 0 < W < 1, got {w!r}")


def ranging_event_probability(w: float, lambda_b: float, lambda_v: float, area: float) -> float:
    """Probability that one DRV transition sweeps its disk over the target.

    √W/(1-W) / (2 |A| √(λ_b λ_v)), i.e. 2 E[L] E[R_c] / |A|.
    """
    _check_w(w)
    if not (lambda_b > 0 and lambda_v > 0 and area > 0):
        raise ValueError("intensities and area must be > 0")
    p = math.sqrt(w) / (1 - w) / (2 * area * math.sqrt(lambda_b * lambda_v))
    if p > 1:
        raise DilutionError(f"P_r = {p:.4g} > 1: area {area:.4g} m^2 too small for the dilute regime")
    return p


def ranging_repetition_rate(w: float, lambda_b: float, lambda_v: float, u: float,
                            pause_mean: float) -> float:
    """ξ_r = √W/(1-W) · λ_v u / (√λ_b + 2√(λ_b λ_v) u E[T_s])  [events/s]."""
    _check_w(w)
    if not (lambda_b > 0 and lambda_v > 0):
        raise ValueError("intensities must be > 0")
    if u < 0 or pause_mean < 0:
        raise ValueError("speed and pause_mean must be >= 0")
    k = math.sqrt(w) / (1 - w)
    return k * lambda_v * u / (math.sqrt(lambda_b) + 2 * math.sqrt(lambda_b * lambda_v) * u * pause_mean)


def dwell_threshold_distance(w: float, u: float, tau: float) -> float:
    """BS-DRV distance above which the expected chord outlasts one PRI.

    (π/2) R_c / u >= τ  <=>  d >= 2uτ(1-W)/(π√W).
    """
    _check_w(w)
    return 2 * u * tau * (1 - w) / (math.pi * math.sqrt(w))


def dwell_exceed_probability(w: float, lambda_b: float, u: float, tau: float) -> float:
    """P(κ >= τ) = exp(-4 λ_b (1-W)² u² τ² / (π W))."""
    _check_w(w)
    if not lambda_b > 0 or u < 0 or tau < 0:
        raise ValueError("need lambda_b > 0, u >= 0, tau >= 0")
    return math.exp(-4 * lambda_b * (1 - w) ** 2 * u * u * tau * tau / (math.pi * w))


def expected_chord(radius: float) -> float:
    """Mean chord of an isotropic random line through a disk: (π/2) R."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return 0.5 * math.pi * radius


def drr_closed_form(w: float, lambda_b: float, lambda_v: float, u: float,
                    pause_mean: float, tau: float) -> float:
    """The single-expression DRR, written out independently of the factor functions."""
    return (math.sqrt(w) / (1 - w)
            * lambda_v * u / (math.sqrt(lambda_b) + 2 * math.sqrt(lambda_b * lambda_v) * u * pause_mean)
            * math.exp(-4 * lambda_b * (1 - w) ** 2 / (math.pi * w) * u * u * tau * tau))


def dynamic_ranging_rate(net: NetworkParams, area: float | None = None) -> DrrAnalytic:
    """All DRR components at ``net``.

    ``area`` only affects ``p_r``; it defaults to the square torus of side
    10/√min(λ_b, λ_v) used by the Monte-Carlo engine.
    """
    w = net.w
    lb, lv = net.bs_intensity, net.drv_intensity
    if area is None:
        area = 100.0 / min(lb, lv)
    p_r = ranging_event_probability(w, lb, lv, area)
    xi_r = ranging_repetition_rate(w, lb, lv, net.speed, net.pause_mean)
    p_dwell = dwell_exceed_probability(w, lb, net.speed, net.pri)
    return DrrAnalytic(p_r=p_r, xi_r=xi_r, p_dwell=p_dwell, xi=xi_r * p_dwell)

