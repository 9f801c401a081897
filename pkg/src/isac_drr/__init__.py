"""Sensing coverage and dynamic ranging rate of DRV-assisted ISAC networks."""

__version__ = "0.1.0"

from .params import (ModelValidityError, NetworkParams, RadioNodeParams,  # noqa: E402
                     default_network, derive_params, equal_rsp_ratio, mmse_beta)
from .shapes import BoundaryPolyline, Circle, Ellipse, Point2, shape_area  # noqa: E402
from .coverage import (analyze_coverage, circle_approximation, conic_to_ellipse,  # noqa: E402
                       exact_boundary, taylor_conic)
from .drr import drr_closed_form, dynamic_ranging_rate  # noqa: E402
from .montecarlo import SimConfig, estimate  # noqa: E402

__all__ = [
    "ModelValidityError", "NetworkParams", "RadioNodeParams", "default_network",
    "derive_params", "equal_rsp_ratio", "mmse_beta", "BoundaryPolyline", "Circle",
    "Ellipse", "Point2", "shape_area", "analyze_coverage", "circle_approximation",
    "conic_to_ellipse", "exact_boundary", "taylor_conic", "drr_closed_form",
    "dynamic_ranging_rate", "SimConfig", "estimate",
]
