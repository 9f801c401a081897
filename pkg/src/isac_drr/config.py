"""Experiment configuration: a YAML document with explicit units on every quantity.

Physical values are strings such as ``"46 dBm"``, ``"1 per_km2"`` or
``"1.4 m_per_s"``; a bare number is rejected for anything that has a unit.
Path-loss exponents are dimensionless and counts are plain integers.  All
values are converted to SI once, here.
"""

from __future__ import annotations

import copy
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .params import NetworkParams, RadioNodeParams, db_to_linear
from .shapes import Point2


class ConfigError(ValueError):
    pass


_UNITS = {
    "power": {"W": 1.0, "mW": 1e-3, "kW": 1e3, "dBm": "dBm", "dBW": "dBW"},
    "gain": {"dBi": "dB", "dB": "dB", "lin": 1.0},
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3},
    "area": {"m2": 1.0, "km2": 1e6},
    "intensity": {"per_m2": 1.0, "per_km2": 1e-6},
    "speed": {"m_per_s": 1.0, "km_per_h": 1 / 3.6, "km_per_s": 1e3},
    "time": {"s": 1.0, "ms": 1e-3, "min": 60.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s+([A-Za-z_0-9]+)\s*$")

# network field -> quantity kind
_NETWORK_FIELDS = {
    "wavelength": "length",
    "mean_rcs": "area",
    "clutter_rcs": "area",
    "bs_intensity": "intensity",
    "drv_intensity": "intensity",
    "speed": "speed",
    "pause_mean": "time",
    "pri": "time",
}
SWEEPABLE = {"drv_intensity": "intensity", "pri": "time", "speed": "speed"}


def parse_quantity(text, kind: str, where: str = "") -> float:
    """``"46 dBm"`` -> 39.81 (W).  Raises ConfigError on a missing or wrong unit."""
    label = f"{where}: " if where else ""
    if isinstance(text, bool) or not isinstance(text, str):
        raise ConfigError(f"{label}{text!r} has no unit; write e.g. '<value> <unit>' "
                          f"with one of {sorted(_UNITS[kind])}")
    m = _QUANTITY.match(text)
    if not m:
        raise ConfigError(f"{label}cannot parse quantity {text!r}")
    value, unit = float(m.group(1)), m.group(2)
    table = _UNITS[kind]
    if unit not in table:
        raise ConfigError(f"{label}unit {unit!r} is not a {kind} unit ({sorted(table)})")
    factor = table[unit]
    if factor == "dBm":
        return db_to_linear(value) * 1e-3
    if factor in ("dBW", "dB"):
        return db_to_linear(value)
    return value * factor


def _plain_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a plain number, got {value!r}")
    return float(value)


def _count(value, where: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{where}: expected an integer >= {minimum}, got {value!r}")
    return value


DEFAULT_CONFIG = """\
# Reference operating point.  Powers, gains, intensities, speed and pause
# follow the published setup; wavelength, RCS values, PRI and every sweep
# range below are tool defaults.
network:
  bs:
    tx_power: 46 dBm
    antenna_gain: 14 dBi
    path_loss_exponent: 4
  drv:
    tx_power: 30 dBm
    antenna_gain: 5 dBi
    path_loss_exponent: 4
  wavelength: 0.1 m
  mean_rcs: 1 m2
  clutter_rcs: 0.1 m2
  bs_intensity: 0.5 per_km2
  drv_intensity: 1 per_km2
  speed: 1.4 m_per_s
  pause_mean: 0.5 s
  pri: 0.05 s

simulation:
  replications: 1000
  periods_per_drv: 100
  fidelity: assumption_matched
  workers: 1

seed: 20250101

coverage:
  drv_distance: 500 m
  n_angles: 720
  grid: 512
  cases:
    - name: case1
      alpha_b: 4
      alpha_v: 4
    - name: case2
      alpha_b: 3
      alpha_v: 5

sweeps:
  - name: drr_vs_drv_intensity
    parameter: drv_intensity
    min: 0.1 per_km2
    max: 10 per_km2
    steps: 7
    scale: log
    series:
      parameter: pri
      values: [0.01 s, 0.05 s, 0.1 s]
  - name: drr_vs_pri
    parameter: pri
    min: 0.01 s
    max: 0.2 s
    steps: 8
    scale: linear
    series:
      parameter: speed
      values: [0.7 m_per_s, 1.4 m_per_s, 2.8 m_per_s]

output: out
"""


@dataclass(frozen=True)
class CoverageCase:
    name: str
    alpha_b: float
    alpha_v: float


@dataclass(frozen=True)
class SweepAxis:
    name: str
    parameter: str
    values: tuple
    series_parameter: Optional[str] = None
    series_values: tuple = ()


@dataclass(frozen=True)
class ExperimentConfig:
    net: NetworkParams
    seed: int
    replications: int
    periods_per_drv: int
    fidelity: str
    workers: int
    window_side: Optional[float]
    drv_distance: float
    n_angles: int
    grid: int
    expansion_point: Optional[Point2]
    cases: tuple
    sweeps: tuple
    output: Path
    document: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def config_hash(self) -> str:
        """sha256 of the canonical JSON document, excluding output dir and workers."""
        # output location and worker count cannot change any result
        doc = copy.deepcopy(self.document)
        doc.pop("output", None)
        doc.get("simulation", {}).pop("workers", None)
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _radio(doc: dict, where: str) -> RadioNodeParams:
    try:
        return RadioNodeParams(
            tx_power=parse_quantity(doc["tx_power"], "power", f"{where}.tx_power"),
            antenna_gain=parse_quantity(doc["antenna_gain"], "gain", f"{where}.antenna_gain"),
            path_loss_exponent=_plain_number(doc["path_loss_exponent"], f"{where}.path_loss_exponent"),
        )
    except KeyError as exc:
        raise ConfigError(f"{where}: missing field {exc.args[0]!r}") from None


def _network(doc: dict) -> NetworkParams:
    if not isinstance(doc, dict):
        raise ConfigError("network: expected a mapping")
    unknown = set(doc) - set(_NETWORK_FIELDS) - {"bs", "drv"}
    if unknown:
        raise ConfigError(f"network: unknown field(s) {sorted(unknown)}")
    kwargs = {}
    for name, kind in _NETWORK_FIELDS.items():
        if name not in doc:
            raise ConfigError(f"network: missing field {name!r}")
        kwargs[name] = parse_quantity(doc[name], kind, f"network.{name}")
    return NetworkParams(bs=_radio(doc.get("bs", {}), "network.bs"),
                         drv=_radio(doc.get("drv", {}), "network.drv"), **kwargs)


def _axis_values(doc: dict, kind: str, where: str) -> tuple:
    lo = parse_quantity(doc.get("min"), kind, f"{where}.min")
    hi = parse_quantity(doc.get("max"), kind, f"{where}.max")
    steps = _count(doc.get("steps"), f"{where}.steps", minimum=2)
    scale = doc.get("scale", "linear")
    if scale == "linear":
        vals = np.linspace(lo, hi, steps)
    elif scale == "log":
        if lo <= 0:
            raise ConfigError(f"{where}: log sweep needs min > 0")
        vals = np.geomspace(lo, hi, steps)
    else:
        raise ConfigError(f"{where}.scale: expected 'linear' or 'log', got {scale!r}")
    return tuple(float(v) for v in vals)


def _sweep(doc: dict, index: int) -> SweepAxis:
    where = f"sweeps[{index}]"
    param = doc.get("parameter")
    if param not in SWEEPABLE:
        raise ConfigError(f"{where}.parameter: cannot sweep {param!r}; supported: {sorted(SWEEPABLE)}")
    values = _axis_values(doc, SWEEPABLE[param], where)
    series = doc.get("series")
    s_param, s_values = None, ()
    if series is not None:
        s_param = series.get("parameter")
        if s_param not in SWEEPABLE or s_param == param:
            raise ConfigError(f"{where}.series.parameter: invalid series parameter {s_param!r}")
        raw = series.get("values") or []
        s_values = tuple(parse_quantity(v, SWEEPABLE[s_param], f"{where}.series.values")
                         for v in raw)
        if not s_values:
            raise ConfigError(f"{where}.series.values: at least one value required")
    return SweepAxis(doc.get("name", f"sweep{index}_{param}"), param, values, s_param, s_values)


def build_config(doc: dict, seed: Optional[int] = None, fidelity: Optional[str] = None,
                 output: Optional[str] = None, workers: Optional[int] = None) -> ExperimentConfig:
    """Validate a parsed document; keyword arguments override the document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    doc = copy.deepcopy(doc)
    sim = doc.setdefault("simulation", {})
    if seed is not None:
        doc["seed"] = seed
    if fidelity is not None:
        sim["fidelity"] = fidelity
    if output is not None:
        doc["output"] = str(output)
    if workers is not None:
        sim["workers"] = workers

    net = _network(doc.get("network"))
    seed_v = doc.get("seed", 0)
    if isinstance(seed_v, bool) or not isinstance(seed_v, int) or not 0 <= seed_v < 2**64:
        raise ConfigError(f"seed: expected an unsigned 64-bit integer, got {seed_v!r}")
    fid = sim.get("fidelity", "assumption_matched")
    if fid not in ("assumption_matched", "full"):
        raise ConfigError(f"simulation.fidelity: unknown mode {fid!r}")
    side = sim.get("window_side")
    cov = doc.get("coverage", {}) or {}
    ep = cov.get("expansion_point")
    if ep is not None:
        if not isinstance(ep, list) or len(ep) != 2:
            raise ConfigError("coverage.expansion_point: expected [x, y]")
        ep = Point2(*(parse_quantity(v, "length", "coverage.expansion_point") for v in ep))
    cases = []
    for k, c in enumerate(cov.get("cases", [])):
        cases.append(CoverageCase(
            str(c.get("name", f"case{k + 1}")),
            _plain_number(c.get("alpha_b"), f"coverage.cases[{k}].alpha_b"),
            _plain_number(c.get("alpha_v"), f"coverage.cases[{k}].alpha_v"),
        ))
    return ExperimentConfig(
        net=net,
        seed=seed_v,
        replications=_count(sim.get("replications", 1000), "simulation.replications"),
        periods_per_drv=_count(sim.get("periods_per_drv", 100), "simulation.periods_per_drv"),
        fidelity=fid,
        workers=_count(sim.get("workers", 1), "simulation.workers"),
        window_side=None if side is None else parse_quantity(side, "length", "simulation.window_side"),
        drv_distance=parse_quantity(cov.get("drv_distance", "500 m"), "length", "coverage.drv_distance"),
        n_angles=_count(cov.get("n_angles", 720), "coverage.n_angles", minimum=16),
        grid=_count(cov.get("grid", 512), "coverage.grid", minimum=16),
        expansion_point=ep,
        cases=tuple(cases),
        sweeps=tuple(_sweep(s, k) for k, s in enumerate(doc.get("sweeps", []) or [])),
        output=Path(doc.get("output", "out")),
        document=doc,
    )


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read a YAML file (or the built-in defaults when ``path`` is None)."""
    if path is None:
        text = DEFAULT_CONFIG
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return build_config(doc, **overrides)

