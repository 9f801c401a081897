"""Command-line front end: ``isac-drr coverage | drr-sweep | validate``.

Exit codes: 0 success, 2 configuration or model-validity error, 3 failed
validation, 4 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .coverage import ContourNotFoundError, DegenerateConicError
from .drr import DilutionError
from .params import ModelValidityError

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3, 4

logger = logging.getLogger("isac_drr")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _criteria(text: str) -> list[int]:
    try:
        return sorted({int(t.strip().lstrip("Cc")) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected e.g. '1,2,11', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isac-drr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML config (default: built-in defaults)")
    common.add_argument("--seed", type=_u64, help="override the config seed")
    common.add_argument("--out", type=Path, help="output directory (default: config 'output')")
    common.add_argument("--fidelity", choices=("assumption_matched", "full"),
                        help="Monte-Carlo fidelity mode")
    common.add_argument("--workers", type=int, help="parallel simulation processes")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    sub.add_parser("coverage", parents=[common],
                   help="sensing-region boundaries, areas and conic comparison")
    sweep = sub.add_parser("drr-sweep", parents=[common], help="analytic and simulated DRR sweeps")
    sweep.add_argument("--sweep", action="append", help="run only the named sweep(s)")
    sweep.add_argument("--analytic-only", action="store_true",
                       help="skip the Monte-Carlo simulation")
    val = sub.add_parser("validate", parents=[common], help="run the acceptance criteria")
    val.add_argument("--criteria", type=_criteria, help="comma-separated subset, e.g. 1,2,11")
    return parser


def cmd_coverage(cfg, out: Path) -> int:
    from .experiments import run_coverage
    from .plotting import plot_coverage

    res = run_coverage(cfg)
    res.boundary.write(out / "coverage_boundaries.csv")
    res.summary.write(out / "coverage_summary.csv")
    res.beta.write(out / "coverage_beta.csv")
    res.divergence.write(out / "conic_divergence.csv")
    plot_coverage(res.shapes, cfg.drv_distance, out / "coverage.svg")
    areas = {}
    for case, method, area in zip(res.summary.column("case"), res.summary.column("method"),
                                  res.summary.column("area_m2")):
        areas.setdefault(case, {})[method] = area
    cases = list(areas)
    for a, b in zip(cases, cases[1:]):
        rel = ">" if areas[a]["exact"] > areas[b]["exact"] else "<="
        logger.info("exact area %s %.6g m^2 %s %s %.6g m^2", a, areas[a]["exact"], rel, b,
                    areas[b]["exact"])
    return EXIT_OK


def cmd_drr_sweep(cfg, out: Path, names=None, analytic_only=False) -> int:
    from .experiments import run_sweep
    from .plotting import plot_sweep

    axes = [a for a in cfg.sweeps if not names or a.name in names]
    if names:
        missing = set(names) - {a.name for a in cfg.sweeps}
        if missing:
            raise ConfigError(f"unknown sweep(s) {sorted(missing)}")
    if not axes:
        raise ConfigError("no sweeps configured")
    for axis in axes:
        table = run_sweep(cfg, axis, simulate_mc=not analytic_only)
        table.write(out / f"{axis.name}.csv")
        plot_sweep(table, out / f"{axis.name}.svg", log_x=axis.parameter == "drv_intensity")
    return EXIT_OK


def cmd_validate(cfg, out: Path, criteria=None) -> int:
    from .validation import render_report, run_criteria

    results = run_criteria(cfg, criteria, out)
    report = render_report(results, cfg)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "validation_report.txt", "w", encoding="utf-8", newline="") as fh:
        fh.write(report)
    sys.stdout.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = load_config(args.config, seed=args.seed, fidelity=args.fidelity,
                          output=args.out, workers=args.workers)
        out = cfg.output
        if args.command == "coverage":
            return cmd_coverage(cfg, out)
        if args.command == "drr-sweep":
            return cmd_drr_sweep(cfg, out, args.sweep, args.analytic_only)
        return cmd_validate(cfg, out, args.criteria)
    except (ConfigError, ModelValidityError, DilutionError) as exc:
        print(f"isac-drr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContourNotFoundError, DegenerateConicError, FloatingPointError,
            ZeroDivisionError) as exc:
        print(f"isac-drr: numeric degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        if args.command == "validate" and "unknown criterion" in str(exc):
            print(f"isac-drr: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise


if __name__ == "__main__":
    sys.exit(main())
