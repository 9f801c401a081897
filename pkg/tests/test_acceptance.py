"""The twelve acceptance criteria at the built-in configuration and seed.

All criteria run once per session through the same code path as
``isac-drr validate``; each test then asserts one criterion and the
terminal summary lists every PASS/FAIL line with its measurements.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from isac_drr.cli import main
from isac_drr.config import load_config
from isac_drr.validation import CRITERIA, run_criteria


@pytest.fixture(scope="session")
def outcomes(tmp_path_factory):
    cfg = load_config()
    results = run_criteria(cfg, None, tmp_path_factory.mktemp("acceptance"))
    for r in results:
        ACCEPTANCE_LINES.append(r.line())
        ACCEPTANCE_LINES.extend(f"      {d}" for d in r.details)
    passed = sum(r.passed for r in results)
    ACCEPTANCE_LINES.append(f"{passed}/{len(results)} criteria passed")
    return {r.number: r for r in results}


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"C{n}")
def test_criterion(outcomes, number):
    r = outcomes[number]
    assert r.passed, "\n".join(r.details)


def test_validate_cli_is_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["validate", "--criteria", "11", "--out", str(a)]) == 0
    assert main(["validate", "--criteria", "11", "--out", str(b)]) == 0
    assert (a / "validation_report.txt").read_bytes() == (b / "validation_report.txt").read_bytes()
