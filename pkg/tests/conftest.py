"""Shared fixtures and the acceptance summary printer.

Tests named ``test_criterion_<k>_*`` in test_acceptance.py are collected into
a one-line-per-criterion verdict printed after the run, so the acceptance
gate is readable without scrolling the pytest output.
"""

import re

import pytest

from flattree import enumerate_halftrees, random_metric

_ACCEPTANCE: dict[int, tuple[str, str]] = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_([a-z0-9_]+)")


@pytest.fixture(scope="session")
def surfaces_by_ports():
    """Seeded surface sweep: ports -> list of built surfaces."""

    def sweep(max_ports: int, seeds: int, base_seed: int = 0):
        for n in range(1, max_ports + 1):
            for t in enumerate_halftrees(n):
                for k in range(seeds):
                    yield random_metric(t, base_seed + k)

    return sweep


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m or report.when != "call":
        return
    number = int(m.group(1))
    name = m.group(2).replace("_", " ")
    _ACCEPTANCE[number] = (name, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, outcome = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({name}): {verdict}")
