from __future__ import annotations

import time

import pytest

from confined_aim import golden
from confined_aim.hydrogen import HydrogenModel, StateLabel, solve_critical, solve_energy

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def _solve_rows(rows, l):
    out = []
    t0 = time.perf_counter()
    for row in rows:
        out.append(solve_energy(HydrogenModel(golden.A_DONOR, l, row.R), StateLabel(1, l)))
    return out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def table2_results():
    """Ground-state solves for every l = 0 reference radius, with wall time."""
    return _solve_rows(golden.TABLE2, 0)


@pytest.fixture(scope="session")
def table3_results():
    return _solve_rows(golden.TABLE3, 1)


@pytest.fixture(scope="session")
def table4_results():
    t0 = time.perf_counter()
    out = [solve_critical(row.l, row.n, golden.A_DONOR) for row in golden.TABLE4]
    return out, time.perf_counter() - t0


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
