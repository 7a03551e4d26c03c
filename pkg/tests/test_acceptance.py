"""Acceptance criteria, one test each.

Every test records a ``CRITERION k: PASS|FAIL - detail`` line, prints it and
then asserts.  The lines are repeated in the terminal summary.  Tolerances
are pinned here and nowhere else.
"""

from __future__ import annotations

import re
import subprocess
import sys
import time
from decimal import Decimal
from pathlib import Path

import gmpy2
from gmpy2 import mpfr

import reference
from confined_aim import golden
from confined_aim.aim import run_aim
from confined_aim.hydrogen import (
    CoulombBoxSource,
    HydrogenModel,
    StateLabel,
    exact_radii,
    solve_energy,
    special_parameter,
)
from confined_aim.numerics import PrecisionContext
from confined_aim.oracle import oracle_critical_radii, oracle_energy
from conftest import ACCEPTANCE

ULP_LIMIT = Decimal(1)  # criteria 1-3: one unit in the last printed digit
TABLE2_SECONDS = 120
CLOSED_FORM_TOL = mpfr("1e-45")
ORACLE_REL = 1e-8
TERMINATION_RESIDUAL = mpfr("1e-40")
FREE_ATOM_TOL = mpfr("1e-10")
PROPERTY_SECONDS = 60
PROPERTY_CASES = 1000

CTX = PrecisionContext(50)


def record(k: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[k] = line
    print(line)
    assert ok, line


def ulps(value, printed: str) -> Decimal:
    return abs(Decimal(format(value, ".60g")) - Decimal(printed)) / golden.ulp(printed)


def test_criterion_1_table2(table2_results):
    results, seconds = table2_results
    devs = [ulps(res.E, row.E) for row, res in zip(golden.TABLE2, results)]
    worst = max(devs)
    bad = [row.R for row, d in zip(golden.TABLE2, devs) if d > ULP_LIMIT]
    ok = len(results) == 25 and not bad and seconds < TABLE2_SECONDS
    record(
        1,
        ok,
        f"{len(results)} rows, worst {worst:.2f} ulp, {seconds:.0f}s (limit {TABLE2_SECONDS}s)"
        + (f", off: R={bad}" if bad else ""),
    )


def test_criterion_2_table3(table3_results):
    results, _ = table3_results
    devs = [ulps(res.E, row.E) for row, res in zip(golden.TABLE3, results)]
    bad = [f"R={row.R}:{d:.0f}" for row, d in zip(golden.TABLE3, devs) if d > ULP_LIMIT]
    record(
        2,
        not bad,
        f"{len(results)} rows, worst {max(devs):.1f} ulp"
        + (f"; beyond 1 ulp: {', '.join(bad)}" if bad else ""),
    )


def test_criterion_3_table4(table4_results):
    results, seconds = table4_results
    devs = [ulps(res.r_c, row.r_c) for row, res in zip(golden.TABLE4, results)]
    bad = [(row.l, row.n) for row, d in zip(golden.TABLE4, devs) if d > ULP_LIMIT]
    record(3, len(results) == 12 and not bad, f"12 radii, worst {max(devs):.2f} ulp, {seconds:.0f}s")


def test_criterion_4_table1():
    worst_closed = mpfr(0)
    printed_ok = True
    for A in ("1", "2"):
        for row in golden.TABLE1:
            R = exact_radii(row.n, row.l, A, CTX)[row.m]
            with CTX.local():
                AR = R * mpfr(A)
                if row.closed is not None:
                    c, d, sign, q = row.closed
                    ref = c * (d + sign * gmpy2.sqrt(mpfr(q))) if q else mpfr(c * d)
                    worst_closed = max(worst_closed, abs(AR - ref))
                else:
                    places = Decimal(row.printed).as_tuple().exponent
                    rounded = Decimal(format(AR, ".60g")).quantize(Decimal(1).scaleb(places))
                    printed_ok &= rounded == Decimal(row.printed)
    ok = worst_closed <= CLOSED_FORM_TOL and printed_ok
    record(
        4,
        ok,
        f"closed forms worst |AR - form| = {float(worst_closed):.1e} (limit 1e-45); "
        f"n=3 radii round to the printed digits at A=1,2: {printed_ok}",
    )


def test_criterion_5_oracle(table2_results, table3_results, table4_results):
    worst = 0.0
    for rows, (results, _), l in ((golden.TABLE2, table2_results, 0), (golden.TABLE3, table3_results, 1)):
        for row, res in zip(rows, results):
            E = oracle_energy(float(row.R), (1, l)).E
            worst = max(worst, abs(E - float(res.E)) / abs(float(res.E)))
    results, _ = table4_results
    bessel_worst = 0.0
    for l in (0, 1):
        shoot = oracle_critical_radii(l, 6)
        for n in range(1, 7):
            r_c = float(next(r.r_c for r in results if (r.l, r.n) == (l, n)))
            worst = max(worst, abs(shoot[n - 1] - r_c) / r_c)
            bessel = float(reference.bessel_critical_radius(l, n))
            bessel_worst = max(bessel_worst, abs(bessel - r_c) / r_c)
    ok = worst <= ORACLE_REL and bessel_worst <= ORACLE_REL
    record(
        5,
        ok,
        f"oracle vs AIM worst relative {worst:.1e}, Bessel identity worst {bessel_worst:.1e} "
        f"(limit {ORACLE_REL:g})",
    )


def test_criterion_6_termination():
    """delta at the terminating index and the next one both vanish."""
    worst = mpfr(0)
    checked = 0
    for row in golden.TABLE1:
        R = exact_radii(row.n, row.l, 2, CTX)[row.m]
        src = CoulombBoxSource("2", row.l, R)
        a = special_parameter(row.n, row.l, 2, CTX)
        # the factor has degree n - 1, so termination first shows at index n - 1
        k = max(1, row.n - 1)
        for frac in ("0.25", "0.5", "0.75"):
            with CTX.local():
                r0 = R * mpfr(frac)
            for idx in (k, k + 1):
                rep = run_aim(src, a, r0, idx, CTX, stop_early=False)
                worst = max(worst, rep.relative_residual)
                checked += 1
    record(
        6,
        worst <= TERMINATION_RESIDUAL,
        f"{checked} checks over {len(golden.TABLE1)} configurations, worst relative residual "
        f"{float(worst):.1e} (limit 1e-40)",
    )


def test_criterion_7_free_atom():
    res = solve_energy(HydrogenModel("2", 0, "20"), StateLabel(1, 0))
    with CTX.local():
        gap = abs(res.E + 1)
    record(7, gap <= FREE_ATOM_TOL, f"R=20 1s: |E + 1| = {float(gap):.2e} (limit 1e-10)")


def test_criterion_8_properties():
    path = Path(__file__).with_name("test_properties.py")
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(path), "--hypothesis-show-statistics"],
        capture_output=True,
        text=True,
        cwd=path.parent.parent,
    )
    seconds = time.perf_counter() - t0
    counts = [int(c) for c in re.findall(r"(\d+) passing examples", proc.stdout)]
    ok = proc.returncode == 0 and len(counts) >= 5 and min(counts) >= PROPERTY_CASES and seconds < PROPERTY_SECONDS
    record(
        8,
        ok,
        f"{len(counts)} properties, min {min(counts, default=0)} cases each, {seconds:.0f}s "
        f"(limit {PROPERTY_SECONDS}s), exit {proc.returncode}",
    )
