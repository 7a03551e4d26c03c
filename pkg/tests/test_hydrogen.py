from __future__ import annotations

import gmpy2
import pytest
import sympy as sp
from gmpy2 import mpc, mpfr

import reference
from confined_aim import golden
from confined_aim.aim import SolveOptions, run_aim
from confined_aim.errors import ExpansionPointOutOfDomain, IndexOutOfRange, NotOnAxis, OutOfBox
from confined_aim.hydrogen import (
    CoulombBoxSource,
    ExactSolution,
    HydrogenModel,
    StateLabel,
    build_coefficients,
    critical_radius,
    default_r0,
    energy_from_parameter,
    exact_closed_forms,
    exact_energy,
    exact_factor,
    exact_radii,
    exact_radius_polynomial,
    exact_solution,
    kummer_eval,
    normalization_integral,
    rescale,
    solve_energy,
    special_parameter,
    wavefunction_eval,
)
from confined_aim.numerics import PrecisionContext, real_roots

CTX = PrecisionContext(50)
WIDE = PrecisionContext(70)

# 70-digit eigenvalues, truncated, of the 2p state from the exact Kummer condition
KUMMER_2P = {
    "0.4": "116.89624744007678658925853416592486539841065604684497570",
    "1": "16.446276632321727964959412971190617420220668973792185895",
    "2": "3.1520375712126818368217673617396881629776408546959133019",
    "4": "0.28705416742791601916077852172862046925874251788547087267",
    "8": "-0.20890013281233364865313053052843212127101278881466438748",
}


def close(x, y, tol):
    with CTX.local():
        return abs(mpfr(x) - mpfr(y)) <= mpfr(tol)


# ---------------------------------------------------------------- labels


def test_state_label_parsing():
    assert StateLabel.parse("1s") == StateLabel(1, 0)
    assert StateLabel.parse("2p") == StateLabel(1, 1)
    assert StateLabel.parse("3s") == StateLabel(3, 0)
    assert StateLabel.parse("2,1") == StateLabel(2, 1)
    assert StateLabel(2, 1).spectroscopic() == "3p"
    for bad in ("1p", "s", "x3", "0,0"):
        with pytest.raises(ValueError):
            StateLabel.parse(bad)


def test_model_validation():
    with pytest.raises(ValueError):
        HydrogenModel(2, 0, 0)
    with pytest.raises(ValueError):
        HydrogenModel(-1, 0, 1)
    with pytest.raises(ValueError):
        HydrogenModel(2, -1, 1)


def test_default_r0_policy():
    assert default_r0("0.5") == mpfr("0.25")
    assert default_r0("1") == mpfr("0.5")
    assert default_r0("4") == 1


# ---------------------------------------------------------------- coefficients


def test_build_coefficients_constant_terms():
    src = build_coefficients(HydrogenModel("2", 0, "2"))
    with CTX.local():
        lam0, s0 = src(mpfr(1), 3, mpfr("0.5"))
    assert lam0.coeffs[0] == 1
    assert s0.coeffs[0] == 0
    with pytest.raises(ExpansionPointOutOfDomain):
        src(mpfr(2), 3, mpfr("0.5"))


def test_coefficients_match_symbolic_series():
    r, a = sp.symbols("r a")
    A, l, R = 2, 2, sp.Rational(7, 2)
    lam0 = 2 * (a + 1 / (R - r) - (l + 1) / r)
    s0 = ((2 * l + 2) * a - A) / r + (2 * l + 2) / (r * (R - r)) - 2 * a / (R - r)
    at_a, at_r = sp.Rational(3, 10), sp.Rational(6, 5)
    src = CoulombBoxSource(A, l, "3.5")
    with CTX.local():
        jl, js = src(mpfr("1.2"), 5, mpfr("0.3"))
        for expr, jet in ((lam0, jl), (s0, js)):
            series = sp.series(expr.subs(a, at_a), r, at_r, 6).removeO()
            for k in range(6):
                want = mpfr(str(sp.N(series.coeff(r - at_r, k) if k else series.subs(r, at_r), 60)))
                if k:
                    want = mpfr(str(sp.N(sp.diff(expr.subs(a, at_a), r, k).subs(r, at_r) / sp.factorial(k), 60)))
                assert abs(jet.coeffs[k] - want) <= mpfr("1e-45") * max(abs(want), 1)


# ---------------------------------------------------------------- parameters and energies


def test_energy_from_parameter():
    with CTX.local():
        assert energy_from_parameter(mpfr("0.5")) == mpfr("-0.25")
        E = energy_from_parameter(mpc(0, mpfr("2.178986400188704127")))
        assert abs(E - mpfr("4.747981732207327454")) < mpfr("1e-17")
        assert energy_from_parameter(mpfr(0)) == 0
        with pytest.raises(NotOnAxis):
            energy_from_parameter(mpc(1, 1))


def test_special_parameter_and_exact_energy():
    with CTX.local():
        assert special_parameter(1, 0, 2) == mpfr("0.5")
        A = mpfr("3.7")
        assert abs(special_parameter(2, 0, A, CTX) - A / 6) < mpfr("1e-48")
        assert special_parameter(3, 0, 2) == mpfr("0.25")
        assert exact_energy(3, 0, 2) == mpfr("-0.0625")
        assert exact_energy(1, 0, 2) == mpfr("-0.25")
        assert exact_energy(2, 1, 2) == mpfr("-0.0625")
        assert abs(exact_energy(1, 1, 2) + mpfr(1) / 9) < mpfr("1e-48")


# ---------------------------------------------------------------- exact solutions


@pytest.mark.parametrize("l", range(6))
def test_radius_polynomial_low_degree_forms(l):
    x = sp.Symbol("x")
    p1 = exact_radius_polynomial(1, l).coefficients
    assert sp.expand(sum(c * x**k for k, c in enumerate(p1))) == x - 2 * (l + 1) * (l + 2)
    p2 = exact_radius_polynomial(2, l).coefficients
    want = x**2 - 2 * (2 * l + 3) * (l + 3) * x + 2 * (l + 3) ** 2 * (2 * l + 3) * (l + 1)
    assert sp.expand(sum(c * x**k for k, c in enumerate(p2))) == sp.expand(want)


def test_radius_polynomial_n3_roots():
    roots = real_roots(exact_radius_polynomial(3, 0), (0, 100), CTX)
    assert [round(float(r), 4) for r in roots] == [3.7433, 13.2216, 31.0351]


def test_kummer_eval_examples():
    with CTX.local():
        assert kummer_eval(1, 2, 2) == 0
        assert kummer_eval(1, 2, mpfr("0.5")) == mpfr("0.75")
        s3 = gmpy2.sqrt(mpfr(3))
        for x in (3 - s3, 3 + s3):
            assert abs(kummer_eval(2, 2, x, CTX)) < mpfr("1e-48")
        for n in range(6):
            assert kummer_eval(n, 4, 0) == 1


def test_exact_radii_examples():
    with CTX.local():
        assert exact_radii(1, 0, 2) == [2]
        assert exact_radii(2, 3, 2) == [18, 36]
        got = exact_radii(3, 0, 1)
    assert [round(float(r), 4) for r in got] == [3.7433, 13.2216, 31.0351]


def test_closed_forms():
    assert exact_closed_forms(1, 2) == ["24"]
    assert exact_closed_forms(2, 0) == ["3(3-sqrt(3))", "3(3+sqrt(3))"]
    assert exact_closed_forms(2, 3) == ["36", "72"]
    assert exact_closed_forms(3, 0) is None


def test_exact_factor_examples():
    assert exact_factor(1, 2, 0, 2).coefficients == (1,)
    with CTX.local():
        A = mpfr("1.5")
        s3 = gmpy2.sqrt(mpfr(3))
        f = exact_factor(2, 0, 0, A, CTX)
        assert f.degree == 1
        assert abs(f.coefficients[1] + A / (3 * (3 + s3))) < mpfr("1e-48")
        g = exact_factor(3, 0, 1, 1, CTX)
        r0, _, r2 = exact_radii(3, 0, 1, CTX)
        for r in (mpfr("0.7"), mpfr(5)):
            assert abs(g(r) - (1 - r / r0) * (1 - r / r2)) < mpfr("1e-45")
    with pytest.raises(IndexOutOfRange):
        exact_factor(2, 0, 2, 2)


def test_radius_polynomial_matches_kummer_roots():
    """Both exact conditions give the same radii for n <= 6, l <= 3."""
    for n in range(1, 7):
        for l in range(4):
            from_poly = real_roots(exact_radius_polynomial(n, l), (0, (n + l + 1) * (4 * n + 4 * l + 10)), WIDE)
            from_kummer = exact_radii(n, l, 1, WIDE)
            assert len(from_poly) == n
            with WIDE.local():
                for p, k in zip(from_poly, from_kummer):
                    assert abs(p - k) <= mpfr("1e-55") * k


def test_kummer_roots_are_laguerre_roots():
    """1F1(-n; 2l+2; x) is proportional to L_n^(2l+1)(x)."""
    for n in range(1, 7):
        for l in range(4):
            want = reference.laguerre_roots(n, 2 * l + 1)
            got = exact_radii(n, l, 1, WIDE)
            assert len(want) == n
            with WIDE.local():
                for R, x in zip(got, want):
                    assert abs(R / (n + l + 1) - mpfr(x)) <= mpfr("1e-50") * R


def _exact_cases():
    for n in (1, 2, 3):
        for l in range(4):
            for m in range(n):
                yield n, l, m


@pytest.mark.parametrize("n,l,m", list(_exact_cases()))
def test_exact_closure(n, l, m):
    """Solving at a special radius returns the exact energy, and AIM stops
    after ``n`` iterations: the factor has degree ``n - 1``, so the
    termination condition first holds at index ``n - 1`` (index 0 is
    ``-s0``, which ``run_aim`` does not report)."""
    radii = exact_radii(n, l, 2, WIDE)
    R = format(radii[m], ".65f")
    # the default asks for digits - 10 stable digits; closure wants digits - 5
    opts = SolveOptions(digits=50, stabilization_digits=45)
    result = solve_energy(HydrogenModel("2", l, R), StateLabel(m + 1, l), opts)
    E = exact_energy(n, l, 2, WIDE)
    with WIDE.local():
        assert abs(result.E - E) <= CTX.epsilon
    src = CoulombBoxSource("2", l, R)
    report = run_aim(src, special_parameter(n, l, 2, CTX), default_r0(R), n + 5, CTX)
    assert report.converged and report.n == max(1, n - 1)


def test_exact_solution_record():
    sol = exact_solution(2, 1, 1, 2)
    assert isinstance(sol, ExactSolution)
    assert sol.state == StateLabel(2, 1)
    assert sol.R == sol.radii[1] and sol.radii[0] < sol.radii[1]
    assert sol.E == exact_energy(2, 1, 2)


def test_wavefunction_boundaries_and_nodes():
    for m in (0, 1):
        sol = exact_solution(2, 0, m, 2)
        assert wavefunction_eval(sol, 0) == 0
        assert wavefunction_eval(sol, sol.R) == 0
        with CTX.local():
            grid = [sol.R * k / 400 for k in range(1, 400)]
        values = [wavefunction_eval(sol, r) for r in grid]
        changes = sum(1 for u, v in zip(values, values[1:]) if u * v < 0)
        assert changes == m
    with pytest.raises(OutOfBox):
        wavefunction_eval(sol, sol.R + 1)
    with pytest.raises(OutOfBox):
        wavefunction_eval(sol, -0.1)


def test_normalization_quadrature_is_self_consistent():
    sol = exact_solution(3, 1, 2, 2)
    coarse = normalization_integral(sol, 1000)
    fine = normalization_integral(sol, 10000)
    assert abs(coarse - fine) <= 1e-6 * fine


# ---------------------------------------------------------------- solving


def test_solve_energy_tiny_box():
    res = solve_energy(HydrogenModel("2", 0, "0.1"), StateLabel(1, 0))
    assert res.axis == "imaginary"
    assert close(res.E, "937.986077318663675020", "1e-18")


def test_solve_energy_2p_small_box():
    res = solve_energy(HydrogenModel("2", 1, "0.4"), StateLabel(1, 1), oracle_check=True)
    assert close(res.E, KUMMER_2P["0.4"], "1e-28")
    assert res.oracle_nodes == 0
    assert abs(res.oracle_E - float(res.E)) < 1e-8 * abs(float(res.E))


def test_solve_energy_rejects_mismatched_l():
    with pytest.raises(ValueError):
        solve_energy(HydrogenModel("2", 0, "1"), StateLabel(1, 1))


def test_2p_energies_match_kummer(table3_results):
    results, _ = table3_results
    for row, res in zip(golden.TABLE3, results):
        assert close(res.E, KUMMER_2P[row.R], "1e-30"), row.R


@pytest.mark.parametrize("n,l,R", [(2, 0, "10"), (3, 0, "12"), (2, 1, "9"), (1, 2, "6")])
def test_excited_states_match_kummer(n, l, R):
    res = solve_energy(HydrogenModel("2", l, R), StateLabel(n, l))
    want = reference.kummer_energy(R, l, res.oracle_E)
    assert close(res.E, want, "1e-35")


def test_energy_decreases_with_box_radius(table2_results):
    results, _ = table2_results
    energies = [r.E for r in results]
    radii = [float(row.R) for row in golden.TABLE2]
    assert radii == sorted(radii)
    assert all(e1 > e2 for e1, e2 in zip(energies, energies[1:]))


def test_critical_radius_examples():
    assert close(critical_radius(0, 1, 2), "1.8352463302655", "1e-13")
    assert close(critical_radius(1, 1, 2), "5.0883082272750", "1e-13")


def test_critical_radii_are_bessel_zeros(table4_results):
    results, _ = table4_results
    for row, res in zip(golden.TABLE4, results):
        want = reference.bessel_critical_radius(row.l, row.n, 2, dps=60)
        assert close(res.r_c, want, "1e-35"), (row.l, row.n)


@pytest.mark.parametrize("l,n", [(0, 1), (1, 2)])
def test_binding_threshold(l, n):
    rc = critical_radius(l, n, 2)
    res = solve_energy(HydrogenModel("2", l, format(rc, ".45f")), StateLabel(n, l))
    assert abs(res.E) <= mpfr("1e-10")


# ---------------------------------------------------------------- scaling


def test_rescale_examples():
    R, E = rescale(2, 2, "-0.25", 1)
    assert R == 4 and E == mpfr("-0.0625")
    R, E = rescale(2, "2.2", "-0.4", 2, CTX)
    with CTX.local():
        assert R == mpfr("2.2") and E == mpfr("-0.4")
    with pytest.raises(ValueError):
        rescale(0, 1, 1, 2)


def test_rescale_against_direct_solve():
    res = solve_energy(HydrogenModel(1, 0, 4), StateLabel(1, 0))
    assert close(res.E, "-0.0625", "1e-45")
    rc = critical_radius(0, 1, 1)
    assert close(rc, "3.6704926605310", "1e-12")
    with CTX.local():
        assert abs(rc - 2 * critical_radius(0, 1, 2)) < mpfr("1e-40")


def test_scaled_parameter_is_invariant():
    """a * 2(n + l)/A does not change under a Coulomb rescaling."""
    a2 = solve_energy(HydrogenModel("2", 0, "2.2"), StateLabel(1, 0)).a
    R1, _ = rescale(2, "2.2", 0, "0.5")
    a1 = solve_energy(HydrogenModel("0.5", 0, format(R1, ".60f")), StateLabel(1, 0)).a
    with CTX.local():
        assert abs(a2 * 2 / 2 - a1 * 2 / mpfr("0.5")) < mpfr("1e-40")
