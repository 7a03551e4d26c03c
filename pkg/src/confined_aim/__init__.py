"""High-precision eigenvalues of a hydrogen-like atom in an impenetrable sphere.

The Asymptotic Iteration Method (AIM) is run on truncated Taylor expansions
at a single expansion point, with multi-precision arithmetic from gmpy2.  A
double-precision shooting integrator serves as an independent check.
"""

from __future__ import annotations

from .aim import (
    IMAGINARY,
    REAL,
    AIMState,
    ParameterRoot,
    SolveOptions,
    TerminationReport,
    aim_step,
    delta_at,
    delta_polynomial,
    reconstruct_factor,
    run_aim,
    solve_parameter,
)
from .hydrogen import (
    CriticalResult,
    EnergyResult,
    ExactSolution,
    HydrogenModel,
    StateLabel,
    build_coefficients,
    critical_radius,
    energy_from_parameter,
    exact_energy,
    exact_factor,
    exact_radii,
    exact_radius_polynomial,
    exact_solution,
    kummer_eval,
    rescale,
    solve_critical,
    solve_energy,
    special_parameter,
    wavefunction_eval,
)
from .jets import Jet
from .numerics import Bracket, PrecisionContext, RealPolynomial, bracket_root, polish_root_secant, real_roots
from .oracle import IntegrationConfig, OracleResult, integrate_radial, oracle_critical_radii, oracle_energy

__version__ = "0.1.0"
