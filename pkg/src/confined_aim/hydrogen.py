"""Hydrogen-like atom in an impenetrable sphere.

Radial problem, with ``A`` the Coulomb strength (``A = 2`` gives Rydberg
energies and Bohr-radius lengths)::

    -psi'' + [l(l+1)/r**2 - A/r] psi = E psi,      psi(0) = psi(R) = 0

With ``psi = r**(l+1) (R - r) exp(-a r) f(r)`` and ``E = -a**2`` the factor
``f`` obeys ``f'' = lambda0 f' + s0 f`` where

    lambda0 = 2 (a + 1/(R - r) - (l + 1)/r)
    s0      = ((2l + 2) a - A)/r + (2l + 2)/(r (R - r)) - 2a/(R - r)

which is what the AIM engine iterates.  Bound states have real ``a > 0``;
states pushed above zero energy by the box have ``a = i kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb, factorial

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr, mpq

from . import oracle
from .aim import IMAGINARY, REAL, SolveOptions, solve_parameter
from .errors import (
    ExpansionPointOutOfDomain,
    IndexOutOfRange,
    NoConvergence,
    NotOnAxis,
    OutOfBox,
    StateNotFound,
)
from .jets import Jet
from .numerics import PrecisionContext, RealPolynomial, real_roots, to_real

_SPECTROSCOPIC = "spdfghiklmnoqrtuv"


@dataclass(frozen=True)
class HydrogenModel:
    """``A`` and ``R`` may be given as strings to keep exact decimals."""

    A: object = 2
    l: int = 0
    R: object = 1

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a non-negative integer, got {self.l!r}")
        ctx = PrecisionContext(20)
        if not ctx.real(self.A) > 0:
            raise ValueError(f"A must be positive, got {self.A!r}")
        if not ctx.real(self.R) > 0:
            raise ValueError(f"R must be positive, got {self.R!r}")


@dataclass(frozen=True)
class StateLabel:
    """``n`` is one plus the number of radial nodes; ``n + l`` is the
    principal quantum number of the free atom."""

    n: int
    l: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be >= 0, got {self.l!r}")

    @property
    def principal(self) -> int:
        return self.n + self.l

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        """``"1s"``, ``"2p"``, ``"3d"`` ... or ``"n,l"``."""
        text = text.strip().lower()
        if "," in text:
            n, l = (int(t) for t in text.split(","))
            return cls(n, l)
        if len(text) < 2 or not text[:-1].isdigit() or text[-1] not in _SPECTROSCOPIC:
            raise ValueError(f"cannot parse state label {text!r}")
        principal, l = int(text[:-1]), _SPECTROSCOPIC.index(text[-1])
        if principal <= l:
            raise ValueError(f"{text!r}: principal number must exceed l")
        return cls(principal - l, l)

    def spectroscopic(self) -> str:
        return f"{self.principal}{_SPECTROSCOPIC[self.l]}"


@dataclass(frozen=True)
class CoulombBoxSource:
    """``(lambda0, s0)`` jets for the confined Coulomb problem, parameter ``a``.

    Model constants are converted at call time so the source follows whatever
    precision is active.
    """

    A: object
    l: int
    R: object

    def __call__(self, point, order: int, a):
        R = to_real(self.R)
        return _coulomb_jets(to_real(self.A), self.l, R, point, order, a)

    def magnitudes(self, point, order: int, a):
        """Coefficient sizes of ``lambda0``, ``s0`` before their terms cancel."""
        return _coulomb_magnitudes(to_real(self.A), self.l, to_real(self.R), point, order, a)


@dataclass(frozen=True)
class CriticalSource:
    """Zero-energy (``a = 0``) jets with the box radius as the parameter."""

    A: object
    l: int

    def __call__(self, point, order: int, R):
        return _coulomb_jets(to_real(self.A), self.l, R, point, order, 0)


@dataclass(frozen=True)
class ThresholdSource:
    """The Coulomb source re-parametrized by ``t = a**2 = -E``.

    Near zero energy the roots ``+a*`` and ``-a*`` of ``delta_n(a)`` merge
    (or become ``+-i kappa``), so ``delta_n`` is quadratic in ``a`` there and
    has roots on one axis only.  As a function of ``t`` it has one simple
    root that crosses smoothly from ``t > 0`` (real ``a``) to ``t < 0``
    (imaginary ``a``).
    """

    base: CoulombBoxSource

    @staticmethod
    def parameter(t):
        t = to_real(t)
        return gmpy2.sqrt(t) if t >= 0 else mpc(0, gmpy2.sqrt(-t))

    def __call__(self, point, order: int, t):
        return self.base(point, order, self.parameter(t))

    def magnitudes(self, point, order: int, t):
        return self.base.magnitudes(point, order, self.parameter(t))


def _coulomb_jets(A, l, R, point, order, a):
    if not 0 < point < R:
        raise ExpansionPointOutOfDomain(f"r0={point} is not inside (0, {R})")
    inv_r = Jet.reciprocal_affine(0, 1, point, order)
    inv_b = Jet.reciprocal_affine(R, -1, point, order)
    k = 2 * l + 2
    lam0 = (inv_b - inv_r * (l + 1)) * 2
    # 1/(r(R - r)) = (1/r + 1/(R - r)) / R
    s0 = inv_r * (k / R - A) + inv_b * (k / R)
    if a != 0:
        lam0 = lam0 + 2 * a
        s0 = s0 + inv_r * (k * a) - inv_b * (2 * a)
    return lam0, s0


def _coulomb_magnitudes(A, l, R, point, order, a):
    inv_r = Jet.reciprocal_affine(0, 1, point, order)
    inv_b = Jet.reciprocal_affine(R, -1, point, order)
    inv_r = Jet(point, [abs(c) for c in inv_r.coeffs])
    inv_b = Jet(point, [abs(c) for c in inv_b.coeffs])
    k = 2 * l + 2
    size = abs(a)
    lam0 = (inv_b + inv_r * (l + 1)) * 2 + 2 * size
    s0 = inv_r * (k / R + A + k * size) + inv_b * (k / R + 2 * size)
    return lam0, s0


def build_coefficients(model: HydrogenModel) -> CoulombBoxSource:
    return CoulombBoxSource(model.A, model.l, model.R)


def energy_from_parameter(a, tol=None):
    """``E = -a**2`` for real ``a``; ``E = kappa**2`` for ``a = i kappa``."""
    if not isinstance(a, (mpc, complex)):
        return -to_real(a) ** 2
    re, im = to_real(a.real), to_real(a.imag)
    scale = max(abs(re), abs(im), mpfr(1))
    tol = mpfr("1e-20") if tol is None else to_real(tol)
    if abs(im) <= tol * scale:
        return -re * re
    if abs(re) <= tol * scale:
        return im * im
    raise NotOnAxis(f"a = {a} is neither real nor purely imaginary")


def special_parameter(n: int, l: int, A, ctx: PrecisionContext | None = None) -> mpfr:
    """The ``a`` at which ``delta_n`` terminates for the special radii."""
    ctx = ctx or PrecisionContext()
    with ctx.local():
        return to_real(A) / (2 * (n + l + 1))


def exact_energy(n: int, l: int, A, ctx: PrecisionContext | None = None) -> mpfr:
    ctx = ctx or PrecisionContext()
    with ctx.local():
        return -to_real(A) ** 2 / (4 * (n + l + 1) ** 2)


def exact_radius_polynomial(n: int, l: int) -> RealPolynomial:
    """Integer polynomial in ``x = A R`` whose roots are the special radii.

    Coefficient of ``x**k`` is
    ``(-1)**k (l+n+1)**(n-k) (2l+n+1)! / (2l+k+1)! * C(n, k)``, scaled by
    ``(-1)**n`` so the leading coefficient is +1.
    """
    _check_nl(n, l)
    coeffs = []
    for k in range(n + 1):
        c = (l + n + 1) ** (n - k) * factorial(2 * l + n + 1) // factorial(2 * l + k + 1) * comb(n, k)
        coeffs.append((-1) ** (n + k) * c)
    return RealPolynomial(tuple(coeffs))


def kummer_polynomial(n: int, b) -> RealPolynomial:
    """The terminating series ``1F1(-n; b; x)`` with exact rational coefficients."""
    b = mpq(b)
    coeffs = [mpq(1)]
    for k in range(n):
        coeffs.append(coeffs[-1] * (k - n) / ((b + k) * (k + 1)))
    return RealPolynomial(tuple(coeffs))


def kummer_eval(n: int, b, x, ctx: PrecisionContext | None = None):
    ctx = ctx or PrecisionContext()
    with ctx.local():
        x = to_real(x)
        b = to_real(b)
        term, total = mpfr(1), mpfr(1)
        for k in range(n):
            term = term * (k - n) / ((b + k) * (k + 1)) * x
            total += term
        return total


def exact_radii(n: int, l: int, A, ctx: PrecisionContext | None = None) -> list:
    """The ``n`` box radii admitting an exact solution with ``delta_n = 0``."""
    _check_nl(n, l)
    ctx = ctx or PrecisionContext()
    with ctx.local():
        bound = 4 * n + 4 * l + 10
        xs = real_roots(kummer_polynomial(n, 2 * l + 2), (0, bound), ctx)
        if len(xs) != n:
            raise NoConvergence(f"found {len(xs)} Kummer roots, expected {n}")
        scale = mpfr(n + l + 1) / to_real(A)
        return [x * scale for x in xs]


def exact_closed_forms(n: int, l: int) -> list[str] | None:
    """Closed forms of ``A R`` for the special radii, available for ``n <= 2``.

    For ``n = 2`` the quadratic factors as
    ``A R = (l + 3) ((2l + 3) -+ sqrt(2l + 3))``; perfect squares collapse
    to integers.
    """
    _check_nl(n, l)
    if n == 1:
        return [str(2 * (l + 1) * (l + 2))]
    if n == 2:
        q = 2 * l + 3
        root = math.isqrt(q)
        if root * root == q:
            return [str((l + 3) * (q - root)), str((l + 3) * (q + root))]
        return [f"{l + 3}({q}-sqrt({q}))", f"{l + 3}({q}+sqrt({q}))"]
    return None


def exact_factor(n: int, l: int, m: int, A, ctx: PrecisionContext | None = None) -> RealPolynomial:
    """``prod_{i != m} (1 - r / R_i)`` as a polynomial in ``r``."""
    if not 0 <= m < n:
        raise IndexOutOfRange(f"m must be in 0..{n - 1}, got {m}")
    ctx = ctx or PrecisionContext()
    radii = exact_radii(n, l, A, ctx)
    with ctx.local():
        p = RealPolynomial((mpfr(1),))
        for i, Ri in enumerate(radii):
            if i != m:
                p = p * RealPolynomial((mpfr(1), -1 / Ri))
        return p


@dataclass(frozen=True)
class ExactSolution:
    n: int
    l: int
    m: int
    A: object
    radii: tuple
    E: mpfr
    a: mpfr
    factor: RealPolynomial

    @property
    def R(self):
        return self.radii[self.m]

    @property
    def state(self) -> StateLabel:
        # m smaller radii lie inside the box, each a node
        return StateLabel(self.m + 1, self.l)


def exact_solution(n: int, l: int, m: int, A, ctx: PrecisionContext | None = None) -> ExactSolution:
    ctx = ctx or PrecisionContext()
    factor = exact_factor(n, l, m, A, ctx)
    return ExactSolution(
        n,
        l,
        m,
        A,
        tuple(exact_radii(n, l, A, ctx)),
        exact_energy(n, l, A, ctx),
        special_parameter(n, l, A, ctx),
        factor,
    )


def wavefunction_eval(solution, r, factor=None, ctx: PrecisionContext | None = None):
    """Unnormalized ``psi(r)``.

    For an :class:`ExactSolution` this is
    ``r**(l+1) exp(-a r) prod_i (1 - r/R_i)``.  For an :class:`EnergyResult`
    the general form ``r**(l+1) (R - r) exp(-a r) f(r)`` is used with the
    callable ``factor`` (default ``f = 1``); complex ``a`` gives a real
    ``psi`` only up to a phase, so only bound states are accepted there.
    """
    ctx = ctx or PrecisionContext()
    with ctx.local():
        r = to_real(r)
        if isinstance(solution, ExactSolution):
            R, l, a = solution.R, solution.l, solution.a
            f = solution.factor
            tail = 1 - r / R
        else:
            R, l, a = to_real(solution.model.R), solution.model.l, solution.a
            if isinstance(a, mpc):
                raise ValueError("general wavefunction needs a real parameter a")
            f = factor or (lambda _r: 1)
            tail = R - r
        if r < 0 or r > R * (1 + mpfr(10) ** (5 - ctx.digits)):
            raise OutOfBox(f"r = {r} outside [0, {R}]")
        if r >= R:
            return mpfr(0)
        return r ** (l + 1) * gmpy2.exp(-a * r) * tail * f(r)


def normalization_integral(solution, points: int = 1000, factor=None) -> float:
    """``int_0^R psi**2 dr`` by composite Simpson on ``points`` intervals."""
    if points % 2:
        points += 1
    R = float(solution.R if isinstance(solution, ExactSolution) else to_real(solution.model.R))
    rs = np.linspace(0.0, R, points + 1)
    ctx = PrecisionContext(20)
    psi = np.array([float(wavefunction_eval(solution, str(r), factor, ctx)) if r < R else 0.0 for r in rs])
    w = np.ones(points + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return float(np.dot(w, psi**2) * (R / points) / 3)


def normalization_constant(solution, points: int = 1000, factor=None) -> float:
    return 1.0 / math.sqrt(normalization_integral(solution, points, factor))


@dataclass(frozen=True)
class EnergyResult:
    model: HydrogenModel
    state: StateLabel
    E: mpfr
    a: object
    axis: str
    n_used: int
    relative_residual: mpfr
    digits: int
    r0: mpfr
    oracle_E: float | None = None
    oracle_nodes: int | None = None
    stabilized: bool = True

    @property
    def a_re(self):
        return self.a.real if isinstance(self.a, mpc) else self.a

    @property
    def a_im(self):
        return self.a.imag if isinstance(self.a, mpc) else mpfr(0)


# seeds with |E| below this fraction of A**2 are solved in t = -E
THRESHOLD_WINDOW = 1e-6


def default_r0(R):
    """Expansion point: ``R/2`` for ``R <= 1``, else ``1``."""
    R = to_real(R)
    return R / 2 if R <= 1 else mpfr(1)


def solve_energy(
    model: HydrogenModel,
    state: StateLabel,
    options: SolveOptions | None = None,
    *,
    oracle_check: bool = False,
    seed_energy: float | None = None,
    r0=None,
) -> EnergyResult:
    """Eigenvalue of ``state`` in the box ``model.R``.

    The state is identified by node count with the shooting oracle, which
    also supplies a double-precision seed and decides the axis (real ``a``
    for ``E < 0``, imaginary otherwise).  AIM then refines the seed to
    working precision.  Seeds within ``THRESHOLD_WINDOW * A**2`` of zero are
    refined in ``t = -E`` instead (see :class:`ThresholdSource`).
    """
    options = options or SolveOptions()
    if state.l != model.l:
        raise ValueError(f"state l={state.l} does not match model l={model.l}")
    ctx = PrecisionContext(options.digits)
    with ctx.local():
        R = to_real(model.R)
        point = default_r0(R) if r0 is None else to_real(r0)
    R_float = float(R)
    check = None
    if seed_energy is None or oracle_check:
        check = oracle.oracle_energy(R_float, (state.n, state.l), float(to_real(model.A)))
    E_seed = check.E if seed_energy is None else float(seed_energy)

    src = build_coefficients(model)
    near_threshold = abs(E_seed) <= THRESHOLD_WINDOW * float(to_real(model.A)) ** 2
    if near_threshold:
        src, seed = ThresholdSource(src), -E_seed
    else:
        axis = REAL if E_seed < 0 else IMAGINARY
        seed = math.sqrt(abs(E_seed))
    try:
        root = solve_parameter(src, REAL if near_threshold else axis, seed, point, options)
    except NoConvergence as exc:
        raise NoConvergence(f"AIM failed for {state.spectroscopic()} at R={model.R}: {exc}") from exc

    with PrecisionContext(root.digits).local():
        if near_threshold:
            a = ThresholdSource.parameter(root.value)
            axis = IMAGINARY if isinstance(a, mpc) else REAL
        else:
            value = abs(root.value)
            a = value if axis == REAL else mpc(0, value)
        E = energy_from_parameter(a)
    if abs(float(E) - E_seed) > 1e-4 * max(1.0, abs(E_seed)):
        raise StateNotFound(
            f"AIM converged to E={float(E)}, away from the seed {E_seed} for {state.spectroscopic()}"
        )
    return EnergyResult(
        model,
        state,
        E,
        a,
        axis,
        root.n_used,
        root.relative_residual,
        root.digits,
        point,
        check.E if check else None,
        check.nodes if check else None,
        root.stabilized,
    )


@dataclass(frozen=True)
class CriticalResult:
    l: int
    n: int
    A: object
    r_c: mpfr
    n_used: int
    digits: int
    seed: float = field(repr=False, default=float("nan"))
    stabilized: bool = True


def solve_critical(l: int, n: int, A=2, options: SolveOptions | None = None) -> CriticalResult:
    """Box radius at which state ``(n, l)`` reaches zero energy.

    At ``E = 0`` the parameter ``a`` vanishes and the box radius becomes the
    unknown; AIM is expanded at half the current radius.  The ``n``-th root
    family is picked by seeding from the ``n``-th zero of the zero-energy
    shooting solution.
    """
    _check_nl(n, l)
    options = options or SolveOptions()
    seed = oracle.oracle_critical_radii(l, n, float(PrecisionContext(20).real(A)))[n - 1]
    src = CriticalSource(A, l)
    try:
        root = solve_parameter(src, REAL, seed, lambda R: R / 2, options)
    except NoConvergence as exc:
        raise NoConvergence(f"critical radius (l={l}, n={n}) did not converge: {exc}") from exc
    if abs(float(root.value) - seed) > 1e-4 * seed:
        raise StateNotFound(f"AIM root {float(root.value)} is not near the seed {seed}")
    return CriticalResult(l, n, A, root.value, root.n_used, root.digits, seed, root.stabilized)


def critical_radius(l: int, n: int, A=2, options: SolveOptions | None = None) -> mpfr:
    return solve_critical(l, n, A, options).r_c


def rescale(A_from, R, E, A_to, ctx: PrecisionContext | None = None):
    """Coulomb scaling: ``E(A', R A/A') = (A'/A)**2 E(A, R)``."""
    ctx = ctx or PrecisionContext()
    with ctx.local():
        A_from, A_to = to_real(A_from), to_real(A_to)
        if A_from <= 0 or A_to <= 0:
            raise ValueError("Coulomb strengths must be positive")
        ratio = A_to / A_from
        return to_real(R) / ratio, to_real(E) * ratio**2


def _check_nl(n, l):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if int(l) != l or l < 0:
        raise ValueError(f"l must be >= 0, got {l!r}")
