"""The asymptotic iteration method on Taylor jets.

For ``y'' = lambda0 y' + s0 y`` the method iterates

    lambda_n = lambda_{n-1}' + s_{n-1} + lambda0 lambda_{n-1}
    s_n      = s_{n-1}' + s0 lambda_{n-1}

from the seeds ``lambda_{-1} = 1``, ``s_{-1} = 0`` and locates eigenvalues
where ``delta_n = lambda_n s_{n-1} - s_n lambda_{n-1}`` vanishes at a fixed
point ``r0``.  Every iterate is carried as a jet at ``r0``: one derivative per
step costs one order, so a run of ``n_max`` steps needs jets of order
``n_max + 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Protocol, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import (
    CrossAxisResidualTooLarge,
    NoConvergence,
    NoRootInBracket,
    NoSignChange,
    NotAffineInParameter,
    NotConverged,
    NotStabilized,
    NumericOverflow,
    OrderExhausted,
)
from .jets import Jet
from .numerics import (
    Bracket,
    PrecisionContext,
    RealPolynomial,
    bracket_root,
    polish_root_secant,
    to_real,
)

REAL = "real"
IMAGINARY = "imaginary"


class CoefficientSource(Protocol):
    """Produces the ``(lambda0, s0)`` jets at ``point`` for a parameter value."""

    def __call__(self, point, order: int, parameter) -> tuple[Jet, Jet]: ...


@dataclass(frozen=True)
class AIMState:
    n: int
    lam: Jet
    s: Jet
    lam_prev: Jet | None = None
    s_prev: Jet | None = None

    @property
    def order(self) -> int:
        return self.lam.order


def initial_state(point, order: int, unit=None) -> AIMState:
    """The seeds ``lambda_{-1} = 1``, ``s_{-1} = 0`` as constant jets."""
    one = mpfr(1) if unit is None else unit
    return AIMState(-1, Jet.constant(one, point, order), Jet.constant(one * 0, point, order))


def aim_step(state: AIMState, lambda0: Jet, s0: Jet) -> AIMState:
    order = state.order - 1
    if order < 0:
        raise OrderExhausted(f"jet order exhausted at n={state.n}")
    lam_p = state.lam.truncate(order)
    lam = state.lam.derivative() + state.s.truncate(order) + lambda0.truncate(order) * lam_p
    s = state.s.derivative() + s0.truncate(order) * lam_p
    return AIMState(state.n + 1, lam, s, state.lam, state.s)


def delta_at(state: AIMState):
    """``delta_n`` at the expansion point."""
    if state.n < 0 or state.lam_prev is None:
        raise ValueError("delta needs n >= 0")
    return state.lam.value * state.s_prev.value - state.s.value * state.lam_prev.value


def _delta_scale(state: AIMState):
    return max(
        abs(state.lam.value * state.s_prev.value),
        abs(state.s.value * state.lam_prev.value),
    )


def iterate_aim(src: CoefficientSource, parameter, point, n_max: int) -> Iterator[AIMState]:
    """Yield the states ``n = 0 .. n_max`` (active gmpy2 context applies)."""
    order = n_max + 2
    lambda0, s0 = src(point, order, parameter)
    unit = lambda0.value * 0 + 1
    state = initial_state(point, order, unit)
    for _ in range(n_max + 1):
        state = aim_step(state, lambda0, s0)
        yield state


@dataclass(frozen=True)
class TerminationReport:
    delta_sequence: tuple
    relative_residual: mpfr
    converged: bool
    alpha: object
    n: int
    digits: int
    point: object = None

    @property
    def delta(self):
        return self.delta_sequence[-1] if self.delta_sequence else None


def _relative(delta, scale):
    if delta == 0:
        return mpfr(0)
    return abs(delta) / scale


def run_aim(
    src: CoefficientSource,
    parameter,
    r0,
    n_max: int,
    ctx: PrecisionContext | None = None,
    *,
    stop_early: bool = True,
) -> TerminationReport:
    """Run up to ``n_max`` iterations at ``r0`` and report the termination data.

    With ``stop_early`` the run ends at the first ``n >= 1`` whose relative
    residual ``|delta_n| / max(|lambda_n s_{n-1}|, |s_n lambda_{n-1}|)`` is at
    most ``ctx.epsilon``.

    When both products are themselves at rounding level (e.g. ``s0``
    vanishes identically at an exactly solvable point) that ratio compares
    noise with noise.  A parallel recursion on coefficient magnitudes, fed
    by the source's uncancelled sizes when it provides ``magnitudes``, then
    supplies the scale instead.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ctx = ctx or PrecisionContext()
    with ctx.local():
        eps = ctx.epsilon
        point = to_real(r0)
        order = n_max + 2
        lambda0, s0 = src(point, order, parameter)
        m_lambda0, m_s0 = _magnitude_jets(src, point, order, parameter, lambda0, s0)
        unit = lambda0.value * 0 + 1
        state = initial_state(point, order, unit)
        mag = initial_state(point, order, mpfr(1))
        deltas = []
        rel = mpfr(1)
        for n in range(n_max + 1):
            state = aim_step(state, lambda0, s0)
            mag = aim_step(mag, m_lambda0, m_s0)
            if n == 0:
                continue
            d = delta_at(state)
            if not _finite(d):
                raise NumericOverflow(f"delta_{n} is not finite")
            deltas.append(d)
            scale = _delta_scale(state)
            floor = mag.lam.value * mag.s_prev.value + mag.s.value * mag.lam_prev.value
            if scale <= eps * floor:
                scale = floor
            rel = _relative(d, scale)
            if stop_early and rel <= eps:
                break
        alpha = state.s.value / state.lam.value if state.lam.value != 0 else None
        return TerminationReport(
            tuple(deltas), rel, rel <= eps, alpha, state.n, ctx.digits, point
        )


def _magnitude_jets(src, point, order, parameter, lambda0, s0):
    if hasattr(src, "magnitudes"):
        return src.magnitudes(point, order, parameter)
    return _abs_jet(lambda0), _abs_jet(s0)


def _abs_jet(jet: Jet) -> Jet:
    return Jet(jet.point, [abs(c) for c in jet.coeffs])


def _finite(z) -> bool:
    if isinstance(z, mpc):
        return gmpy2.is_finite(z.real) and gmpy2.is_finite(z.imag)
    return gmpy2.is_finite(z)


def delta_value(src: CoefficientSource, parameter, r0, n: int):
    """``(delta_n, scale)`` at ``r0``; runs in the active gmpy2 context."""
    state = None
    for state in iterate_aim(src, parameter, r0, n):
        pass
    d = delta_at(state)
    if not _finite(d):
        raise NumericOverflow(f"delta_{n} is not finite")
    return d, _delta_scale(state)


@dataclass(frozen=True)
class SolveOptions:
    """Knobs for :func:`solve_parameter`.

    The iteration count follows a geometric schedule starting at ``n_start``;
    at each scheduled ``n`` the root is recomputed at ``n + n_step`` and
    accepted once the two agree to ``stabilization_digits`` (default: working
    digits minus 10).  When the roots stop improving the run is rounding
    limited: it resumes near the stalled level at doubled precision, up to
    ``max_digits``.  If the target is still out of reach, the best root is
    returned unstabilized provided ``min_stabilization_digits`` agree;
    otherwise :class:`NotStabilized` is raised.
    """

    digits: int = 50
    n_start: int = 8
    growth: float = 1.5
    n_max: int = 200
    n_step: int = 4
    max_digits: int = 100
    stabilization_digits: int | None = None
    min_stabilization_digits: int = 12
    secant_iterations: int = 80

    def schedule(self) -> list[int]:
        out, n = [], self.n_start
        while n + self.n_step <= self.n_max:
            out.append(n)
            n = max(n + 1, int(n * self.growth))
        return out

    def target_digits(self) -> int:
        if self.stabilization_digits is not None:
            return self.stabilization_digits
        return self.digits - 10


@dataclass(frozen=True)
class ParameterRoot:
    value: mpfr
    axis: str
    n_used: int
    stabilized: bool
    cross_axis_residual: mpfr
    relative_residual: mpfr
    digits: int
    stabilization: mpfr = None
    history: tuple = field(default=(), repr=False)


def _axis_parameter(axis: str, p):
    if axis == REAL:
        return p
    if axis == IMAGINARY:
        return mpc(0, p)
    raise ValueError(f"axis must be 'real' or 'imaginary', got {axis!r}")


SEED_TRUST = mpfr("1e-2")


class _Exhausted(Exception):
    """Internal: the schedule ended or stalled before the target was met."""

    def __init__(self, best, level, history, stalled):
        super().__init__(best)
        self.best, self.level, self.history, self.stalled = best, level, history, stalled


def solve_parameter(
    src: CoefficientSource,
    axis: str,
    seed_or_bracket,
    r0,
    options: SolveOptions | None = None,
) -> ParameterRoot:
    """Find the parameter at which ``delta_n(p; r0)`` vanishes, stabilized in n.

    ``seed_or_bracket`` is either a real seed or a ``(lo, hi)`` pair with a
    sign change at the first scheduled ``n``.  A seed should already be
    within about one percent of the root: low orders whose root lies farther
    away are treated as not yet converged.  On the imaginary axis the
    source is evaluated at ``i p``; the real part of ``delta_n`` is root-found
    and the imaginary part, relative to the size of the terms it is the
    difference of, is checked at the end.  ``r0`` may be a callable of ``p``
    (used when the unknown is the box radius itself).
    """
    if axis not in (REAL, IMAGINARY):
        raise ValueError(f"axis must be 'real' or 'imaginary', got {axis!r}")
    opts = options or SolveOptions()
    ctx = PrecisionContext(opts.digits)
    point_of = r0 if callable(r0) else None
    seed, level = seed_or_bracket, 0
    history: list = []
    while True:
        try:
            return _solve(src, axis, seed, r0, opts, ctx, level, history)
        except _Exhausted as exc:
            best = exc.best
            if exc.stalled and ctx.digits * 2 <= opts.max_digits:
                ctx = ctx.escalated()
                if best is not None:
                    seed = best[0]
                level = max(0, exc.level - 2)
                continue
        if best is None:
            raise NotStabilized(f"no root found at {ctx.digits} digits")
        x, n, diff = best
        with ctx.local():
            scale = max(abs(x), mpfr(1))
            if diff > mpfr(10) ** (-opts.min_stabilization_digits) * scale:
                raise NotStabilized(
                    f"roots still move by {float(diff):.3g} at n={n} ({ctx.digits} digits)"
                )
            pf = point_of or (lambda p, _r=to_real(r0): _r)
            return _finish(src, axis, x, pf, n, ctx, history, diff, stabilized=False)


def _solve(src, axis, seed_or_bracket, r0, opts: SolveOptions, ctx, level, history):
    with ctx.local():
        point_of = r0 if callable(r0) else (lambda p, _r=to_real(r0): _r)

        def g_scaled(p, n):
            d, scale = delta_value(src, _axis_parameter(axis, p), point_of(p), n)
            return (d.real if isinstance(d, mpc) else d), scale

        def g(p, n):
            return g_scaled(p, n)[0]

        target = opts.target_digits()
        schedule = opts.schedule()[level:]
        if not schedule:
            raise ValueError("empty iteration schedule; raise n_max")

        if isinstance(seed_or_bracket, (tuple, list)):
            lo, hi = (to_real(v) for v in seed_or_bracket)
            n0 = schedule[0]
            try:
                br = Bracket.around(lambda p: g(p, n0), lo, hi)
            except NoSignChange as exc:
                raise NoRootInBracket(str(exc)) from exc
            x = bracket_root(
                lambda p: g(p, n0), br, mpfr(10) ** (-ctx.digits) * max(abs(hi), 1)
            )
        else:
            x = to_real(seed_or_bracket)

        best = None
        diffs = []
        step = None
        for i, n in enumerate(schedule):
            m = n + opts.n_step
            try:
                x_n = _root_at(g, n, x, step, ctx, opts)
                # seeded like x_n, not from it: on a noise plateau a secant
                # started at x_n would accept it at once and fake agreement
                x_m = _root_at(g, m, x, step, ctx, opts)
                if best is None and abs(x_m - x) > SEED_TRUST * max(abs(x), mpfr(1)):
                    raise NoConvergence("root left the neighbourhood of the seed")
            except (NoConvergence, NumericOverflow):
                if best is None:
                    # low orders may simply have no root near the seed yet
                    continue
                raise _Exhausted(best, level + i, history, stalled=True) from None
            spread = abs(x_m - x_n)
            diff = max(
                spread,
                _uncertainty(g_scaled, n, x_n, ctx, spread),
                _uncertainty(g_scaled, m, x_m, ctx, spread),
            )
            history.append((n, ctx.digits, diff))
            diffs.append(diff)
            scale = max(abs(x_m), mpfr(1))
            if best is None or diff <= best[2]:
                best = (x_m, m, diff)
            if diff <= mpfr(10) ** (-target) * scale:
                return _finish(src, axis, x_m, point_of, m, ctx, history, diff)
            if len(diffs) >= 3 and diff >= diffs[-2] and diff >= diffs[-3]:
                raise _Exhausted(best, level + i, history, stalled=True)
            step = max(diff, mpfr(10) ** (-(ctx.digits // 2)) * scale)
            x = x_m
        raise _Exhausted(best, level + len(schedule), history, stalled=False)


def _root_at(g, n, x, step, ctx, opts):
    scale = max(abs(x), mpfr(1))
    h = step if step is not None else scale * mpfr("1e-6")
    tol = mpfr(10) ** (-ctx.digits) * scale
    # lenient on purpose: a root stopped by noise is graded by _uncertainty
    noise = mpfr(10) ** (-(ctx.digits // 4)) * scale
    return polish_root_secant(
        lambda p: g(p, n), x, x + h, tol, max_iter=opts.secant_iterations, noise_floor=noise
    )


def _uncertainty(g_scaled, n, x, ctx, spread):
    """How far the root of ``delta_n`` can move under rounding noise alone.

    The noise floor of ``delta_n`` is its term scale times a few units of
    the working precision; dividing by the local slope turns it into a
    parameter interval.  The slope is a central difference whose step starts
    at the observed root ``spread`` and grows until the change in
    ``delta_n`` clears the floor.  A noise-dominated ``delta_n`` gets an
    infinite interval.
    """
    size = max(abs(x), mpfr(1))
    h = max(mpfr(10) ** (-(ctx.digits // 2)) * size, spread)
    unit = mpfr(2) ** (-gmpy2.get_context().precision)
    for _ in range(4):
        f_hi, s_hi = g_scaled(x + h, n)
        f_lo, s_lo = g_scaled(x - h, n)
        floor = 16 * max(s_hi, s_lo) * unit
        if abs(f_hi - f_lo) > 4 * floor:
            return floor * 2 * h / abs(f_hi - f_lo)
        if h > mpfr("1e-6") * size:
            break
        h *= 10**4
    return gmpy2.inf()


def _finish(src, axis, x, point_of, n, ctx, history, diff, stabilized=True):
    d, scale = delta_value(src, _axis_parameter(axis, x), point_of(x), n)
    if isinstance(d, mpc):
        cross = _relative(d.imag, scale)
        rel = _relative(d, scale)
    else:
        cross, rel = mpfr(0), _relative(d, scale)
    if cross > gmpy2.sqrt(ctx.epsilon):
        raise CrossAxisResidualTooLarge(
            f"imaginary part of delta_{n} at the root is {cross} of its terms"
        )
    return ParameterRoot(
        x, axis, n, stabilized, cross, rel, ctx.digits, diff, tuple(history)
    )


# polynomial mode: jets whose coefficients are polynomials in the parameter


class _PolyJet:
    """``sum_j p**j * jets[j]``; all jets share point and order."""

    __slots__ = ("jets",)

    def __init__(self, jets):
        self.jets = list(jets)

    @property
    def order(self):
        return self.jets[0].order

    def truncate(self, order):
        return _PolyJet(j.truncate(order) for j in self.jets)

    def derivative(self):
        return _PolyJet(j.derivative() for j in self.jets)

    def __add__(self, other):
        a, b = self.jets, other.jets
        if len(a) < len(b):
            a, b = b, a
        return _PolyJet([x + y for x, y in zip(a, b)] + a[len(b):])

    def __mul__(self, other):
        out = [None] * (len(self.jets) + len(other.jets) - 1)
        for i, x in enumerate(self.jets):
            for j, y in enumerate(other.jets):
                t = x * y
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        return _PolyJet(out)

    def values(self):
        return [j.value for j in self.jets]


def delta_polynomial(
    src: CoefficientSource, n: int, r0, ctx: PrecisionContext | None = None
) -> RealPolynomial:
    """``delta_n(r0)`` as an explicit polynomial in the parameter.

    Requires a source that is affine in its parameter; this is checked by
    sampling it at 0, 1 and 2.  For the confined Coulomb source the result
    has degree ``n + 1``.
    """
    ctx = ctx or PrecisionContext()
    with ctx.local():
        point = to_real(r0)
        order = n + 2
        l0, s0 = src(point, order, mpfr(0))
        l1, s1 = src(point, order, mpfr(1))
        l2, s2 = src(point, order, mpfr(2))
        dl, ds = l1 - l0, s1 - s0
        tol = ctx.epsilon
        for base, slope, probe in ((l0, dl, l2), (s0, ds, s2)):
            bad = probe - base - slope * 2
            size = max(max(abs(c) for c in probe.coeffs), mpfr(1))
            if max(abs(c) for c in bad.coeffs) > tol * size:
                raise NotAffineInParameter("coefficient source is not affine in its parameter")
        lam0, sig0 = _PolyJet([l0, dl]), _PolyJet([s0, ds])
        one = Jet.constant(mpfr(1), point, order)
        lam, s = _PolyJet([one]), _PolyJet([one * 0])
        lam_prev = s_prev = None
        for _ in range(n + 1):
            k = lam.order - 1
            lam_t = lam.truncate(k)
            lam, s, lam_prev, s_prev = (
                lam.derivative() + s.truncate(k) + lam0.truncate(k) * lam_t,
                s.derivative() + sig0.truncate(k) * lam_t,
                lam,
                s,
            )
        d = _poly_values(lam, s_prev)
        e = _poly_values(s, lam_prev)
        coeffs = [x - y for x, y in _zip_pad(d, e)]
        coeffs = [c.real if isinstance(c, mpc) else c for c in coeffs]
        # the top powers of the parameter cancel exactly; what survives of
        # them is rounding noise, which would inflate the degree
        size = max(abs(c) for c in coeffs)
        while len(coeffs) > 1 and abs(coeffs[-1]) <= tol * size:
            coeffs.pop()
        return RealPolynomial(tuple(coeffs))


def _poly_values(a: _PolyJet, b: _PolyJet):
    va, vb = a.values(), b.values()
    out = [0] * (len(va) + len(vb) - 1)
    for i, x in enumerate(va):
        for j, y in enumerate(vb):
            out[i + j] += x * y
    return out


def _zip_pad(a, b):
    m = max(len(a), len(b))
    return zip(a + [0] * (m - len(a)), b + [0] * (m - len(b)))


def reconstruct_factor(
    reports: Sequence[TerminationReport], grid: Sequence, reference=1
) -> list:
    """``f(r) = C exp(-int alpha dr)`` from converged reports on a grid.

    The integral is a cumulative trapezoid over ``grid`` (ascending) and
    ``C`` is chosen so the first value equals ``reference``.
    """
    if len(reports) != len(grid):
        raise ValueError("one report per grid point is required")
    for r, rep in zip(grid, reports):
        if not rep.converged or rep.alpha is None:
            raise NotConverged(f"AIM did not converge at r = {r}")
    alphas = [rep.alpha for rep in reports]
    out = [reference]
    integral = 0
    for i in range(1, len(grid)):
        integral += (to_real(grid[i]) - to_real(grid[i - 1])) * (alphas[i] + alphas[i - 1]) / 2
        out.append(reference * gmpy2.exp(-integral))
    return out
