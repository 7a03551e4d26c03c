"""Configurable-precision scalars, 1-D root finders and polynomial real roots.

All multi-precision arithmetic runs on gmpy2 (MPFR/MPC).  Precision is
selected in decimal digits through :class:`PrecisionContext`; every public
routine that computes accepts one and activates it for the duration of the
call, so callers never touch the global gmpy2 context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import DivergedIterate, EmptyInterval, NoConvergence, NoSignChange

DEFAULT_DIGITS = 50
GUARD_BITS = 16


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in decimal digits.

    ``epsilon`` (``10**(5 - digits)``) is the acceptance scale for residuals:
    five digits are set aside for cancellation in the iterations.
    """

    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 16:
            raise ValueError(f"digits must be an integer >= 16, got {self.digits!r}")

    @property
    def bits(self) -> int:
        return math.ceil(self.digits * math.log2(10)) + GUARD_BITS

    @property
    def epsilon(self) -> mpfr:
        with self.local():
            return mpfr(10) ** (5 - self.digits)

    def local(self):
        """Context manager activating this precision for gmpy2 arithmetic."""
        return gmpy2.context(gmpy2.get_context(), precision=self.bits)

    def escalated(self, factor: int = 2) -> "PrecisionContext":
        return PrecisionContext(self.digits * factor)

    def real(self, x) -> mpfr:
        with self.local():
            return to_real(x)

    def complex(self, x) -> mpc:
        with self.local():
            return to_complex(x)


def to_real(x) -> mpfr:
    """Convert ``x`` to an mpfr at the active precision.

    Floats go through their shortest decimal repr, so ``2.2`` means the
    decimal 2.2 and not the nearest binary double.  Strings and Fractions are
    converted exactly up to rounding.
    """
    if isinstance(x, float):
        return mpfr(repr(x))
    if isinstance(x, Fraction):
        return mpfr(gmpy2.mpq(x.numerator, x.denominator))
    if isinstance(x, (mpc, complex)):
        raise TypeError(f"expected a real scalar, got {x!r}")
    return mpfr(x)


def to_complex(x) -> mpc:
    if isinstance(x, complex):
        return mpc(to_real(x.real), to_real(x.imag))
    if isinstance(x, mpc):
        return mpc(x)
    return mpc(to_real(x), 0)


def sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Bracket:
    lo: mpfr
    hi: mpfr
    f_lo: mpfr
    f_hi: mpfr

    def __post_init__(self):
        if not self.lo < self.hi:
            raise NoSignChange(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if sign(self.f_lo) * sign(self.f_hi) > 0:
            raise NoSignChange(
                f"f has the same sign at both ends of [{self.lo}, {self.hi}]"
            )

    @classmethod
    def around(cls, f: Callable, lo, hi) -> "Bracket":
        lo, hi = to_real(lo), to_real(hi)
        return cls(lo, hi, f(lo), f(hi))

    @property
    def width(self) -> mpfr:
        return self.hi - self.lo


def polish_root_secant(
    f: Callable,
    x0,
    x1,
    tol,
    *,
    max_iter: int = 100,
    trust: tuple | None = None,
    f0=None,
    f1=None,
    noise_floor=None,
):
    """Secant iteration from seeds ``x0``, ``x1`` until ``|dx| <= tol``.

    ``trust`` is an optional ``(lo, hi)`` interval; an iterate leaving it
    raises :class:`DivergedIterate`.  Already known ``f0``/``f1`` values may be
    passed to save evaluations.

    ``noise_floor`` accepts the iterate once ``|dx|`` is below the floor but
    no longer shrinking, i.e. when ``f`` is dominated by rounding noise.
    """
    if x0 == x1:
        raise ValueError("secant seeds must differ")
    f0 = f(x0) if f0 is None else f0
    f1 = f(x1) if f1 is None else f1
    last_step = None
    for _ in range(max_iter):
        if f1 == 0:
            return x1
        if f1 == f0:
            if noise_floor is not None and abs(x1 - x0) <= noise_floor:
                return x1
            raise NoConvergence(f"secant stalled at x={x1} (flat function values)")
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not gmpy2.is_finite(x2):
            raise NoConvergence("secant produced a non-finite iterate")
        if trust is not None and not trust[0] <= x2 <= trust[1]:
            raise DivergedIterate(f"secant iterate {x2} left [{trust[0]}, {trust[1]}]")
        step = abs(x2 - x1)
        if step <= tol:
            return x2
        if (
            noise_floor is not None
            and last_step is not None
            and step <= noise_floor
            and step > last_step / 2
        ):
            return x2
        last_step = step
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
    raise NoConvergence(f"secant did not reach tol={tol} in {max_iter} iterations")


def bracket_root(
    f: Callable, bracket: Bracket, tol, *, ftol=None, max_iter: int = 100_000
):
    """Bisection down to a narrow bracket, then a secant polish.

    Returns ``x`` with ``|f(x)| <= ftol`` (default ``tol``) or a final bracket
    no wider than ``tol``.  If the secant step wanders outside the bracket the
    bisection simply continues.
    """
    ftol = tol if ftol is None else ftol
    lo, hi, flo, fhi = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    switch = max(tol, (hi - lo) * mpfr(2) ** -12)
    polished = False
    for _ in range(max_iter):
        width = hi - lo
        if width <= tol:
            return lo + width / 2
        if width <= switch and not polished:
            polished = True
            try:
                x = polish_root_secant(
                    f, lo, hi, tol, f0=flo, f1=fhi, trust=(lo, hi), max_iter=60
                )
            except NoConvergence:
                pass
            else:
                return x
        mid = lo + width / 2
        fm = f(mid)
        if fm == 0 or abs(fm) <= ftol:
            return mid
        if sign(fm) == sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    raise NoConvergence(f"bisection budget exhausted at width {hi - lo}")


@dataclass(frozen=True)
class RealPolynomial:
    """Polynomial with coefficients in ascending degree.

    Trailing exact zeros are stripped, so ``degree`` is ``len(coefficients) - 1``
    and the leading coefficient is nonzero (the zero polynomial keeps a single
    0 coefficient and has degree -1).
    """

    coefficients: tuple

    def __post_init__(self):
        cs = list(self.coefficients)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coefficients", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Sequence, leading=1) -> "RealPolynomial":
        p = cls((leading,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        if len(self.coefficients) == 1 and self.coefficients[0] == 0:
            return -1
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def magnitude(self, x):
        """Sum of ``|c_k x^k|``; the natural scale for judging ``p(x) == 0``."""
        acc = 0
        ax = abs(x)
        for c in reversed(self.coefficients):
            acc = acc * ax + abs(c)
        return acc

    def derivative(self) -> "RealPolynomial":
        cs = self.coefficients
        if len(cs) == 1:
            return RealPolynomial((0,))
        return RealPolynomial(tuple(k * cs[k] for k in range(1, len(cs))))

    def __mul__(self, other):
        if not isinstance(other, RealPolynomial):
            return RealPolynomial(tuple(c * other for c in self.coefficients))
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return RealPolynomial(tuple(out))

    __rmul__ = __mul__

    def __neg__(self):
        return RealPolynomial(tuple(-c for c in self.coefficients))

    def normalized(self) -> "RealPolynomial":
        """Scaled so the leading coefficient is positive (roots unchanged)."""
        return -self if self.leading < 0 else self


def real_roots(
    p: RealPolynomial,
    interval,
    ctx: PrecisionContext | None = None,
    *,
    multiplicity: bool = False,
):
    """All real roots of ``p`` in the open ``interval``, ascending.

    Roots are isolated between consecutive critical points (the real roots of
    ``p'``, found recursively): ``p`` is monotone there, so each piece holds at
    most one root and a sign test decides.  A critical point where ``p``
    vanishes to working precision is a multiple root.  With
    ``multiplicity=True`` the result is a list of ``(root, multiplicity)``.
    """
    ctx = ctx or PrecisionContext()
    with ctx.local():
        lo, hi = to_real(interval[0]), to_real(interval[1])
        if not lo < hi:
            raise EmptyInterval(f"empty interval ({lo}, {hi})")
        if p.degree < 0:
            raise ValueError("the zero polynomial has no isolated roots")
        q = RealPolynomial(tuple(to_real(c) for c in p.coefficients))
        found = _isolate(q, lo, hi, ctx)
    return found if multiplicity else [r for r, _ in found]


def _isolate(p: RealPolynomial, lo, hi, ctx: PrecisionContext):
    if p.degree <= 0:
        return []
    if p.degree == 1:
        r = -p.coefficients[0] / p.coefficients[1]
        return [(r, 1)] if lo < r < hi else []

    eps = ctx.epsilon
    crit = _isolate(p.derivative(), lo, hi, ctx)
    roots = []
    points = [(lo, None)]
    for c, mult in crit:
        if abs(p(c)) <= eps * p.magnitude(c):
            roots.append((c, mult + 1))
            points.append((c, 0))
        else:
            points.append((c, None))
    points.append((hi, None))

    values = [p(x) if v is None else v for x, v in points]
    for (a, _), (b, _), fa, fb in zip(points, points[1:], values, values[1:]):
        if fa == 0 or fb == 0 or sign(fa) == sign(fb):
            continue
        tol = mpfr(10) ** (-ctx.digits) * max(abs(a), abs(b), mpfr(1))
        r = bracket_root(p, Bracket(a, b, fa, fb), tol, ftol=mpfr(0))
        roots.append((r, 1))
    # an endpoint root with an exact zero value sits on the boundary: excluded
    return sorted(roots, key=lambda t: t[0])
