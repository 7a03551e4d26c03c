"""Shooting-method oracle: direct RK4 integration of the radial equation.

    u'' = [l(l+1)/r**2 - A/r - E] u,     u(0) = u(R) = 0

The integration starts slightly off the origin from the regular Frobenius
series ``u = r**(l+1) (1 + c_1 r + c_2 r**2 + ...)`` and runs on a uniform
grid to ``R``.  Everything is in double precision; this module shares no code
with the AIM path and is meant to certify its results to ~10 digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import BracketNotFound, DomainTooSmall, StepUnderflow

START_FRACTION = 0.02


@dataclass(frozen=True)
class IntegrationConfig:
    """Grid settings.

    ``start_offset`` is where the series start hands over to RK4; ``None``
    means ``START_FRACTION * R``.  A start offset that is a fixed fraction of
    the box keeps the RK4 grid clear of the ``1/r**2`` region, which is what
    gives clean fourth-order convergence under step doubling.
    """

    steps: int = 4000
    method: str = "rk4"
    start_offset: float | None = None

    def __post_init__(self):
        if self.steps < 1000:
            raise ValueError("steps must be >= 1000")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}")

    def offset(self, R: float) -> float:
        return START_FRACTION * R if self.start_offset is None else self.start_offset


@dataclass(frozen=True)
class OracleResult:
    E: float
    nodes: int
    boundary_residual: float


def _series_start(r: float, E: float, l: int, A: float):
    """Frobenius series of the regular solution and its derivative at ``r``."""
    c_prev2, c_prev = 0.0, 1.0
    u = r ** (l + 1)
    du = (l + 1) * r**l
    small = 0
    for k in range(1, 400):
        c = (-A * c_prev - E * c_prev2) / (k * (k + 2 * l + 1))
        t = c * r ** (k + l + 1)
        u += t
        du += c * (k + l + 1) * r ** (k + l)
        # the recurrence has two-term memory, so wait for two tiny terms
        small = small + 1 if abs(t) <= 1e-18 * abs(u) else 0
        if small >= 2:
            break
        c_prev2, c_prev = c_prev, c
    return u, du


def _shoot(E: float, l: int, A: float, R: float, cfg: IntegrationConfig, record=None):
    r = cfg.offset(R)
    if not 0 < r < R:
        raise StepUnderflow(f"start offset {r} outside (0, {R})")
    h = (R - r) / cfg.steps
    if h <= 0 or r + h == r:
        raise StepUnderflow(f"step {h} underflows at r = {r}")
    ll = l * (l + 1)
    u, v = _series_start(r, E, l, A)
    umax = abs(u)
    nodes = 0
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(cfg.steps):
        rm = r + half
        rn = r + h
        k1u = v
        k1v = (ll / (r * r) - A / r - E) * u
        qm = ll / (rm * rm) - A / rm - E
        k2u = v + half * k1v
        k2v = qm * (u + half * k1u)
        k3u = v + half * k2v
        k3v = qm * (u + half * k2u)
        k4u = v + h * k3v
        k4v = (ll / (rn * rn) - A / rn - E) * (u + h * k3u)
        un = u + sixth * (k1u + 2 * k2u + 2 * k3u + k4u)
        v += sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        if record is not None:
            record.append((rn, un, v))
        if (un < 0 < u) or (u < 0 < un):
            nodes += 1
        u = un
        r = rn
        if abs(u) > umax:
            umax = abs(u)
    return u, nodes, umax


def integrate_radial(E: float, l: int, A: float, R: float, cfg: IntegrationConfig | None = None):
    """Integrate outward to ``R``; returns ``(u(R), interior_nodes)``.

    Sign changes between grid points count as nodes; one in the very last
    interval is the boundary zero approaching ``R`` and is not counted.
    """
    cfg = cfg or IntegrationConfig()
    u, nodes, _, last = _shoot_nodes(E, l, A, R, cfg)
    return u, nodes


def _shoot_nodes(E, l, A, R, cfg):
    rec = []
    u, total, umax = _shoot(float(E), l, float(A), float(R), cfg, record=rec)
    interior = total
    if len(rec) >= 2:
        u_prev = rec[-2][1]
        if (u < 0 < u_prev) or (u_prev < 0 < u):
            interior -= 1
    return u, interior, umax, total


def _count(E, l, A, R, cfg) -> int:
    # all sign changes on (0, R], monotone nondecreasing in E (Sturm)
    return _shoot(E, l, A, R, cfg)[1]


def oracle_energy(R, state, A=2.0, cfg: IntegrationConfig | None = None) -> OracleResult:
    """Eigenvalue of ``state`` (``(n, l)``, n = 1 + nodes) in a box of radius R.

    The node count of ``u`` on ``(0, R]`` jumps from ``n - 1`` to ``n``
    exactly at ``E_n``; that jump is bracketed by bisection on the count, then
    ``u(R; E)`` is root-found inside the bracket with Brent's method.
    """
    cfg = cfg or IntegrationConfig()
    n, l = _state(state)
    R, A = float(R), float(A)
    if R <= 0 or A < 0:
        raise ValueError("R must be positive and A non-negative")

    lo = -(A * A) / (4.0 * (l + 1) ** 2) - 1.0
    if _count(lo, l, A, R, cfg) > n - 1:
        raise BracketNotFound(f"lower energy {lo} already has too many nodes")
    hi = max(1.0, (math.pi * (n + l) / R) ** 2)
    for _ in range(200):
        if _count(hi, l, A, R, cfg) >= n:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketNotFound("no upper energy bound with enough nodes")
    c_lo, c_hi = _count(lo, l, A, R, cfg), _count(hi, l, A, R, cfg)
    for _ in range(200):
        if c_lo == n - 1 and c_hi == n:
            break
        mid = 0.5 * (lo + hi)
        c = _count(mid, l, A, R, cfg)
        if c >= n:
            hi, c_hi = mid, c
        else:
            lo, c_lo = mid, c
    else:
        raise BracketNotFound(f"could not isolate state n={n} between {lo} and {hi}")

    f = lambda E: _shoot(E, l, A, R, cfg)[0]
    E = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    u, nodes, umax, _ = _shoot_nodes(E, l, A, R, cfg)
    return OracleResult(E, nodes, abs(u) / umax if umax else 0.0)


def _state(state):
    if hasattr(state, "n") and hasattr(state, "l"):
        return int(state.n), int(state.l)
    n, l = state
    return int(n), int(l)


def oracle_critical_radii(
    l: int, count: int, A: float = 2.0, cfg: IntegrationConfig | None = None, r_max: float | None = None
) -> list[float]:
    """First ``count`` radii at which the ``E = 0`` solution vanishes.

    A box of radius ``R`` has a zero-energy state exactly when ``u(R) = 0``
    for the outward ``E = 0`` solution, so these zeros are the critical radii
    for ``n = 1 .. count``.  Zeros are located between grid points and
    refined on the cubic Hermite interpolant.  Without ``r_max`` the range is
    grown until enough zeros are found.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    cfg = cfg or IntegrationConfig()
    A = float(A)
    auto = r_max is None
    # E = 0 zeros grow like (k + l)**2 / A
    R = float(r_max) if r_max is not None else 2.0 * (count + l + 1) ** 2 / A + 5.0
    start = cfg.offset(R) if cfg.start_offset is not None else min(0.02, 0.002 * R)
    run_cfg = IntegrationConfig(cfg.steps * max(1, int(R // 8)), cfg.method, start)
    for _ in range(8):
        zeros = _zeros_at_zero_energy(l, A, R, run_cfg, count)
        if len(zeros) >= count:
            return zeros[:count]
        if not auto:
            raise DomainTooSmall(f"only {len(zeros)} zeros of u below r_max={R}")
        R *= 2.0
        run_cfg = IntegrationConfig(cfg.steps * max(1, int(R // 8)), cfg.method, start)
    raise DomainTooSmall(f"fewer than {count} zeros below r = {R}")


def _zeros_at_zero_energy(l, A, R, cfg, count):
    r0 = cfg.offset(R)
    u0, v0 = _series_start(r0, 0.0, l, A)
    rec = [(r0, u0, v0)]
    _shoot(0.0, l, A, R, cfg, record=rec)
    zeros = []
    for (ra, ua, va), (rb, ub, vb) in zip(rec, rec[1:]):
        if ua == 0.0:
            zeros.append(ra)
        elif (ua < 0 < ub) or (ub < 0 < ua):
            zeros.append(_hermite_zero(ra, ua, va, rb, ub, vb))
        if len(zeros) >= count:
            break
    return zeros


def _hermite_zero(ra, ua, va, rb, ub, vb):
    h = rb - ra

    def p(r):
        t = (r - ra) / h
        h00 = 2 * t**3 - 3 * t**2 + 1
        h10 = t**3 - 2 * t**2 + t
        h01 = -2 * t**3 + 3 * t**2
        h11 = t**3 - t**2
        return h00 * ua + h10 * h * va + h01 * ub + h11 * h * vb

    return brentq(p, ra, rb, xtol=1e-15, rtol=1e-15)
