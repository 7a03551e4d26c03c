"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class AIMError(Exception):
    """Base class for all errors raised by confined_aim."""


# numerics


class NoSignChange(AIMError, ValueError):
    """A bracket does not enclose a sign change."""


class NoConvergence(AIMError, ArithmeticError):
    """An iteration exhausted its budget without meeting its tolerance."""


class DivergedIterate(NoConvergence):
    """An iterate left the configured trust interval."""


class EmptyInterval(AIMError, ValueError):
    pass


# jets


class PoleAtPoint(AIMError, ZeroDivisionError):
    """The expansion point sits on a singularity of the expanded function."""


class PointMismatch(AIMError, ValueError):
    pass


class DivByZeroConstantTerm(AIMError, ZeroDivisionError):
    pass


class OrderExhausted(AIMError, ValueError):
    """A jet has no coefficients left to differentiate."""


# engine


class NumericOverflow(AIMError, OverflowError):
    pass


class NoRootInBracket(AIMError, ValueError):
    pass


class NotStabilized(NoConvergence):
    """Roots at successive iteration counts keep drifting."""


class CrossAxisResidualTooLarge(NoConvergence):
    pass


class NotAffineInParameter(AIMError, ValueError):
    pass


class NotConverged(AIMError, ValueError):
    pass


# physics layer


class ExpansionPointOutOfDomain(AIMError, ValueError):
    pass


class NotOnAxis(AIMError, ValueError):
    """A spectral parameter is neither real nor purely imaginary."""


class IndexOutOfRange(AIMError, IndexError):
    pass


class OutOfBox(AIMError, ValueError):
    pass


class StateNotFound(AIMError, LookupError):
    pass


# shooting oracle


class StepUnderflow(AIMError, ValueError):
    pass


class BracketNotFound(AIMError, LookupError):
    pass


class DomainTooSmall(AIMError, ValueError):
    pass
