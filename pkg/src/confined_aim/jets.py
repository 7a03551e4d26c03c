"""Truncated Taylor expansions ("jets") at a fixed expansion point.

A jet of order N at ``point`` stores ``c_0 .. c_N`` with
``f(point + h) = sum(c_k h**k) + O(h**(N + 1))``.  Binary operations truncate
to the smaller order and refuse to mix expansion points.  Coefficients are
whatever scalar type the caller supplies (mpfr for real parameters, mpc for
complex ones); arithmetic uses the active gmpy2 context.
"""

from __future__ import annotations

import operator

from .errors import DivByZeroConstantTerm, OrderExhausted, PointMismatch, PoleAtPoint

_mul = operator.mul


class Jet:
    __slots__ = ("point", "coeffs")

    def __init__(self, point, coeffs):
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        self.point = point
        self.coeffs = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        """Value of the expanded function at the expansion point."""
        return self.coeffs[0]

    @classmethod
    def constant(cls, value, point, order: int) -> "Jet":
        zero = value * 0
        return cls(point, (value,) + (zero,) * order)

    @classmethod
    def reciprocal_affine(cls, p, q, point, order: int) -> "Jet":
        """Jet of ``r -> 1 / (p + q r)``: ``c_k = (-q)**k / (p + q point)**(k+1)``."""
        d = p + q * point
        if d == 0:
            raise PoleAtPoint(f"1/({p} + {q} r) has a pole at r = {point}")
        t = 1 / d
        ratio = -q * t
        out = [t]
        for _ in range(order):
            t = t * ratio
            out.append(t)
        return cls(point, out)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderExhausted(f"cannot raise order {self.order} to {order}")
        return Jet(self.point, self.coeffs[: order + 1])

    def _check(self, other: "Jet"):
        if other.point is not self.point and other.point != self.point:
            raise PointMismatch(f"jets expanded at {self.point} and {other.point}")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.point, map(operator.add, self.coeffs, other.coeffs))
        return Jet(self.point, (self.coeffs[0] + other,) + self.coeffs[1:])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.point, map(operator.sub, self.coeffs, other.coeffs))
        return Jet(self.point, (self.coeffs[0] - other,) + self.coeffs[1:])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(self.point, [-c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.point, [c * other for c in self.coeffs])
        self._check(other)
        n = min(len(self.coeffs), len(other.coeffs))
        a = self.coeffs
        rb = other.coeffs[n - 1 :: -1]
        # c_i = sum_k a_k b_{i-k}; rb[n-1-i:] lines b_i .. b_0 up against a_0 .. a_i
        return Jet(
            self.point,
            [sum(map(_mul, a[: i + 1], rb[n - 1 - i :])) for i in range(n)],
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.point, [c / other for c in self.coeffs])
        self._check(other)
        b = other.coeffs
        if b[0] == 0:
            raise DivByZeroConstantTerm("divisor jet vanishes at the expansion point")
        n = min(len(self.coeffs), len(b))
        a = self.coeffs
        inv_b0 = 1 / b[0]
        out = []
        for i in range(n):
            acc = a[i] - sum(map(_mul, out[:i], b[i:0:-1])) if i else a[0]
            out.append(acc * inv_b0)
        return Jet(self.point, out)

    def derivative(self) -> "Jet":
        if self.order == 0:
            raise OrderExhausted("derivative of an order-0 jet")
        return Jet(self.point, [k * c for k, c in enumerate(self.coeffs) if k])

    def evaluate(self, h):
        """Truncated series at offset ``h`` from the expansion point."""
        acc = self.coeffs[-1] * 0
        for c in reversed(self.coeffs):
            acc = acc * h + c
        return acc

    def __repr__(self):
        return f"Jet(point={self.point}, coeffs={list(self.coeffs)})"


def jet_of_reciprocal_affine(p, q, point, order: int) -> Jet:
    return Jet.reciprocal_affine(p, q, point, order)


def jet_ring_ops(a: Jet, b: Jet, op: str) -> Jet:
    ops = {"add": operator.add, "sub": operator.sub, "mul": operator.mul}
    return ops[op](a, b)


def jet_div(a: Jet, b: Jet) -> Jet:
    return a / b


def jet_derivative(a: Jet) -> Jet:
    return a.derivative()

