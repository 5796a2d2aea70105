"""Truncated Taylor arithmetic.

``Jet`` holds normalized Taylor coefficients ``c[p] = f^(p)(s) / p!`` of a
function at a batch of points (trailing axes), so derivative stacks of
compositions such as ``4 arctan(exp(z))`` come out exact to working precision.
``BiJet`` is the two-variable analogue truncated at a total degree, used for
corner jets in (x, t).
"""
from __future__ import annotations

import math

import numpy as np


class Jet:
    """Univariate truncated Taylor series, vectorized over trailing axes."""

    __array_priority__ = 1000

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)

    @classmethod
    def variable(cls, s, order):
        s = np.asarray(s, dtype=float)
        c = np.zeros((order + 1,) + s.shape)
        c[0] = s
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order, shape=()):
        c = np.zeros((order + 1,) + tuple(shape), dtype=np.result_type(value, float))
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    def derivatives(self):
        """Return ``f^(p)`` for p = 0..order (stacked on axis 0)."""
        fact = np.array([math.factorial(p) for p in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        c = np.zeros_like(self.c, dtype=np.result_type(self.c, other))
        c[0] = other
        return Jet(c)

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.c + other.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        n = self.order
        out = np.zeros(np.broadcast_shapes(self.c.shape, other.c.shape),
                       dtype=np.result_type(self.c, other.c))
        for p in range(n + 1):
            acc = self.c[0] * other.c[p]
            for q in range(1, p + 1):
                acc = acc + self.c[q] * other.c[p - q]
            out[p] = acc
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        out = np.zeros_like(a, dtype=np.result_type(a, float))
        out[0] = 1.0 / a[0]
        for p in range(1, self.order + 1):
            acc = 0.0
            for q in range(1, p + 1):
                acc = acc + a[q] * out[p - q]
            out[p] = -acc / a[0]
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Jet.constant(1.0, self.order, self.c.shape[1:])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derivative(self):
        """Jet of f' (one order shorter, zero padded to keep the shape)."""
        out = np.zeros_like(self.c)
        for p in range(self.order):
            out[p] = (p + 1) * self.c[p + 1]
        return Jet(out)

    def _integrate(self, value0):
        # antiderivative with prescribed constant term; drops the top coefficient
        out = np.zeros_like(self.c, dtype=np.result_type(self.c, value0))
        out[0] = value0
        for p in range(1, self.order + 1):
            out[p] = self.c[p - 1] / p
        return Jet(out)


def exp(f: Jet) -> Jet:
    a = f.c
    out = np.zeros_like(a, dtype=np.result_type(a, float))
    out[0] = np.exp(a[0])
    for p in range(1, f.order + 1):
        acc = 0.0
        for q in range(1, p + 1):
            acc = acc + q * a[q] * out[p - q]
        out[p] = acc / p
    return Jet(out)


def sincos(f: Jet):
    a = f.c
    s = np.zeros_like(a, dtype=np.result_type(a, float))
    c = np.zeros_like(s)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for p in range(1, f.order + 1):
        acc_s = 0.0
        acc_c = 0.0
        for q in range(1, p + 1):
            acc_s = acc_s + q * a[q] * c[p - q]
            acc_c = acc_c + q * a[q] * s[p - q]
        s[p] = acc_s / p
        c[p] = -acc_c / p
    return Jet(s), Jet(c)


def sin(f: Jet) -> Jet:
    return sincos(f)[0]


def cos(f: Jet) -> Jet:
    return sincos(f)[1]


def arctan(f: Jet) -> Jet:
    g = (1.0 + f * f).reciprocal() * f.derivative()
    return g._integrate(np.arctan(f.c[0]))


def sech(f: Jet) -> Jet:
    """sech evaluated as 2w/(1+w^2), w = exp(-|z|), to avoid overflow."""
    sgn = np.where(np.real(f.c[0]) >= 0, 1.0, -1.0)
    w = exp(f * (-sgn))
    return 2.0 * w / (1.0 + w * w)


def kink_angle(f: Jet) -> Jet:
    """Jet of ``4 arctan(exp(z))``, using d/dz = 2 sech(z)."""
    z0 = f.c[0]
    e = np.exp(-np.abs(z0))
    value = np.where(z0 >= 0, 2 * np.pi - 4 * np.arctan(e), 4 * np.arctan(e))
    g = 2.0 * sech(f) * f.derivative()
    return g._integrate(value)


class BiJet:
    """Bivariate Taylor polynomial ``sum c[j, i] t^j x^i`` truncated at total degree."""

    def __init__(self, coeffs, degree):
        self.c = np.asarray(coeffs, dtype=float)
        self.degree = degree
        jj, ii = np.indices(self.c.shape)
        self.c = np.where(jj + ii <= degree, self.c, 0.0)

    @classmethod
    def zeros(cls, degree):
        return cls(np.zeros((degree + 1, degree + 1)), degree)

    def __add__(self, other):
        if isinstance(other, BiJet):
            return BiJet(self.c + other.c, self.degree)
        c = self.c.copy()
        c[0, 0] += other
        return BiJet(c, self.degree)

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, BiJet):
            return BiJet(self.c * other, self.degree)
        d = self.degree
        out = np.zeros_like(self.c)
        for j in range(d + 1):
            for i in range(d + 1 - j):
                a = self.c[j, i]
                if a == 0.0:
                    continue
                out[j:, i:] += a * other.c[: d + 1 - j, : d + 1 - i]
        return BiJet(out, d)

    __rmul__ = __mul__

    def sincos(self):
        """sin/cos by composing the scalar series with the non-constant part."""
        c0 = self.c[0, 0]
        p = BiJet(self.c.copy(), self.degree)
        p.c[0, 0] = 0.0
        # sin(p), cos(p) as power series in p; p has no constant term so degree terminates
        sin_p = BiJet.zeros(self.degree)
        cos_p = BiJet.zeros(self.degree) + 1.0
        power = BiJet.zeros(self.degree) + 1.0
        for n in range(1, self.degree + 1):
            power = power * p
            coef = 1.0 / math.factorial(n)
            if n % 2 == 1:
                sin_p = sin_p + power * (coef * (-1) ** ((n - 1) // 2))
            else:
                cos_p = cos_p + power * (coef * (-1) ** (n // 2))
        s = sin_p * math.cos(c0) + cos_p * math.sin(c0)
        c = cos_p * math.cos(c0) + sin_p * (-math.sin(c0))
        return s, c
