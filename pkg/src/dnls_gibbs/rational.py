"""Exact complex rationals.

Real values are kept as plain :class:`fractions.Fraction`; a :class:`QQi` only
exists when the imaginary part is nonzero.  This keeps the real-coefficient
hot path (the a, b hierarchy) on ``Fraction`` arithmetic alone.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

__all__ = ["QQi", "as_exact", "make", "real_part", "imag_part", "to_complex", "format_coeff", "parse_coeff"]


class QQi:
    """Complex rational ``re + im*i`` with ``im != 0``."""

    __slots__ = ("re", "im")

    def __init__(self, re_: Fraction, im: Fraction):
        self.re = re_
        self.im = im

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"

    def __add__(self, other):
        if isinstance(other, QQi):
            return make(self.re + other.re, self.im + other.im)
        if isinstance(other, Rational):
            return QQi(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, QQi):
            return make(self.re - other.re, self.im - other.im)
        if isinstance(other, Rational):
            return QQi(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Rational):
            return QQi(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, QQi):
            return make(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)
        if isinstance(other, Rational):
            return make(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            return make(self.re / other, self.im / other)
        if isinstance(other, QQi):
            den = other.re * other.re + other.im * other.im
            return make((self.re * other.re + self.im * other.im) / den,
                        (self.im * other.re - self.re * other.im) / den)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Rational):
            den = self.re * self.re + self.im * self.im
            return make(other * self.re / den, -other * self.im / den)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (Rational, complex, float)):
            return False if not isinstance(other, complex) else complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return QQi(self.re, -self.im)


def make(re_, im) -> Fraction | QQi:
    if im == 0:
        return Fraction(re_)
    return QQi(Fraction(re_), Fraction(im))


def as_exact(x) -> Fraction | QQi:
    """Coerce ints, Fractions, QQi and exact-valued complex numbers."""
    if isinstance(x, QQi):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, complex):
        return make(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


def real_part(c) -> Fraction:
    return c.re if isinstance(c, QQi) else c


def imag_part(c) -> Fraction:
    return c.im if isinstance(c, QQi) else Fraction(0)


def to_complex(c) -> complex:
    return complex(c) if isinstance(c, QQi) else complex(float(c), 0.0)


def format_coeff(c) -> str:
    r, i = real_part(c), imag_part(c)
    return f"({r.numerator}/{r.denominator})+({i.numerator}/{i.denominator})i"


_COEFF = re.compile(r"^\((-?\d+)/(\d+)\)\+\((-?\d+)/(\d+)\)i$")


def parse_coeff(text: str) -> Fraction | QQi:
    m = _COEFF.match(text)
    if m is None:
        raise ValueError(f"malformed coefficient {text!r}")
    p, q, r, s = (int(g) for g in m.groups())
    return make(Fraction(p, q), Fraction(r, s))
