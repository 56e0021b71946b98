"""Exact arithmetic in Q(sqrt2) and the two scalar backends.

Every pointwise fiber computation runs either over :class:`ExactScalar`
(zero tolerance) or over plain floats. Code elsewhere in the package never
branches on the backend beyond the helpers at the bottom of this module.
"""
from __future__ import annotations

import math
import numbers
import re
from fractions import Fraction
from functools import total_ordering

from .errors import InputError, ScalarDivisionError

Rational = int | Fraction

_TERM = re.compile(r"[+-]?[^+-]+")


def rational_sqrt(q: Rational) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def rational_root(q: Rational, n: int) -> Fraction | None:
    """Exact positive n-th root of a positive rational, or None."""
    q = Fraction(q)
    if q <= 0:
        return None

    def iroot(k: int) -> int | None:
        r = round(k ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == k:
                return cand
        return None

    rn, rd = iroot(q.numerator), iroot(q.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else "{}/{}".format(q.numerator, q.denominator)


@total_ordering
class ExactScalar:
    """The number ``rat_part + sqrt2_part * sqrt(2)`` with rational parts."""

    __slots__ = ("_a", "_b")

    def __init__(self, a: Rational = 0, b: Rational = 0) -> None:
        self._a = Fraction(a)
        self._b = Fraction(b)

    @property
    def rat_part(self) -> Fraction:
        return self._a

    @property
    def sqrt2_part(self) -> Fraction:
        return self._b

    @classmethod
    def coerce(cls, x) -> ExactScalar:
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, numbers.Rational):
            return cls(x, 0)
        raise TypeError("cannot use {!r} as an exact scalar".format(x))

    @classmethod
    def parse(cls, text: str) -> ExactScalar:
        """Read the text form ``p/q+r/s*sqrt2`` (whitespace ignored)."""
        compact = "".join(str(text).split())
        if not compact:
            raise InputError("empty scalar")
        a = Fraction(0)
        b = Fraction(0)
        for term in _TERM.findall(compact):
            try:
                if term.endswith("sqrt2"):
                    coeff = term[: -len("sqrt2")]
                    if coeff.endswith("*"):
                        coeff = coeff[:-1]
                    if coeff in ("", "+"):
                        b += 1
                    elif coeff == "-":
                        b -= 1
                    else:
                        b += Fraction(coeff)
                else:
                    a += Fraction(term)
            except (ValueError, ZeroDivisionError):
                raise InputError("malformed scalar {!r}".format(text)) from None
        return cls(a, b)

    def __repr__(self) -> str:
        return "ExactScalar({}, {})".format(_fmt(self._a), _fmt(self._b))

    def __str__(self) -> str:
        if self._b == 0:
            return _fmt(self._a)
        if self._a == 0:
            return "{}*sqrt2".format(_fmt(self._b))
        sign = "+" if self._b > 0 else ""
        return "{}{}{}*sqrt2".format(_fmt(self._a), sign, _fmt(self._b))

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ExactScalar):
            return self._a == other._a and self._b == other._b
        if isinstance(other, numbers.Rational):
            return self._b == 0 and self._a == Fraction(other)
        if isinstance(other, float):
            return float(self) == other
        return NotImplemented

    def sign(self) -> int:
        a, b = self._a, self._b
        if a >= 0 and b >= 0:
            return 0 if (a == 0 and b == 0) else 1
        if a <= 0 and b <= 0:
            return -1
        # mixed signs: compare a^2 with 2 b^2
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def __lt__(self, other) -> bool:
        if isinstance(other, float):
            return float(self) < other
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __add__(self, other):
        if isinstance(other, ExactScalar):
            return ExactScalar(self._a + other._a, self._b + other._b)
        if isinstance(other, numbers.Rational):
            return ExactScalar(self._a + Fraction(other), self._b)
        if isinstance(other, float):
            return float(self) + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self._a, -self._b)

    def __pos__(self) -> ExactScalar:
        return self

    def __sub__(self, other):
        if isinstance(other, (ExactScalar, numbers.Rational, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExactScalar):
            return ExactScalar(self._a * other._a + 2 * self._b * other._b,
                               self._a * other._b + self._b * other._a)
        if isinstance(other, numbers.Rational):
            other = Fraction(other)
            return ExactScalar(self._a * other, self._b * other)
        if isinstance(other, float):
            return float(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def conj(self) -> ExactScalar:
        return ExactScalar(self._a, -self._b)

    @property
    def norm(self) -> Fraction:
        """Field norm a^2 - 2 b^2, i.e. x * conj(x)."""
        return self._a * self._a - 2 * self._b * self._b

    def inv(self) -> ExactScalar:
        n = self.norm
        if n == 0:
            raise ScalarDivisionError("division by zero in Q(sqrt2)")
        c = self.conj()
        return ExactScalar(c._a / n, c._b / n)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        return ExactScalar.coerce(other) * self.inv()

    def __pow__(self, n: int) -> ExactScalar:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        result = ExactScalar(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self) -> ExactScalar:
        return -self if self.sign() < 0 else self

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * math.sqrt(2.0)

    def to_float(self) -> float:
        return float(self)

    def is_rational(self) -> bool:
        return self._b == 0

    def sqrt(self) -> ExactScalar | None:
        """Nonnegative square root inside Q(sqrt2), or None if there is none."""
        if self.sign() < 0:
            return None
        if not self:
            return ExactScalar(0)
        a, b = self._a, self._b
        if b == 0:
            r = rational_sqrt(a)
            if r is not None:
                return ExactScalar(r)
            r = rational_sqrt(a / 2)
            return None if r is None else ExactScalar(0, r)
        disc = rational_sqrt(a * a - 2 * b * b)
        if disc is None:
            return None
        for p_sq in ((a + disc) / 2, (a - disc) / 2):
            p = rational_sqrt(p_sq)
            if p is None or p == 0:
                continue
            root = ExactScalar(p, b / (2 * p))
            if root.sign() < 0:
                root = -root
            if root * root == self:
                return root
        return None


SQRT2 = ExactScalar(0, 1)

# backend helpers


def to_float(x) -> float:
    return float(x)


def lift(x, backend: str):
    """Bring an int, Fraction, ExactScalar or float into ``backend``."""
    if backend == "float":
        return float(x)
    if isinstance(x, float):
        raise InputError("float literal {!r} in the exact backend".format(x))
    return ExactScalar.coerce(x)


def sqrt2(backend: str):
    return math.sqrt(2.0) if backend == "float" else SQRT2


def zero(backend: str):
    return 0.0 if backend == "float" else ExactScalar(0)


def one(backend: str):
    return 1.0 if backend == "float" else ExactScalar(1)


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, (ExactScalar, numbers.Rational)):
        return x == 0
    return abs(x) <= tol


def sign_of(x, tol: float = 0.0) -> int:
    if isinstance(x, ExactScalar):
        return x.sign()
    if isinstance(x, numbers.Rational):
        return (x > 0) - (x < 0)
    if abs(x) <= tol:
        return 0
    return 1 if x > 0 else -1


def scalar_sqrt(x):
    """Square root in the backend of ``x``; None when no exact root exists."""
    if isinstance(x, (ExactScalar, numbers.Rational)):
        return ExactScalar.coerce(x).sqrt()
    return math.sqrt(x) if x >= 0 else None


def backend_of(*values) -> str:
    for v in values:
        if isinstance(v, float):
            return "float"
    return "exact"
