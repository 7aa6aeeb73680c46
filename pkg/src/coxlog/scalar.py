"""Exact scalars in Q or a real quadratic field Q(sqrt d)."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Number = Union[int, Fraction, "ExactScalar"]


def is_squarefree(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def common_field(d1: int, d2: int) -> int:
    """Discriminant of the smallest supported field holding both operands."""
    if d1 == 0 or d1 == d2:
        return d2
    if d2 == 0:
        return d1
    raise ValueError(f"cannot combine Q(sqrt {d1}) with Q(sqrt {d2})")


@total_ordering
class ExactScalar:
    """The number ``rational + surd * sqrt(d)``.

    Immutable.  An element whose surd part vanishes is stored with ``d = 0``
    so equal values always compare and hash equal.
    """

    __slots__ = ("rational", "surd", "d")

    def __init__(self, rational: int | Fraction = 0, surd: int | Fraction = 0, d: int = 0) -> None:
        rational = Fraction(rational)
        surd = Fraction(surd)
        if d < 0 or (d > 0 and not is_squarefree(d)):
            raise ValueError(f"discriminant must be 0 or square-free positive, got {d}")
        if d == 0 and surd != 0:
            raise ValueError("surd part requires a nonzero discriminant")
        if surd == 0:
            d = 0
        object.__setattr__(self, "rational", rational)
        object.__setattr__(self, "surd", surd)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def coerce(cls, x: Number) -> ExactScalar:
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")

    @classmethod
    def sqrt(cls, d: int) -> ExactScalar:
        return cls(0, 1, d)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.rational == 0 and self.surd == 0

    def is_rational(self) -> bool:
        return self.surd == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: Number) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        o = ExactScalar.coerce(other)
        d = common_field(self.d, o.d)
        return ExactScalar(self.rational + o.rational, self.surd + o.surd, d)

    __radd__ = __add__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self.rational, -self.surd, self.d)

    def __sub__(self, other: Number) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other: Number) -> ExactScalar:
        return ExactScalar.coerce(other) - self

    def __mul__(self, other: Number) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        o = ExactScalar.coerce(other)
        d = common_field(self.d, o.d)
        a, b, c, e = self.rational, self.surd, o.rational, o.surd
        return ExactScalar(a * c + d * b * e, a * e + b * c, d)

    __rmul__ = __mul__

    def conjugate(self) -> ExactScalar:
        return ExactScalar(self.rational, -self.surd, self.d)

    def norm(self) -> Fraction:
        """Field norm a^2 - d b^2 (always rational)."""
        return self.rational ** 2 - self.d * self.surd ** 2

    def inverse(self) -> ExactScalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.norm()
        return ExactScalar(self.rational / n, -self.surd / n, self.d)

    def __truediv__(self, other: Number) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        return self * ExactScalar.coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> ExactScalar:
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> ExactScalar:
        if n < 0:
            return self.inverse() ** (-n)
        result = ExactScalar(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- ordering via the real embedding sqrt(d) > 0 ----------------------
    def sign(self) -> int:
        a, b = self.rational, self.surd
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        return sa if a * a > self.d * b * b else sb

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.surd == 0 and self.rational == other
        if isinstance(other, ExactScalar):
            return self.rational == other.rational and self.surd == other.surd and self.d == other.d
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        return (self - ExactScalar.coerce(other)).sign() < 0

    def __hash__(self) -> int:
        if self.surd == 0:
            return hash(self.rational)
        return hash((self.rational, self.surd, self.d))

    def __float__(self) -> float:
        return float(self.rational) + float(self.surd) * self.d ** 0.5

    # -- text -------------------------------------------------------------
    def __repr__(self) -> str:
        return f"ExactScalar({self.rational!s}, {self.surd!s}, {self.d})"

    def __str__(self) -> str:
        return render_scalar(self)


def _render_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_scalar(c: ExactScalar) -> str:
    """Canonical text: ``3``, ``-1/2``, ``(1/2+3/2*sqrt(5))``, ``(-sqrt(5))``."""
    if c.surd == 0:
        return _render_fraction(c.rational)
    if c.surd == 1:
        s = f"sqrt({c.d})"
    elif c.surd == -1:
        s = f"-sqrt({c.d})"
    else:
        s = f"{_render_fraction(c.surd)}*sqrt({c.d})"
    if c.rational == 0:
        return f"({s})"
    sep = "" if s.startswith("-") else "+"
    return f"({_render_fraction(c.rational)}{sep}{s})"


_SCALAR_RE = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*$")


def parse_scalar(text: str) -> ExactScalar:
    """Inverse of :func:`render_scalar` (any expression accepted by the poly parser)."""
    m = _SCALAR_RE.match(text)
    if m:
        return ExactScalar(Fraction(m.group(1)))
    from .poly import parse_poly

    p = parse_poly(text, ())
    return p.constant_value()
