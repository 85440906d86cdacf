"""Exact rationals, rational intervals and series tails.

Rationals are :class:`fractions.Fraction` (always reduced, denominator > 0).
Nothing in here touches floating point; decimals only appear in
:func:`to_decimal`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction
RationalLike = Union[int, Fraction]


class DivergentTail(ValueError):
    pass


def Q(x, y=None) -> Fraction:
    """Build a rational from ints, Fractions or "p/q" text."""
    if y is not None:
        return Fraction(x, y)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not admitted in exact computations")
    return Fraction(x)


def format_rational(r: Fraction) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "." in text or "e" in text.lower():
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


@dataclass(frozen=True)
class Interval:
    """Closed rational interval; its width is the certified error."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains(self, x) -> bool:
        return x in self

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def is_subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Interval) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Interval):
            other = Interval.point(other)
        products = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def widen(self, below=0, above=0) -> "Interval":
        return Interval(self.lo - below, self.hi + above)

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"

    @classmethod
    def parse(cls, text: str) -> "Interval":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad interval text {text!r}")
        lo, hi = body[1:-1].split(",")
        return cls(parse_rational(lo), parse_rational(hi))


def geometric_tail(first_omitted_term, ratio) -> Fraction:
    """Upper bound ``a / (1 - r)`` for ``sum_{n>=0} a r^n``."""
    a, r = Fraction(first_omitted_term), Fraction(ratio)
    if r >= 1:
        raise DivergentTail(f"ratio {r} >= 1")
    if r < 0 or a < 0:
        raise ValueError("geometric_tail needs a >= 0 and 0 <= r < 1")
    return a / (1 - r)


def dyadic_series_partial(exponents: Iterable[int], coefficient) -> Fraction:
    """``coefficient * sum(2**-e for e in exponents)``, exponents strictly increasing."""
    exps = list(exponents)
    if any(b <= a for a, b in zip(exps, exps[1:])):
        raise ValueError("exponents must be strictly increasing")
    if any(e <= 0 for e in exps):
        raise ValueError("exponents must be positive")
    return Fraction(coefficient) * sum((Fraction(1, 2 ** e) for e in exps), Fraction(0))


def to_decimal(r, digits: int) -> str:
    """Decimal rendering truncated toward zero (an approximation, display only)."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    r = Fraction(r)
    sign = "-" if r < 0 else ""
    r = abs(r)
    whole, rem = divmod(r.numerator, r.denominator)
    frac = (rem * 10 ** digits) // r.denominator
    return f"{sign}{whole}.{frac:0{digits}d}"


def binary_digits(r, n: int) -> list[int]:
    """First ``n`` binary digits after the point of ``r`` in [0, 1)."""
    r = Fraction(r)
    if not 0 <= r < 1:
        raise ValueError("binary_digits expects 0 <= r < 1")
    out = []
    for _ in range(n):
        r *= 2
        bit = int(r >= 1)
        out.append(bit)
        r -= bit
    return out
