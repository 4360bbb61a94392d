"""Arithmetic in the local ring O = Z_(p), its residue field F_p and Q.

The uniformizer is p itself.  Scalars are plain :class:`fractions.Fraction`
values at the function level; :class:`LocalScalar` and :class:`ResidueScalar`
wrap them when the prime should travel with the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

INF = math.inf

Rational = Union[int, Fraction]


class NotAUnit(ArithmeticError):
    """Raised when inverting an element of positive valuation."""


class NotLocal(ValueError):
    """Raised when a rational has p in its denominator."""


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, flint fmpq/fmpz and "a/b" strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    num = getattr(x, "p", None)
    den = getattr(x, "q", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    return Fraction(int(x))


def _pval_int(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def valuation(x, p: int) -> Union[int, float]:
    """Exponent of p in x (``math.inf`` for zero)."""
    x = as_fraction(x)
    if x == 0:
        return INF
    return _pval_int(x.numerator, p) - _pval_int(x.denominator, p)


def is_local(x, p: int) -> bool:
    """True when x lies in Z_(p)."""
    return as_fraction(x).denominator % p != 0


def reduce(x, p: int) -> int:
    """Residue of x in F_p, returned as an integer in [0, p)."""
    x = as_fraction(x)
    if x.denominator % p == 0:
        raise NotLocal(f"{x} is not in Z_({p})")
    return x.numerator * pow(x.denominator, -1, p) % p


def unit_inverse(x, p: int) -> Fraction:
    """Inverse of a unit of Z_(p)."""
    x = as_fraction(x)
    if x == 0 or valuation(x, p) != 0:
        raise NotAUnit(f"{x} has positive valuation at {p}")
    return 1 / x


def format_scalar(x) -> str:
    """Lowest-terms "a/b" string."""
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(s: Union[str, int]) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s.strip())


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class LocalScalar:
    """An element of Z_(p)."""

    value: Fraction
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))
        if self.value.denominator % self.p == 0:
            raise NotLocal(f"{self.value} is not in Z_({self.p})")

    def _coerce(self, other) -> Fraction:
        if isinstance(other, LocalScalar):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other.value
        return as_fraction(other)

    def __add__(self, other):
        return LocalScalar(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return LocalScalar(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return LocalScalar(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return LocalScalar(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return LocalScalar(-self.value, self.p)

    def valuation(self):
        return valuation(self.value, self.p)

    def reduce(self) -> "ResidueScalar":
        return ResidueScalar(reduce(self.value, self.p), self.p)

    def inverse(self) -> "LocalScalar":
        return LocalScalar(unit_inverse(self.value, self.p), self.p)

    def is_unit(self) -> bool:
        return self.value != 0 and valuation(self.value, self.p) == 0

    def __str__(self):
        return format_scalar(self.value)


@dataclass(frozen=True)
class ResidueScalar:
    """An element of F_p stored as an integer in [0, p)."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, ResidueScalar):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other.value
        return int(other)

    def __add__(self, other):
        return ResidueScalar(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return ResidueScalar(self.value - self._coerce(other), self.p)

    def __mul__(self, other):
        return ResidueScalar(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueScalar(-self.value, self.p)

    def inverse(self) -> "ResidueScalar":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse in F_p")
        return ResidueScalar(pow(self.value, -1, self.p), self.p)

    def __int__(self):
        return self.value
