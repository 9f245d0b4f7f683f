"""Exact nonnegative dyadic rationals ``num / 2**exp``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

_LITERAL = re.compile(r"^\s*(\d+)\s*(?:/\s*2\^(\d+))?\s*$")


@dataclass(frozen=True, order=False)
class Dyadic:
    """A value ``num / 2**exp`` kept in canonical form (odd numerator or zero).

    Construct through :meth:`of` or :meth:`pow2` unless the arguments are
    already canonical; the dataclass constructor normalises anyway.
    """

    num: int = 0
    exp: int = 0

    def __post_init__(self):
        num, exp = self.num, self.exp
        if num < 0:
            raise ValueError("Dyadic values are nonnegative")
        if exp < 0:
            num <<= -exp
            exp = 0
        if num == 0:
            exp = 0
        else:
            tz = (num & -num).bit_length() - 1
            shift = min(tz, exp)
            num >>= shift
            exp -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def of(cls, num: int, exp: int = 0) -> Dyadic:
        return cls(num, exp)

    @classmethod
    def pow2(cls, k: int) -> Dyadic:
        """``2**k`` for any integer k (negative k gives a fraction)."""
        if k >= 0:
            return cls(1 << k, 0)
        return cls(1, -k)

    @classmethod
    def parse(cls, text: str) -> Dyadic:
        """Parse ``"num/2^exp"`` or a bare integer.  Decimals are rejected."""
        m = _LITERAL.match(text)
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 0))

    @classmethod
    def from_fraction(cls, q: Fraction) -> Dyadic:
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not dyadic")
        return cls(q.numerator, den.bit_length() - 1)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def _align(self, other: Dyadic) -> tuple[int, int, int]:
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other: Dyadic) -> Dyadic:
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    def __sub__(self, other: Dyadic) -> Dyadic:
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, e = self._align(other)
        if a < b:
            raise ValueError("Dyadic subtraction would go negative")
        return Dyadic(a - b, e)

    def __mul__(self, other: Dyadic) -> Dyadic:
        if isinstance(other, int):
            return Dyadic(self.num * other, self.exp)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def half(self) -> Dyadic:
        return Dyadic(self.num, self.exp + 1)

    def scale2(self, k: int) -> Dyadic:
        """Multiply by ``2**k``."""
        return Dyadic(self.num, self.exp - k)

    def _cmp(self, other: Dyadic) -> int:
        a, b, _ = self._align(other)
        return (a > b) - (a < b)

    def __lt__(self, other: Dyadic) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Dyadic) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Dyadic) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Dyadic) -> bool:
        return self._cmp(other) >= 0

    def __bool__(self) -> bool:
        return self.num != 0

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}"

    def __repr__(self) -> str:
        return f"Dyadic({self.num}, {self.exp})"

    def floor_to(self, k: int) -> Dyadic:
        """Largest multiple of ``2**-k`` not exceeding this value."""
        if self.exp <= k:
            return self
        return Dyadic(self.num >> (self.exp - k), k)

    def bits(self) -> list[int]:
        """Exponents ``j`` with ``self == sum(2**-j)``, increasing.

        Only defined for values below 1 plus an integer part; integer parts
        contribute nonpositive exponents.
        """
        out = []
        num, exp = self.num, self.exp
        pos = 0
        while num:
            if num & 1:
                out.append(exp - pos)
            num >>= 1
            pos += 1
        return sorted(out)


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)


def kraft_sum(lengths) -> Dyadic:
    """Exact ``sum(2**-l for l in lengths)``."""
    lengths = list(lengths)
    if not lengths:
        return ZERO
    e = max(lengths)
    return Dyadic(sum(1 << (e - l) for l in lengths), e)
