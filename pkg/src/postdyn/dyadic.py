"""Exact nonnegative dyadic rationals: num / 2**scale with arbitrary precision.

The tape of a machine, read with the binary point immediately right of the
current cell, is a number of this form.  All arithmetic here is exact; the
four head actions (halve, double, add one, subtract one) and the current-cell
read never round.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class DyadicParseError(ValueError):
    """Malformed binary literal; `column` is the 1-based offending position."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


class DyadicUnderflowError(ArithmeticError):
    """An operation would produce a negative value; tape values stay >= 0."""


@dataclass(frozen=True)
class Dyadic:
    """num / 2**scale in canonical form: scale == 0 or num odd, value >= 0."""

    num: int
    scale: int

    def __post_init__(self):
        if self.num < 0 or self.scale < 0:
            raise ValueError(f"dyadic must be nonnegative: {self.num}/2^{self.scale}")
        num, scale = self.num, self.scale
        if num == 0:
            scale = 0
        else:
            while scale > 0 and num % 2 == 0:
                num //= 2
                scale -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def from_int(cls, value: int) -> "Dyadic":
        return cls(value, 0)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Dyadic":
        """Exact conversion; rejects negatives and non-power-of-two denominators."""
        if value < 0:
            raise DyadicUnderflowError(f"negative value {value} is not a tape encoding")
        den = value.denominator
        scale = den.bit_length() - 1
        if den != 1 << scale:
            raise ValueError(f"{value} is not dyadic (denominator {den})")
        return cls(value.numerator, scale)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.scale)

    def floor(self) -> int:
        return self.num >> self.scale

    def __bool__(self) -> bool:
        return self.num != 0

    def __add__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            return NotImplemented
        s = max(self.scale, other.scale)
        return Dyadic(
            (self.num << (s - self.scale)) + (other.num << (s - other.scale)), s
        )

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            return NotImplemented
        s = max(self.scale, other.scale)
        num = (self.num << (s - self.scale)) - (other.num << (s - other.scale))
        if num < 0:
            raise DyadicUnderflowError(f"{self} - {other} is negative")
        return Dyadic(num, s)

    def _cmp_key(self, other: "Dyadic") -> tuple[int, int]:
        s = max(self.scale, other.scale)
        return self.num << (s - self.scale), other.num << (s - other.scale)

    def __lt__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def __str__(self) -> str:
        return format_dyadic(self)

    def __repr__(self) -> str:
        return f"Dyadic({self.num}, {self.scale})"


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)


def parse_dyadic(text: str) -> Dyadic:
    """Read a binary literal with a point, e.g. "110.101".

    Non-canonical literals (leading/trailing zeros) are accepted and
    canonicalised; the grammar is `[01]+ "." [01]*`.
    """
    point = None
    for i, ch in enumerate(text):
        if ch == ".":
            if point is not None:
                raise DyadicParseError("second '.' in literal", i + 1)
            point = i
        elif ch not in "01":
            raise DyadicParseError(f"invalid character {ch!r}", i + 1)
    if point is None:
        raise DyadicParseError("missing '.'", len(text) + 1)
    if point == 0:
        raise DyadicParseError("no digits before '.'", 1)
    int_part, frac_part = text[:point], text[point + 1 :]
    return Dyadic(int(int_part + frac_part, 2), len(frac_part))


def format_dyadic(d: Dyadic) -> str:
    """Canonical binary literal; integers end in ".", zero is "0."."""
    int_part = bin(d.num >> d.scale)[2:] if d.num >> d.scale else "0"
    if d.scale == 0:
        return int_part + "."
    frac_bits = format(d.num & ((1 << d.scale) - 1), f"0{d.scale}b")
    return f"{int_part}.{frac_bits}"


def halve(d: Dyadic) -> Dyadic:
    return Dyadic(d.num, d.scale + 1)


def double(d: Dyadic) -> Dyadic:
    if d.scale > 0:
        return Dyadic(d.num, d.scale - 1)
    return Dyadic(d.num * 2, 0)


def add_one(d: Dyadic) -> Dyadic:
    return Dyadic(d.num + (1 << d.scale), d.scale)


def sub_one(d: Dyadic) -> Dyadic:
    if d.floor() < 1:
        raise DyadicUnderflowError(f"cannot subtract 1 from {format_dyadic(d)}")
    return Dyadic(d.num - (1 << d.scale), d.scale)


def current_bit(d: Dyadic) -> int:
    """The units bit of the integer part: the cell just left of the point."""
    return (d.num >> d.scale) & 1
