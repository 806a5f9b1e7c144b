"""
Exact arithmetic on dyadic rationals m/2^k.

Every Dyadic is kept in canonical form: exponent 0, or an odd numerator.
Equality is therefore structural, and exponents stay minimal under repeated
composition of PL maps.
"""

from __future__ import annotations

import logging
import math
import operator
import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import total_ordering

from .errors import InvalidIntervalError, NonDyadicResultError, NonFiniteError

logger = logging.getLogger(__name__)

# Integers beyond this magnitude are serialized as decimal strings.
JSON_SAFE_BITS = 53

_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*(?:2\s*\^\s*(\d+)|(\d+))\s*$")


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@total_ordering
@dataclass(frozen=True, slots=True)
class Dyadic:
    """The dyadic rational numerator / 2**exponent, always canonical."""

    numerator: int = 0
    exponent: int = 0

    def __post_init__(self):
        # floats are rejected, never truncated
        m, k = operator.index(self.numerator), operator.index(self.exponent)
        if k < 0:
            raise ValueError(f"Dyadic exponent must be non-negative, got {k}")
        if m == 0:
            k = 0
        elif k:
            shift = min((m & -m).bit_length() - 1, k)
            if shift:
                m >>= shift
                k -= shift
        object.__setattr__(self, "numerator", m)
        object.__setattr__(self, "exponent", k)

    # --- conversions -----------------------------------------------------

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self) -> float:
        # int / int true division is correctly rounded
        return self.numerator / (1 << self.exponent)

    def floor(self) -> int:
        return self.numerator >> self.exponent

    def is_integer(self) -> bool:
        return self.exponent == 0

    def to_json(self) -> list[int | str]:
        m: int | str = self.numerator
        if abs(self.numerator).bit_length() > JSON_SAFE_BITS:
            m = str(self.numerator)
        return [m, self.exponent]

    @classmethod
    def from_json(cls, data: list[int | str]) -> Dyadic:
        if not isinstance(data, list | tuple) or len(data) != 2:
            raise ValueError(f"Expected [m, k], got {data!r}")
        m, k = (int(v) for v in data)
        return cls(m, k)

    @classmethod
    def parse(cls, text: str) -> Dyadic:
        """Parse "m", "m/d" (d a power of 2), "m/2^k" or a dyadic decimal."""
        match = _FRACTION_RE.match(text)
        if match:
            m = int(match.group(1))
            if match.group(2) is not None:
                return cls(m, int(match.group(2)))
            d = int(match.group(3))
            if not _is_pow2(d):
                return from_fraction(Fraction(m, d))
            return cls(m, d.bit_length() - 1)
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a dyadic rational: {text!r}") from e
        return from_fraction(value)

    # --- arithmetic ------------------------------------------------------

    def _coerce(self, other: object) -> Dyadic | None:
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other, 0)
        return None

    def __add__(self, other: object) -> Dyadic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.exponent >= o.exponent:
            return Dyadic(
                self.numerator + (o.numerator << (self.exponent - o.exponent)), self.exponent
            )
        return Dyadic((self.numerator << (o.exponent - self.exponent)) + o.numerator, o.exponent)

    __radd__ = __add__

    def __neg__(self) -> Dyadic:
        return Dyadic(-self.numerator, self.exponent)

    def __sub__(self, other: object) -> Dyadic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> Dyadic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> Dyadic:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Dyadic(self.numerator * o.numerator, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __abs__(self) -> Dyadic:
        return self if self.numerator >= 0 else -self

    def scale_pow2(self, j: int) -> Dyadic:
        """self * 2**j, exact for any signed j."""
        if j <= 0:
            return Dyadic(self.numerator, self.exponent - j)
        if j <= self.exponent:
            return Dyadic(self.numerator, self.exponent - j)
        return Dyadic(self.numerator << (j - self.exponent), 0)

    # --- ordering --------------------------------------------------------

    def compare(self, other: Dyadic) -> Ordering:
        shift = self.exponent - other.exponent
        if shift >= 0:
            a, b = self.numerator, other.numerator << shift
        else:
            a, b = self.numerator << -shift, other.numerator
        if a < b:
            return Ordering.LESS
        if a > b:
            return Ordering.GREATER
        return Ordering.EQUAL

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dyadic):
            return self.numerator == other.numerator and self.exponent == other.exponent
        if isinstance(other, int):
            return self.exponent == 0 and self.numerator == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.compare(o) is Ordering.LESS

    def __hash__(self) -> int:
        if self.exponent == 0:
            return hash(self.numerator)
        return hash((self.numerator, self.exponent))

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.numerator}, {self.exponent})"


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)


def normalize(m: int, k: int) -> Dyadic:
    return Dyadic(m, k)


def add(a: Dyadic, b: Dyadic) -> Dyadic:
    return a + b


def sub(a: Dyadic, b: Dyadic) -> Dyadic:
    return a - b


def neg(a: Dyadic) -> Dyadic:
    return -a


def mul(a: Dyadic, b: Dyadic) -> Dyadic:
    return a * b


def compare(a: Dyadic, b: Dyadic) -> Ordering:
    return a.compare(b)


def scale_pow2(a: Dyadic, j: int) -> Dyadic:
    return a.scale_pow2(j)


def from_fraction(value: Fraction) -> Dyadic:
    """Exact conversion; raises NonDyadicResultError for other denominators."""
    if not _is_pow2(value.denominator):
        raise NonDyadicResultError(f"{value} is not a dyadic rational")
    return Dyadic(value.numerator, value.denominator.bit_length() - 1)


def from_float(x: float) -> Dyadic:
    """Every finite double is a dyadic rational; the conversion is exact."""
    if not math.isfinite(x):
        raise NonFiniteError(f"Cannot convert non-finite value {x!r} to a dyadic rational")
    n, d = float(x).as_integer_ratio()
    return Dyadic(n, d.bit_length() - 1)


def overline_ceil(x: float) -> int:
    """Smallest integer strictly greater than x."""
    if not math.isfinite(x):
        raise NonFiniteError(f"overline_ceil needs a finite value, got {x!r}")
    return math.floor(x) + 1


def _overline_ceil_neg_log2(width: Dyadic) -> int:
    """overline_ceil(-log2(width)) for a positive dyadic width, exactly.

    With width = m/2^k (m odd or k = 0) and b = bit_length(m): if m is a power
    of two the logarithm is the integer k - (b - 1), otherwise it lies strictly
    between k - b and k - b + 1.
    """
    m, k = width.numerator, width.exponent
    b = m.bit_length()
    if _is_pow2(m):
        return k - (b - 1) + 1
    return k - b + 1


def exponent_bound(p: float, q: float) -> int:
    """max{0, overline_ceil(-log2(q - p))} for the exact values of p and q."""
    return max(0, _overline_ceil_neg_log2(from_float(q) - from_float(p)))


def find_dyadic_in(p: float, q: float, max_retries: int = 64) -> Dyadic:
    """A dyadic rational strictly inside the open interval (p, q).

    k = max{0, overline_ceil(-log2(q - p))}, m = overline_ceil(2^k p). The width
    is taken from the exact dyadic values of p and q, so 2^-k < q - p holds
    exactly; containment is still verified and k increased on failure.

    Args:
        p: Left end, finite
        q: Right end, finite and greater than p
        max_retries: Number of exponents tried from the starting k

    Returns:
        Canonical Dyadic x with p < x < q

    Raises:
        InvalidIntervalError: If p >= q or no exponent succeeded
        NonFiniteError: If p or q is not finite
    """
    lo, hi = from_float(p), from_float(q)
    if not lo < hi:
        raise InvalidIntervalError(f"Empty interval ({p!r}, {q!r})")

    k = exponent_bound(p, q)
    for _ in range(max_retries):
        candidate = Dyadic(lo.scale_pow2(k).floor() + 1, k)
        if lo < candidate < hi:
            return candidate
        logger.debug(f"Dyadic candidate {candidate} outside ({p!r}, {q!r}), retrying with k={k + 1}")
        k += 1
    raise InvalidIntervalError(f"No dyadic rational found in ({p!r}, {q!r})")
