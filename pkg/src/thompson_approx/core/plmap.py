"""
Piecewise-linear maps with dyadic breakpoint data.

A PLMap is either an interval map [0,1] -> [0,1] (candidate for Thompson's
group F) or a normalized circle lift [0,1] -> [y0, y0+1] with 0 <= y0 < 1
(candidate for T, extended by g(x+1) = g(x) + 1). Points are canonical: no
interior point is collinear with its neighbours.
"""

from __future__ import annotations

import bisect
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property

import numpy as np
from pydantic import BaseModel, Field

from .dyadic import ONE, ZERO, Dyadic, from_fraction
from .errors import (
    ElementFormatError,
    InvalidElementError,
    OutOfDomainError,
    OutOfRangeError,
    SpaceMismatchError,
)

logger = logging.getLogger(__name__)

Point = tuple[Dyadic, Dyadic]


class Space(str, Enum):
    """Where a map lives: the unit interval or the circle (stored as a lift)."""

    INTERVAL = "interval"
    CIRCLE = "circle"


class Violation(BaseModel):
    """One failed membership or precondition check."""

    kind: str = Field(description="Check that failed (slope, lift, endpoint, derivative, ...)")
    message: str
    segment: int | None = Field(default=None, description="Offending segment index")
    slope: str | None = Field(default=None, description="Offending slope as an exact ratio")
    x: float | None = Field(default=None, description="Sample point of a pointwise check")


class ValidationResult(BaseModel):
    """Outcome of validate_thompson."""

    ok: bool
    space: Space
    slopes: list[str] = Field(default_factory=list)
    dyadic_breakpoints: bool = True
    dyadic_images: bool = True
    lift_normalized: bool = True
    violations: list[Violation] = Field(default_factory=list)


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _pow2_exponent(num: Dyadic, den: Dyadic) -> int | None:
    """j with num/den == 2**j, or None when the ratio is not a power of 2."""
    if num.numerator == den.numerator:
        return den.exponent - num.exponent
    r = Fraction(num.numerator, den.numerator)
    if r <= 0 or not (_is_pow2(r.numerator) and _is_pow2(r.denominator)):
        return None
    return r.numerator.bit_length() - r.denominator.bit_length() + den.exponent - num.exponent


def _along(x0: Dyadic, y0: Dyadic, dx: Dyadic, dy: Dyadic, t: Dyadic) -> Dyadic:
    """y0 + (dy/dx) * (t - x0), exact; NonDyadicResultError if not dyadic."""
    j = _pow2_exponent(dy, dx)
    if j is not None:
        return y0 + (t - x0).scale_pow2(j)
    value = y0.to_fraction() + dy.to_fraction() / dx.to_fraction() * (t - x0).to_fraction()
    return from_fraction(value)


def _scaled(points: Iterable[Point]) -> tuple[list[int], list[int]]:
    """Coordinates as integers over the common denominator 2^K, K the largest exponent."""
    pts = list(points)
    scale = max(max(x.exponent, y.exponent) for x, y in pts)
    xs = [x.numerator << (scale - x.exponent) for x, _ in pts]
    ys = [y.numerator << (scale - y.exponent) for _, y in pts]
    return xs, ys


def _collinear(xs: list[int], ys: list[int], a: int, b: int, c: int) -> bool:
    return (ys[b] - ys[a]) * (xs[c] - xs[b]) == (ys[c] - ys[b]) * (xs[b] - xs[a])


def _as_dyadic(v: Dyadic | int) -> Dyadic:
    if isinstance(v, Dyadic):
        return v
    if isinstance(v, int):
        return Dyadic(v, 0)
    raise ElementFormatError(f"Coordinates must be dyadic rationals, got {v!r}")


@dataclass(frozen=True)
class BreakpointSet:
    """Points at which a PL map is not differentiable."""

    xs: tuple[Dyadic, ...] = ()

    def __contains__(self, x: object) -> bool:
        return x in self.xs

    def __iter__(self) -> Iterator[Dyadic]:
        return iter(self.xs)

    def __len__(self) -> int:
        return len(self.xs)

    def as_floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.xs], dtype=float)


@dataclass(frozen=True)
class PLMap:
    """Strictly increasing PL map given by its canonical breakpoint list."""

    space: Space
    points: tuple[Point, ...] = field(default=())

    def __post_init__(self):
        space = Space(self.space)
        pts = [(_as_dyadic(x), _as_dyadic(y)) for x, y in self.points]
        if len(pts) < 2:
            raise ElementFormatError("A PL map needs at least two points")
        xs, ys = _scaled(pts)
        for i in range(len(pts) - 1):
            if not xs[i] < xs[i + 1]:
                raise ElementFormatError(
                    f"x-coordinates must increase strictly ({pts[i][0]} >= {pts[i + 1][0]})"
                )
            if not ys[i] < ys[i + 1]:
                raise ElementFormatError(
                    f"y-coordinates must increase strictly ({pts[i][1]} >= {pts[i + 1][1]})"
                )
        if pts[0][0] != ZERO or pts[-1][0] != ONE:
            raise ElementFormatError("Domain must be [0, 1]")

        if space is Space.INTERVAL:
            if pts[0][1] != ZERO or pts[-1][1] != ONE:
                raise ElementFormatError("Interval maps must fix 0 and 1")
        else:
            if pts[-1][1] != pts[0][1] + ONE:
                raise ElementFormatError("Circle lifts need g(1) = g(0) + 1")
            shift = pts[0][1].floor()
            if shift:
                logger.debug(f"Normalizing circle lift by deck shift {-shift}")
                pts = [(x, y - shift) for x, y in pts]

        # an integer deck shift leaves every difference, hence collinearity, unchanged
        keep = [0]
        for j in range(1, len(pts)):
            if len(keep) >= 2 and _collinear(xs, ys, keep[-2], keep[-1], j):
                keep[-1] = j
            else:
                keep.append(j)

        object.__setattr__(self, "space", space)
        object.__setattr__(self, "points", tuple(pts[i] for i in keep))

    # --- structure -------------------------------------------------------

    @property
    def xs(self) -> tuple[Dyadic, ...]:
        return tuple(p[0] for p in self.points)

    @property
    def ys(self) -> tuple[Dyadic, ...]:
        return tuple(p[1] for p in self.points)

    @property
    def pieces(self) -> int:
        return len(self.points) - 1

    @property
    def float_xs(self) -> np.ndarray:
        """Breakpoint x-coordinates (endpoints included) as a float array."""
        return self._float_xs

    @cached_property
    def _xs(self) -> list[Dyadic]:
        return [p[0] for p in self.points]

    @cached_property
    def _ys(self) -> list[Dyadic]:
        return [p[1] for p in self.points]

    @cached_property
    def _slopes(self) -> tuple[Fraction, ...]:
        xs, ys = _scaled(self.points)
        return tuple(
            Fraction(ys[i + 1] - ys[i], xs[i + 1] - xs[i]) for i in range(len(xs) - 1)
        )

    @cached_property
    def _float_xs(self) -> np.ndarray:
        return np.array([float(x) for x in self._xs], dtype=float)

    @cached_property
    def _float_ys(self) -> np.ndarray:
        return np.array([float(y) for y in self._ys], dtype=float)

    @cached_property
    def _float_slopes(self) -> np.ndarray:
        return np.array([float(s) for s in self._slopes], dtype=float)

    def slopes(self) -> list[Fraction]:
        return list(self._slopes)

    def slope_exponents(self) -> list[int | None]:
        """log2 of every slope, None where the slope is not a power of 2."""
        out: list[int | None] = []
        for s in self._slopes:
            if _is_pow2(s.numerator) and _is_pow2(s.denominator):
                out.append(s.numerator.bit_length() - s.denominator.bit_length())
            else:
                out.append(None)
        return out

    def _segment(self, x: Dyadic) -> int:
        i = bisect.bisect_right(self._xs, x) - 1
        return min(max(i, 0), len(self.points) - 2)

    # --- evaluation ------------------------------------------------------

    def eval(self, x: Dyadic | int) -> Dyadic:
        """Exact value at a dyadic point of [0, 1]."""
        x = _as_dyadic(x)
        if x < ZERO or x > ONE:
            raise OutOfDomainError(f"{x} is outside [0, 1]")
        i = self._segment(x)
        (xa, ya), (xb, yb) = self.points[i], self.points[i + 1]
        if x == xa:
            return ya
        return _along(xa, ya, xb - xa, yb - ya, x)

    def eval_lift(self, x: Dyadic | int) -> Dyadic:
        """Exact value of the Z-periodic extension g(x + n) = g(x) + n."""
        x = _as_dyadic(x)
        if self.space is Space.INTERVAL:
            return self.eval(x)
        n = x.floor()
        return self.eval(x - n) + n

    def preimage(self, y: Dyadic) -> Dyadic:
        """Exact x with g(x) = y, for y in the image of [0, 1]."""
        if y < self._ys[0] or y > self._ys[-1]:
            raise OutOfDomainError(f"{y} is outside the image [{self._ys[0]}, {self._ys[-1]}]")
        i = bisect.bisect_right(self._ys, y) - 1
        i = min(max(i, 0), len(self.points) - 2)
        (xa, ya), (xb, yb) = self.points[i], self.points[i + 1]
        if y == ya:
            return xa
        return _along(ya, xa, yb - ya, xb - xa, y)

    def preimage_lift(self, y: Dyadic) -> Dyadic:
        """Exact preimage under the periodic extension of a circle lift."""
        if self.space is Space.INTERVAL:
            return self.preimage(y)
        n = (y - self._ys[0]).floor()
        return self.preimage(y - n) + n

    def eval_real(self, x: float | np.ndarray) -> float | np.ndarray:
        """Floating evaluation on [0, 1] (scalar or array)."""
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(~np.isfinite(arr)):
            raise OutOfDomainError("Evaluation points must lie in [0, 1]")
        out = np.interp(arr, self._float_xs, self._float_ys)
        return float(out) if out.ndim == 0 else out

    def eval_lift_real(self, x: float | np.ndarray) -> float | np.ndarray:
        """Floating evaluation of the periodic extension (interval maps: eval_real)."""
        if self.space is Space.INTERVAL:
            return self.eval_real(x)
        arr = np.asarray(x, dtype=float)
        n = np.floor(arr)
        out = np.interp(arr - n, self._float_xs, self._float_ys) + n
        return float(out) if out.ndim == 0 else out

    def derivative_real(self, x: float | np.ndarray) -> float | np.ndarray:
        """Slope of the segment containing x (right-continuous; last segment at x = 1)."""
        arr = np.asarray(x, dtype=float)
        if self.space is Space.CIRCLE:
            arr = arr - np.floor(arr)
        idx = np.searchsorted(self._float_xs, arr, side="right") - 1
        idx = np.clip(idx, 0, self.pieces - 1)
        out = self._float_slopes[idx]
        return float(out) if out.ndim == 0 else out

    def __str__(self) -> str:
        body = ", ".join(f"({x}, {y})" for x, y in self.points)
        return f"PLMap[{self.space.value}]({body})"


def identity(space: Space = Space.INTERVAL) -> PLMap:
    return PLMap(space, ((ZERO, ZERO), (ONE, ONE)))


def rotation_by(c: Dyadic) -> PLMap:
    """The rotation x -> x + c as a normalized circle lift."""
    if c < ZERO or not c < ONE:
        raise OutOfRangeError(f"Rotation amount must lie in [0, 1), got {c}")
    return PLMap(Space.CIRCLE, ((ZERO, c), (ONE, c + ONE)))


def validate_thompson(g: PLMap) -> ValidationResult:
    """Check dyadic breakpoints, dyadic images and power-of-2 slopes (and lift normalization)."""
    violations: list[Violation] = []
    slopes = g.slopes()

    for i, (s, j) in enumerate(zip(slopes, g.slope_exponents(), strict=True)):
        if j is None:
            violations.append(
                Violation(
                    kind="slope",
                    segment=i,
                    slope=str(s),
                    message=f"segment {i} has slope {s}, not an integer power of 2",
                )
            )

    dyadic_breakpoints = all(isinstance(x, Dyadic) for x in g.xs)
    dyadic_images = all(isinstance(y, Dyadic) for y in g.ys)
    if not dyadic_breakpoints:
        violations.append(Violation(kind="breakpoint", message="non-dyadic breakpoint"))
    if not dyadic_images:
        violations.append(Violation(kind="image", message="non-dyadic breakpoint image"))

    lift_normalized = True
    if g.space is Space.CIRCLE:
        y0, y1 = g.points[0][1], g.points[-1][1]
        lift_normalized = ZERO <= y0 < ONE and y1 == y0 + ONE
        if not lift_normalized:
            violations.append(
                Violation(kind="lift", message=f"lift not normalized: g(0) = {y0}, g(1) = {y1}")
            )

    return ValidationResult(
        ok=not violations,
        space=g.space,
        slopes=[str(s) for s in slopes],
        dyadic_breakpoints=dyadic_breakpoints,
        dyadic_images=dyadic_images,
        lift_normalized=lift_normalized,
        violations=violations,
    )


def _require_valid(g: PLMap, role: str) -> None:
    result = validate_thompson(g)
    if not result.ok:
        raise InvalidElementError(
            f"{role} is not an element of {'F' if g.space is Space.INTERVAL else 'T'}",
            result.violations,
        )


def breakpoints(g: PLMap) -> BreakpointSet:
    """Interior points where the slope changes; for circle lifts also the seam 0
    when the last and first slopes differ."""
    interior = g.xs[1:-1]
    if g.space is Space.CIRCLE:
        slopes = g.slopes()
        if slopes[0] != slopes[-1]:
            return BreakpointSet((ZERO, *interior))
    return BreakpointSet(tuple(interior))


def invert(g: PLMap) -> PLMap:
    _require_valid(g, "Element")
    if g.space is Space.INTERVAL:
        return PLMap(Space.INTERVAL, tuple((y, x) for x, y in g.points))

    # The inverse lift lives on [y0, y0 + 1]; resample it on [0, 1] at the
    # fractional parts of the breakpoint images.
    candidates = {ZERO, ONE}
    for y in g.ys:
        candidates.add(y - y.floor())
    pts = [(u, g.preimage_lift(u)) for u in sorted(candidates)]
    return PLMap(Space.CIRCLE, tuple(pts))


def compose(a: PLMap, b: PLMap) -> PLMap:
    """The map x -> a(b(x)), computed exactly.

    Circle maps are composed as lifts; the result is normalized so its lift
    starts in [0, 1).

    Raises:
        SpaceMismatchError: If a and b live on different spaces
        InvalidElementError: If either factor is not in F or T
    """
    if a.space is not b.space:
        raise SpaceMismatchError(f"Cannot compose {a.space.value} with {b.space.value} map")
    _require_valid(a, "Left factor")
    _require_valid(b, "Right factor")

    candidates = set(b.xs)
    if a.space is Space.INTERVAL:
        candidates.update(b.preimage(t) for t in a.xs)
        pts = [(x, a.eval(b.eval(x))) for x in sorted(candidates)]
        return PLMap(Space.INTERVAL, tuple(pts))

    lo, hi = b.points[0][1], b.points[-1][1]
    base = lo.floor()
    for t in a.xs:
        for n in range(base - 1, base + 3):
            s = t + n
            if lo <= s <= hi:
                candidates.add(b.preimage(s))
    pts = [(x, a.eval_lift(b.eval(x))) for x in sorted(candidates)]
    return PLMap(Space.CIRCLE, tuple(pts))


def power(g: PLMap, n: int) -> PLMap:
    """n-fold composition of g with itself; negative n uses the inverse."""
    if n < 0:
        g, n = invert(g), -n
    else:
        _require_valid(g, "Element")
    result = identity(g.space)
    square = g
    while n:
        if n & 1:
            result = compose(square, result)
        n >>= 1
        if n:
            square = compose(square, square)
    return result


def circle_branches(g: PLMap) -> list[list[Point]]:
    """The circle element as a map [0,1] -> [0,1]: the lift reduced mod 1, split
    where it crosses an integer."""
    if g.space is not Space.CIRCLE:
        raise SpaceMismatchError("circle_branches needs a circle lift")
    y0 = g.points[0][1]
    if y0 == ZERO:
        return [list(g.points)]
    cut = g.preimage(ONE)
    first = [p for p in g.points if p[0] < cut] + [(cut, ONE)]
    second = [(cut, ZERO)] + [(x, y - ONE) for x, y in g.points if x > cut]
    return [first, second]


def from_pairs(space: Space | str, pairs: Iterable[tuple[Dyadic | int, Dyadic | int]]) -> PLMap:
    return PLMap(Space(space), tuple((_as_dyadic(x), _as_dyadic(y)) for x, y in pairs))
