"""
Dyadic interpolation between two dyadic points.

Given p = (p1, p2) and q = (q1, q2) with p1 < q1, p2 < q2, both sides of the
rectangle are cut into standard dyadic partitions with the same number of
intervals. The side with fewer base intervals is refined by repeatedly halving
its intervals from left to right; pairing the two partitions gives a PL path
with dyadic breakpoints and power-of-2 slopes.
"""

import logging
from dataclasses import dataclass

from .dyadic import Dyadic
from .errors import DegenerateRectangleError, OutOfRangeError

logger = logging.getLogger(__name__)

DyadicPoint = tuple[Dyadic, Dyadic]


@dataclass(frozen=True)
class SideDecomposition:
    """Canonical side lengths r_i = m_i / 2^k_i of a dyadic rectangle."""

    a: int
    b: int
    m_a: int
    k_a: int
    m_b: int
    k_b: int
    d: int


@dataclass(frozen=True)
class InterpPlan:
    """Side counts and cut sequence of one dyadic interpolation."""

    m_a: int
    m_b: int
    k_a: int
    k_b: int
    d: int
    l: int  # noqa: E741 - stopping round, 0 when d == 0
    cuts: tuple[Dyadic, ...]
    a_is_x: bool

    def partition_a(self) -> list[Dyadic]:
        """Sorted union of the base grid of side a and the cuts (m_b + 1 points)."""
        base = [Dyadic(m, self.k_a) for m in range(self.m_a + 1)]
        return sorted(base + list(self.cuts))

    def partition_b(self) -> list[Dyadic]:
        return [Dyadic(m, self.k_b) for m in range(self.m_b + 1)]


def side_decomposition(r1: Dyadic, r2: Dyadic) -> SideDecomposition:
    if r1.numerator <= 0 or r2.numerator <= 0:
        raise OutOfRangeError(f"Side lengths must be positive, got {r1} and {r2}")
    m1, k1 = r1.numerator, r1.exponent
    m2, k2 = r2.numerator, r2.exponent
    if m1 <= m2:
        return SideDecomposition(a=1, b=2, m_a=m1, k_a=k1, m_b=m2, k_b=k2, d=m2 - m1)
    return SideDecomposition(a=2, b=1, m_a=m2, k_a=k2, m_b=m1, k_b=k1, d=m1 - m2)


def _stopping_round(m_a: int, d: int) -> int:
    """Smallest l >= 1 with c_l = m_a (2^l - 1) >= d."""
    l = 1  # noqa: E741
    while m_a * ((1 << l) - 1) < d:
        l += 1  # noqa: E741
    return l


def refine_cuts(m_a: int, k_a: int, d: int) -> list[Dyadic]:
    """Cut positions that refine [0, m_a / 2^k_a] from m_a to m_a + d intervals.

    Round n halves every interval of the previous round, placing cuts at
    (2i - 1) / 2^(k_a + n + 1); the last round only cuts the leftmost
    d - c_(l-1) intervals.
    """
    if d == 0:
        return []
    if m_a <= 0:
        raise OutOfRangeError(f"m_a must be positive, got {m_a}")
    l = _stopping_round(m_a, d)  # noqa: E741
    cuts: list[Dyadic] = []
    for n in range(l):
        count = (m_a << n) if n < l - 1 else d - m_a * ((1 << (l - 1)) - 1)
        cuts.extend(Dyadic(2 * i - 1, k_a + n + 1) for i in range(1, count + 1))
        logger.debug(f"refine round {n}: {count} cuts at exponent {k_a + n + 1}")
    return cuts


def _check_rectangle(p: DyadicPoint, q: DyadicPoint) -> None:
    if not (p[0] < q[0] and p[1] < q[1]):
        raise DegenerateRectangleError(f"Need p < q in both coordinates, got p={p}, q={q}")


def plan_interpolation(p: DyadicPoint, q: DyadicPoint) -> InterpPlan:
    _check_rectangle(p, q)
    side = side_decomposition(q[0] - p[0], q[1] - p[1])
    cuts = refine_cuts(side.m_a, side.k_a, side.d)
    return InterpPlan(
        m_a=side.m_a,
        m_b=side.m_b,
        k_a=side.k_a,
        k_b=side.k_b,
        d=side.d,
        l=_stopping_round(side.m_a, side.d) if side.d else 0,
        cuts=tuple(cuts),
        a_is_x=side.a == 1,
    )


def dyadic_interpolation(p: DyadicPoint, q: DyadicPoint) -> list[DyadicPoint]:
    """Points of a PL path from p to q with dyadic breakpoints and power-of-2
    slopes; m_b + 1 points, strictly increasing in both coordinates."""
    plan = plan_interpolation(p, q)
    side_a, side_b = plan.partition_a(), plan.partition_b()
    xs, ys = (side_a, side_b) if plan.a_is_x else (side_b, side_a)
    return [(p[0] + x, p[1] + y) for x, y in zip(xs, ys, strict=True)]
