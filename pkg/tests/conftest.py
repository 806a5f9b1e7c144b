"""Shared fixtures."""

import numpy as np
import pytest

from thompson_approx.core.config import get_settings
from thompson_approx.core.dyadic import Dyadic
from thompson_approx.core.plmap import PLMap, Space, from_pairs


def d(text: str) -> Dyadic:
    return Dyadic.parse(text)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test sees default settings, unaffected by the environment."""
    for name in ("THOMPSON_DEBUG", "THOMPSON_LOG_TO_FILE", "THOMPSON_CERT_GRID_MIN"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def circle_element() -> PLMap:
    """Three-piece element of T: (0,1/2), (1/2,3/4), (3/4,1), (1,3/2)."""
    return from_pairs(
        Space.CIRCLE, [(0, d("1/2")), (d("1/2"), d("3/4")), (d("3/4"), 1), (1, d("3/2"))]
    )


@pytest.fixture
def quarter_element() -> PLMap:
    """(0,0), (1/2,1/4), (3/4,1/2), (1,1) in F."""
    return from_pairs(
        Space.INTERVAL, [(0, 0), (d("1/2"), d("1/4")), (d("3/4"), d("1/2")), (1, 1)]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_element(rng: np.random.Generator, space: Space, max_exp: int = 10) -> PLMap:
    """Random element of F or T built from dyadic interpolations.

    Breakpoints come from random standard dyadic partitions; joining the image
    points with dyadic_interpolation keeps every slope a power of 2.
    """
    from thompson_approx.core.interp import dyadic_interpolation

    def partition(count: int) -> list[Dyadic]:
        k = int(rng.integers(3, max_exp + 1))
        cuts = sorted(int(c) for c in rng.choice(np.arange(1, 1 << k), size=count, replace=False))
        return [Dyadic(0)] + [Dyadic(c, k) for c in cuts] + [Dyadic(1)]

    count = int(rng.integers(0, 5))
    xs, ys = partition(count), partition(count)
    if space is Space.CIRCLE:
        shift = Dyadic(int(rng.integers(0, 1 << 4)), 4)
        ys = [y + shift for y in ys]
    points = [(xs[0], ys[0])]
    for i in range(len(xs) - 1):
        points.extend(dyadic_interpolation((xs[i], ys[i]), (xs[i + 1], ys[i + 1]))[1:])
    return PLMap(space, tuple(points))
