"""
Distances between input functions and group elements.

certified_sup_distance brackets sup |f - g| using only that f and g are
increasing: on [a, b] the difference f - g lies between g(a) - f(b) and
f(b) - g(a). derivative_distance_lb and the power-of-2 gap make the C^1
obstruction visible: f' keeps away from the powers of 2 that g' is made of.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from .approx import approximate
from .config import Settings, get_settings
from .dyadic import ZERO, Dyadic, from_float
from .errors import OutOfRangeError, RotationInputError, SpaceMismatchError
from .funcspec import DiffeoSpec
from .plmap import PLMap, Space, breakpoints

logger = logging.getLogger(__name__)


class Certificate(BaseModel):
    """lower <= sup |f - g| <= upper."""

    lower: float = Field(ge=0.0)
    upper: float = Field(ge=0.0)
    grid_size: int = Field(gt=0)
    kind: Literal["sup-distance"] = "sup-distance"
    witness: float = Field(description="Sample point where lower is attained")
    exact: bool = Field(default=False, description="Both maps PL: lower and upper are the sup")


class ExperimentRow(BaseModel):
    """One epsilon of the C^0 convergence versus C^1 obstruction table."""

    epsilon: float
    Delta: int
    n: int
    pieces: int
    lower: float
    upper: float
    derivative_lb: float
    mu: float

    @property
    def certified(self) -> bool:
        return self.upper < self.epsilon


def _check_spaces(f: DiffeoSpec, g: PLMap) -> None:
    if f.space is not g.space:
        raise SpaceMismatchError(f"Cannot compare {f.space.value} f with {g.space.value} g")


def _round_down(d: Dyadic) -> float:
    v = float(d)
    return float(np.nextafter(v, -np.inf)) if from_float(v) > d else v


def _round_up(d: Dyadic) -> float:
    v = float(d)
    return float(np.nextafter(v, np.inf)) if from_float(v) < d else v


def _exact_sup(a: PLMap, b: PLMap) -> tuple[Dyadic, Dyadic]:
    """(sup |a - b|, a point attaining it); lifts are aligned by an integer."""
    if a.space is not b.space:
        raise SpaceMismatchError(f"Cannot compare {a.space.value} with {b.space.value} map")
    shift = 0
    if a.space is Space.CIRCLE:
        shift = round(float(b.points[0][1] - a.points[0][1]))
    best, witness = ZERO, ZERO
    for x in sorted(set(a.xs) | set(b.xs)):
        gap = abs(a.eval(x) + shift - b.eval(x))
        if gap > best:
            best, witness = gap, x
    return best, witness


def exact_pl_distance(a: PLMap, b: PLMap) -> Dyadic:
    """sup |a - b| exactly; a - b is linear between the union of breakpoints."""
    return _exact_sup(a, b)[0]


def lift_alignment(f: DiffeoSpec, g: PLMap) -> float:
    if g.space is not Space.CIRCLE:
        return 0.0
    return float(round(float(g.points[0][1]) - float(f.value(0.0))))


def certified_sup_distance(
    f: DiffeoSpec,
    g: PLMap,
    grid_size: int | None = None,
    settings: Settings | None = None,
    exact: bool = True,
) -> Certificate:
    """Bracket sup |f - g| on [0, 1] (lifts for circle maps).

    Args:
        f: Function to compare against; a PL f is compared exactly when `exact` is set
        g: Element of F or T, in the same space as f
        grid_size: Number of uniform grid cells, settings.certification_grid() when None
        settings: Overrides the process-wide settings
        exact: Use the breakpoint comparison for PL f instead of the grid bracket

    Returns:
        Certificate with lower <= sup |f - g| <= upper

    Raises:
        SpaceMismatchError: If f and g live on different spaces
    """
    _check_spaces(f, g)
    settings = settings or get_settings()
    grid_size = grid_size or settings.certification_grid(g.pieces)

    f_pl = f.as_plmap if exact else None
    if f_pl is not None:
        sup, witness = _exact_sup(f_pl, g)
        logger.debug(f"Exact PL distance {sup} at x = {witness}")
        return Certificate(
            lower=_round_down(sup),
            upper=_round_up(sup),
            grid_size=grid_size,
            witness=float(witness),
            exact=True,
        )

    grid = np.linspace(0.0, 1.0, grid_size + 1)
    xs = np.union1d(grid, g.float_xs)
    fv = np.asarray(f.value(xs), dtype=float) + lift_alignment(f, g)
    gv = np.asarray(g.eval_real(xs), dtype=float)

    diff = np.abs(fv - gv)
    i = int(np.argmax(diff))
    lower = float(diff[i])
    upper = float(np.max(np.maximum(fv[1:] - gv[:-1], gv[1:] - fv[:-1])))
    upper = max(upper, lower)

    logger.debug(f"Sup distance in [{lower:.6g}, {upper:.6g}] on {xs.size} points")
    return Certificate(lower=lower, upper=upper, grid_size=grid_size, witness=float(xs[i]))


def bracket_width_sequence(
    f: DiffeoSpec, g: PLMap, grids: Iterable[int], settings: Settings | None = None
) -> list[float]:
    """upper - lower of the certificate for each grid size."""
    widths = []
    for n in grids:
        cert = certified_sup_distance(f, g, n, settings)
        widths.append(cert.upper - cert.lower)
    return widths


def derivative_distance_lb(
    f: DiffeoSpec, g: PLMap, grid_size: int | None = None, settings: Settings | None = None
) -> float:
    """max |f'(x) - g'(x)| over grid points x that are not breakpoints of g."""
    _check_spaces(f, g)
    settings = settings or get_settings()
    grid_size = grid_size or settings.gap_grid

    xs = np.linspace(0.0, 1.0, grid_size + 1)
    if g.space is Space.CIRCLE:
        xs = xs[:-1]  # x = 1 is x = 0 on the circle
    bp = breakpoints(g).as_floats()
    xs = xs[~np.isin(xs, bp)]
    if xs.size == 0:
        return 0.0
    fd = np.asarray(f.derivative(xs), dtype=float)
    gd = np.asarray(g.derivative_real(xs), dtype=float)
    return float(np.max(np.abs(fd - gd)))


def power2_gap(v: float, guard: float | None = None) -> float:
    """Distance from v > 0 to the nearest integer power of 2."""
    if not (math.isfinite(v) and v > 0):
        raise OutOfRangeError(f"power2_gap needs a finite positive value, got {v}")
    guard = get_settings().gap_guard if guard is None else guard
    mantissa, e = math.frexp(v)
    if mantissa == 0.5:
        return 0.0
    gap = min(v - math.ldexp(1.0, e - 1), math.ldexp(1.0, e) - v)
    return 0.0 if gap < guard else gap


def power2_gaps(values: np.ndarray, guard: float | None = None) -> np.ndarray:
    """Vectorized power2_gap."""
    values = np.asarray(values, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise OutOfRangeError("power2_gaps needs finite positive values")
    guard = get_settings().gap_guard if guard is None else guard
    mantissa, e = np.frexp(values)
    below = np.ldexp(1.0, e - 1)
    gaps = np.minimum(values - below, 2.0 * below - values)
    gaps[(mantissa == 0.5) | (gaps < guard)] = 0.0
    return gaps


def is_rotation(f: DiffeoSpec, tol: float | None = None, grid_size: int | None = None) -> bool:
    """True when |f' - 1| <= tol at every grid sample."""
    settings = get_settings()
    tol = settings.rotation_tol if tol is None else tol
    grid_size = grid_size or settings.gap_grid
    xs = np.linspace(0.0, 1.0, grid_size + 1)
    return bool(np.all(np.abs(np.asarray(f.derivative(xs)) - 1.0) <= tol))


def discreteness_floor(f: DiffeoSpec, grid_size: int | None = None) -> tuple[float, float]:
    """(x_star, mu): the grid point where f' is farthest from a power of 2."""
    grid_size = grid_size or get_settings().gap_grid
    if is_rotation(f, grid_size=grid_size):
        raise RotationInputError(f"{f.label} is a rotation: f' = 1 everywhere")
    xs = np.linspace(0.0, 1.0, grid_size + 1)
    gaps = power2_gaps(np.asarray(f.derivative(xs), dtype=float))
    i = int(np.argmax(gaps))
    return float(xs[i]), float(gaps[i])


def discreteness_experiment(
    f: DiffeoSpec,
    epsilons: Sequence[float],
    grid_size: int | None = None,
    settings: Settings | None = None,
) -> list[ExperimentRow]:
    """Approximate f at each epsilon; certify the C^0 distance and bound the C^1 one."""
    settings = settings or get_settings()
    grid_size = grid_size or settings.gap_grid
    _, mu = discreteness_floor(f, grid_size)

    rows: list[ExperimentRow] = []
    for eps in epsilons:
        g, params = approximate(f, eps, settings=settings)
        cert = certified_sup_distance(f, g, settings=settings)
        dlb = derivative_distance_lb(f, g, grid_size, settings)
        rows.append(
            ExperimentRow(
                epsilon=eps,
                Delta=params.Delta,
                n=params.n,
                pieces=g.pieces,
                lower=cert.lower,
                upper=cert.upper,
                derivative_lb=dlb,
                mu=mu,
            )
        )
        logger.info(
            f"eps={eps:g}: pieces={g.pieces}, sup in [{cert.lower:.3g}, {cert.upper:.3g}], "
            f"d(f,g) >= {dlb:.3g}"
        )
    return rows
