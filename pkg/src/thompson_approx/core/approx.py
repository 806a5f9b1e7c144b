"""
Approximation of C^1 diffeomorphisms by elements of F and T.

The unit interval is cut into n = 2^Delta standard dyadic pieces
[xi_i, xi_(i+1)]. Each xi_i gets a dyadic target eta_i chosen inside
I_i = (max(f(xi_(i-1)) + delta, f(xi_i)), f(xi_i) + delta), and consecutive
targets are joined by dyadic interpolation. The result is within epsilon of f
in the sup norm whenever S bounds f'.
"""

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import Settings, get_settings
from .dyadic import ONE, ZERO, Dyadic, find_dyadic_in, from_float
from .errors import ConstructionError, EpsilonOutOfRangeError, ParameterOutOfRangeError
from .funcspec import DiffeoSpec, require_valid_diffeo
from .interp import dyadic_interpolation
from .plmap import PLMap, Point, Space, validate_thompson

logger = logging.getLogger(__name__)

Interval = tuple[float, float]


@dataclass(frozen=True)
class ApproxParams:
    """Everything needed to reproduce one construction."""

    epsilon: float
    S: float
    Delta: int
    n: int
    delta: float
    xi: list[Dyadic] = field(default_factory=list)
    eta: list[Dyadic] = field(default_factory=list)
    I_intervals: list[Interval] = field(default_factory=list)  # I_1 .. I_(n-1)
    eta0_interval: Interval | None = None  # circle only
    elapsed: float = 0.0


def compute_params(epsilon: float, S: float) -> tuple[int, int]:
    """Delta = ceil(-log2(epsilon / 3S)) and n = 2^Delta."""
    if not (0.0 < epsilon < 1.0):
        raise EpsilonOutOfRangeError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (math.isfinite(S) and S >= 1.0):
        raise ParameterOutOfRangeError(f"S must be a finite value >= 1, got {S}")
    delta_exp = max(1, math.ceil(-math.log2(epsilon / (3.0 * S))))
    return delta_exp, 1 << delta_exp


def estimate_derivative_max(
    f: DiffeoSpec, grid_size: int | None = None, settings: Settings | None = None
) -> float:
    """Sampled max f' on [0, 1], times the safety factor, clamped below at 1."""
    settings = settings or get_settings()
    grid_size = grid_size or settings.derivative_grid
    xs = np.linspace(0.0, 1.0, grid_size + 1)
    sampled = float(np.max(f.derivative(xs)))
    return max(1.0, sampled * settings.derivative_safety)


def _choose_eta(lo: float, hi: float, settings: Settings) -> Dyadic:
    """A dyadic strictly inside (lo, hi), preferring a point away from both ends."""
    if not lo < hi:
        raise ConstructionError(f"Empty interval ({lo!r}, {hi!r})")
    width = hi - lo
    inner_lo = from_float(float(np.nextafter(lo, np.inf)))
    inner_hi = from_float(float(np.nextafter(hi, -np.inf)))
    for e in settings.eta_shrink_exponents:
        margin = math.ldexp(width, -e)
        a, b = lo + margin, hi - margin
        if not a < b:
            continue
        eta = find_dyadic_in(a, b)
        if inner_lo <= eta <= inner_hi:
            return eta
        logger.debug(f"eta {eta} from shrink 2^-{e} too close to ({lo!r}, {hi!r}), retrying")
    logger.warning(f"Shrunk intervals exhausted for ({lo!r}, {hi!r}); using the raw interval")
    return find_dyadic_in(lo, hi)


def _target_intervals(fx: np.ndarray, delta: float) -> list[Interval]:
    """I_i for 1 <= i <= n-1 from the samples f(xi_0), ..., f(xi_n)."""
    intervals: list[Interval] = []
    for i in range(1, len(fx) - 1):
        lo = max(float(fx[i - 1]) + delta, float(fx[i]))
        hi = float(fx[i]) + delta
        if not lo < hi:
            raise ConstructionError(f"I_{i} = ({lo!r}, {hi!r}) is empty")
        intervals.append((lo, hi))
    return intervals


def _assemble(space: Space, xi: list[Dyadic], eta: list[Dyadic]) -> PLMap:
    points: list[Point] = [(xi[0], eta[0])]
    for i in range(len(xi) - 1):
        segment = dyadic_interpolation((xi[i], eta[i]), (xi[i + 1], eta[i + 1]))
        points.extend(segment[1:])
    return PLMap(space, tuple(points))


def _sample(f: DiffeoSpec, n: int) -> np.ndarray:
    xs = np.arange(n + 1, dtype=float) / n
    return np.asarray(f.value(xs), dtype=float)


def _resolve_S(f: DiffeoSpec, S: float | None, settings: Settings) -> float:
    if S is not None:
        return S
    if f.S is not None:
        return f.S
    estimate = estimate_derivative_max(f, settings=settings)
    logger.debug(f"Estimated S = {estimate:.6g} for {f.label}")
    return estimate


def _finish(
    space: Space,
    epsilon: float,
    S: float,
    delta_exp: int,
    delta: float,
    eta: list[Dyadic],
    intervals: list[Interval],
    eta0_interval: Interval | None,
    started: float,
) -> tuple[PLMap, ApproxParams]:
    n = 1 << delta_exp
    xi = [Dyadic(i, delta_exp) for i in range(n + 1)]
    for i in range(n):
        if not eta[i] < eta[i + 1]:
            raise ConstructionError(f"Targets not increasing at {i}: {eta[i]} >= {eta[i + 1]}")

    g = _assemble(space, xi, eta)
    result = validate_thompson(g)
    if not result.ok:
        raise ConstructionError(
            "Assembled map is not a group element: "
            + "; ".join(v.message for v in result.violations)
        )

    params = ApproxParams(
        epsilon=epsilon,
        S=S,
        Delta=delta_exp,
        n=n,
        delta=delta,
        xi=xi,
        eta=eta,
        I_intervals=intervals,
        eta0_interval=eta0_interval,
        elapsed=time.perf_counter() - started,
    )
    logger.info(
        f"Built {space.value} element: Delta={delta_exp}, n={n}, delta={delta:.6g}, "
        f"{g.pieces} pieces in {params.elapsed:.3f}s"
    )
    return g, params


def approximate_interval(
    f: DiffeoSpec, epsilon: float, S: float | None = None, settings: Settings | None = None
) -> tuple[PLMap, ApproxParams]:
    """g in F with sup |f - g| < epsilon for an interval diffeomorphism f.

    Args:
        f: Orientation-preserving diffeomorphism of [0, 1]
        epsilon: Target distance, 0 < epsilon < 1
        S: Bound on f', estimated from a derivative scan when None
        settings: Overrides the process-wide settings

    Returns:
        The element g and the construction parameters (Delta, n, delta, eta)

    Raises:
        EpsilonOutOfRangeError: If epsilon is outside (0, 1)
        InvalidDiffeoError: If f is not increasing with f(0) = 0 and f(1) = 1
        ConstructionError: If a target interval is empty after rounding
    """
    settings = settings or get_settings()
    started = time.perf_counter()
    if not (0.0 < epsilon < 1.0):
        raise EpsilonOutOfRangeError(f"epsilon must lie in (0, 1), got {epsilon}")
    require_valid_diffeo(f)
    S = _resolve_S(f, S, settings)
    delta_exp, n = compute_params(epsilon, S)

    fx = _sample(f, n)
    fx[0], fx[n] = 0.0, 1.0
    delta = min(epsilon / 2.0, (fx[n] - fx[n - 1]) / 2.0)
    intervals = _target_intervals(fx, delta)
    logger.debug(f"Interval construction: S={S:.6g}, Delta={delta_exp}, delta={delta:.6g}")

    eta = [ZERO] + [_choose_eta(lo, hi, settings) for lo, hi in intervals] + [ONE]
    return _finish(
        Space.INTERVAL, epsilon, S, delta_exp, delta, eta, intervals, None, started
    )


def approximate_circle(
    f: DiffeoSpec, epsilon: float, S: float | None = None, settings: Settings | None = None
) -> tuple[PLMap, ApproxParams]:
    """g in T whose lift is within epsilon of the lift f."""
    settings = settings or get_settings()
    started = time.perf_counter()
    if not (0.0 < epsilon < 1.0):
        raise EpsilonOutOfRangeError(f"epsilon must lie in (0, 1), got {epsilon}")
    require_valid_diffeo(f)
    S = _resolve_S(f, S, settings)
    delta_exp, n = compute_params(epsilon, S)

    fx = _sample(f, n)
    fx[n] = fx[0] + 1.0
    delta = min(epsilon / 2.0, (fx[1] - fx[0]) / 2.0)
    intervals = _target_intervals(fx, delta)
    eta0_interval = (float(fx[0]) + delta, float(fx[1]))
    logger.debug(f"Circle construction: S={S:.6g}, Delta={delta_exp}, delta={delta:.6g}")

    eta0 = _choose_eta(*eta0_interval, settings)
    inner = [_choose_eta(lo, hi, settings) for lo, hi in intervals]
    eta_n = eta0 + ONE
    if not max(float(fx[n - 1]) + delta, float(fx[n])) < float(eta_n):
        raise ConstructionError(f"eta_n = {eta_n} does not clear f(xi_(n-1)) + delta")
    eta = [eta0, *inner, eta_n]
    return _finish(
        Space.CIRCLE, epsilon, S, delta_exp, delta, eta, intervals, eta0_interval, started
    )


def approximate(
    f: DiffeoSpec, epsilon: float, S: float | None = None, settings: Settings | None = None
) -> tuple[PLMap, ApproxParams]:
    if f.space is Space.CIRCLE:
        return approximate_circle(f, epsilon, S, settings)
    return approximate_interval(f, epsilon, S, settings)
