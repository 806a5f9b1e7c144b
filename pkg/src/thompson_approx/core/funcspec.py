"""
Input diffeomorphisms: expression text, built-in families or PL elements.

A DiffeoSpec is what the construction and the analysis consume. It evaluates
value and derivative together (forward mode) on floats or numpy grids and
knows its space: an interval map of [0, 1] or the lift of a circle map.
"""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from pydantic import BaseModel, Field

from . import expr as ex
from .config import get_settings
from .dyadic import from_float
from .errors import (
    DomainError,
    ElementFormatError,
    InvalidDiffeoError,
    LiftViolationError,
    NonFiniteError,
    NonDyadicResultError,
    ParameterOutOfRangeError,
    SpaceMismatchError,
    UnknownFamilyError,
)
from .plmap import BreakpointSet, PLMap, Space, Violation, breakpoints

logger = logging.getLogger(__name__)


# --- sources ---------------------------------------------------------------


@dataclass(frozen=True)
class ExprSource:
    expr: ex.Expr
    text: str


@dataclass(frozen=True)
class FamilySource:
    name: str
    params: tuple[float, ...]
    expr: ex.Expr


@dataclass(frozen=True)
class ElementSource:
    element: PLMap


Source = ExprSource | FamilySource | ElementSource


@dataclass(frozen=True)
class DiffeoSpec:
    """An input function f (or lift f~) with an optional derivative bound S."""

    source: Source
    space: Space = Space.INTERVAL
    S: float | None = None

    @property
    def expr(self) -> ex.Expr | None:
        if isinstance(self.source, ElementSource):
            return None
        return self.source.expr

    @property
    def label(self) -> str:
        match self.source:
            case FamilySource(name=name, params=params):
                return name + (":" + ",".join(f"{p:g}" for p in params) if params else "")
            case ExprSource(text=text):
                return text
            case ElementSource(element=g):
                return f"element[{g.pieces} pieces]"
        return "?"

    def eval_dual(self, x: float | np.ndarray) -> ex.Dual:
        """Value and derivative at x; raises DomainError on a non-finite step."""
        if isinstance(self.source, ElementSource):
            g = self.source.element
            return ex.Dual(g.eval_lift_real(x), g.derivative_real(x))
        arr = np.asarray(x, dtype=float)
        out = ex.evaluate(self.source.expr, ex.Dual(arr, np.ones_like(arr)))
        value = np.broadcast_to(np.asarray(out.value, dtype=float), arr.shape)
        deriv = np.broadcast_to(np.asarray(out.deriv, dtype=float), arr.shape)
        if arr.ndim == 0:
            return ex.Dual(float(value), float(deriv))
        return ex.Dual(np.array(value), np.array(deriv))

    def value(self, x: float | np.ndarray) -> float | np.ndarray:
        return self.eval_dual(x).value

    def derivative(self, x: float | np.ndarray) -> float | np.ndarray:
        return self.eval_dual(x).deriv

    @property
    def is_piecewise_linear(self) -> bool:
        if isinstance(self.source, ElementSource):
            return True
        return ex.is_affine(self.source.expr)

    def pl_breakpoints(self) -> BreakpointSet | None:
        """Breakpoints of a piecewise-linear f, None for a smooth one."""
        if isinstance(self.source, ElementSource):
            return breakpoints(self.source.element)
        if ex.is_affine(self.source.expr):
            return BreakpointSet()
        return None

    @cached_property
    def as_plmap(self) -> PLMap | None:
        """f as an exact PLMap when it is piecewise linear with dyadic data."""
        if isinstance(self.source, ElementSource):
            return self.source.element
        if not self.is_piecewise_linear:
            return None
        try:
            y0 = from_float(float(self.value(0.0)))
            y1 = from_float(float(self.value(1.0)))
            return PLMap(self.space, ((0, y0), (1, y1)))
        except (DomainError, NonFiniteError, NonDyadicResultError, ElementFormatError):
            return None


def eval_dual(f: DiffeoSpec, x: float | np.ndarray) -> tuple[float | np.ndarray, float | np.ndarray]:
    out = f.eval_dual(x)
    return out.value, out.deriv


def parse(text: str, space: Space | str = Space.INTERVAL, S: float | None = None) -> DiffeoSpec:
    """DiffeoSpec from expression text in the variable x."""
    return DiffeoSpec(ExprSource(ex.parse(text), text), Space(space), S)


def element_spec(g: PLMap) -> DiffeoSpec:
    """Wrap an element so it can be compared, sampled or certified like any f."""
    return DiffeoSpec(ElementSource(g), g.space)


# --- families --------------------------------------------------------------


def _lit(p: float) -> str:
    return f"({p!r})"


def _bump(params: tuple[float, ...]) -> str:
    (a,) = params
    if not abs(a) < 1:
        raise ParameterOutOfRangeError(f"bump needs |a| < 1, got {a}")
    return f"x + {_lit(a)}*x*(1 - x)"


def _expwarp(params: tuple[float, ...]) -> str:
    (a,) = params
    if a == 0:
        raise ParameterOutOfRangeError("expwarp needs a != 0")
    return f"(exp({_lit(a)}*x) - 1)/(exp({_lit(a)}) - 1)"


def _rot(params: tuple[float, ...]) -> str:
    (c,) = params
    return f"x + {_lit(c)}"


def _sine(params: tuple[float, ...]) -> str:
    a, c = params if len(params) == 2 else (params[0], 0.0)
    if not abs(a) < 1:
        raise ParameterOutOfRangeError(f"sine needs |a| < 1, got {a}")
    if c == 0:
        return f"x + {_lit(a)}*sin(2*pi*x)/(2*pi)"
    return f"x + {_lit(c)} + {_lit(a)}*sin(2*pi*(x + {_lit(c)}))/(2*pi)"


# name -> (builder, allowed parameter counts, natural space or None for both)
FAMILIES = {
    "identity": (lambda params: "x", (0,), None),
    "bump": (_bump, (1,), Space.INTERVAL),
    "expwarp": (_expwarp, (1,), Space.INTERVAL),
    "rot": (_rot, (1,), Space.CIRCLE),
    "sine": (_sine, (1, 2), Space.CIRCLE),
}


def family(
    name: str, params: list[float] | tuple[float, ...] = (), space: Space | str | None = None
) -> DiffeoSpec:
    """Built-in family member; see FAMILIES for names and parameter counts."""
    if name not in FAMILIES:
        raise UnknownFamilyError(f"Unknown family {name!r} (known: {', '.join(FAMILIES)})")
    builder, counts, natural = FAMILIES[name]
    params = tuple(float(p) for p in params)
    if len(params) not in counts:
        raise ParameterOutOfRangeError(
            f"{name} takes {' or '.join(map(str, counts))} parameter(s), got {len(params)}"
        )
    if not all(np.isfinite(params)):
        raise ParameterOutOfRangeError(f"{name} parameters must be finite")

    if space is None:
        resolved = natural or Space.INTERVAL
    else:
        resolved = Space(space)
        if natural is not None and resolved is not natural:
            raise SpaceMismatchError(f"{name} is a {natural.value} family")

    text = builder(params)
    return DiffeoSpec(FamilySource(name, params, ex.parse(text)), resolved)


def parse_family(text: str, space: Space | str | None = None) -> DiffeoSpec:
    """Family from "name:p1,p2" syntax."""
    name, _, rest = text.strip().partition(":")
    try:
        params = [float(p) for p in rest.split(",")] if rest.strip() else []
    except ValueError as e:
        raise ParameterOutOfRangeError(f"Bad family parameters in {text!r}") from e
    return family(name.strip(), params, space)


# --- validation ------------------------------------------------------------


class DiffeoCheck(BaseModel):
    """Outcome of validate_interval_diffeo / validate_circle_lift."""

    ok: bool
    space: Space
    min_derivative: float | None = Field(default=None, description="Smallest sampled f'")
    violations: list[Violation] = Field(default_factory=list)


def _grid(grid_size: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, grid_size + 1)


def _derivative_check(f: DiffeoSpec, xs: np.ndarray, tol: float) -> tuple[float, list[Violation]]:
    deriv = np.asarray(f.derivative(xs), dtype=float)
    i = int(np.argmin(deriv))
    if deriv[i] > tol:
        return float(deriv[i]), []
    return float(deriv[i]), [
        Violation(
            kind="derivative",
            x=float(xs[i]),
            message=f"f'({xs[i]:.6g}) = {deriv[i]:.6g} is not above {tol:g}",
        )
    ]


def validate_interval_diffeo(
    f: DiffeoSpec, grid_size: int | None = None, tol: float | None = None
) -> DiffeoCheck:
    """Check f(0) = 0, f(1) = 1 within tolerance and f' > tol on a uniform grid."""
    if f.space is not Space.INTERVAL:
        raise SpaceMismatchError("validate_interval_diffeo needs an interval map")
    settings = get_settings()
    grid_size = grid_size or settings.validation_grid
    endpoint_tol = settings.endpoint_tol if tol is None else tol
    positivity_tol = settings.positivity_tol if tol is None else tol

    violations: list[Violation] = []
    try:
        f0, f1 = float(f.value(0.0)), float(f.value(1.0))
        if abs(f0) > endpoint_tol:
            violations.append(Violation(kind="endpoint", x=0.0, message=f"f(0) = {f0:.17g} != 0"))
        if abs(f1 - 1.0) > endpoint_tol:
            violations.append(Violation(kind="endpoint", x=1.0, message=f"f(1) = {f1:.17g} != 1"))
        min_deriv, bad = _derivative_check(f, _grid(grid_size), positivity_tol)
        violations.extend(bad)
    except DomainError as e:
        violations.append(Violation(kind="domain", message=str(e)))
        min_deriv = None

    return DiffeoCheck(
        ok=not violations, space=f.space, min_derivative=min_deriv, violations=violations
    )


def validate_circle_lift(
    f: DiffeoSpec, grid_size: int | None = None, tol: float | None = None
) -> DiffeoCheck:
    """Check f(x + 1) = f(x) + 1 and f' > tol on a uniform grid of [0, 1]."""
    if f.space is not Space.CIRCLE:
        raise SpaceMismatchError("validate_circle_lift needs a circle lift")
    settings = get_settings()
    grid_size = grid_size or settings.validation_grid
    lift_tol = settings.lift_tol if tol is None else tol
    positivity_tol = settings.positivity_tol if tol is None else tol

    violations: list[Violation] = []
    xs = _grid(grid_size)
    try:
        defect = np.abs(np.asarray(f.value(xs + 1.0)) - np.asarray(f.value(xs)) - 1.0)
        i = int(np.argmax(defect))
        if defect[i] > lift_tol:
            violations.append(
                Violation(
                    kind="lift",
                    x=float(xs[i]),
                    message=f"|f(x+1) - f(x) - 1| = {defect[i]:.6g} at x = {xs[i]:.6g}",
                )
            )
        min_deriv, bad = _derivative_check(f, xs, positivity_tol)
        violations.extend(bad)
    except DomainError as e:
        violations.append(Violation(kind="domain", message=str(e)))
        min_deriv = None

    return DiffeoCheck(
        ok=not violations, space=f.space, min_derivative=min_deriv, violations=violations
    )


def validate(f: DiffeoSpec, grid_size: int | None = None, tol: float | None = None) -> DiffeoCheck:
    if f.space is Space.CIRCLE:
        return validate_circle_lift(f, grid_size, tol)
    return validate_interval_diffeo(f, grid_size, tol)


def require_valid_diffeo(f: DiffeoSpec, grid_size: int | None = None) -> DiffeoCheck:
    """validate() that raises InvalidDiffeoError (LiftViolationError for lifts)."""
    check = validate(f, grid_size)
    if not check.ok:
        summary = "; ".join(v.message for v in check.violations)
        if any(v.kind == "lift" for v in check.violations):
            raise LiftViolationError(f"{f.label}: {summary}", check.violations)
        raise InvalidDiffeoError(f"{f.label}: {summary}", check.violations)
    logger.debug(f"{f.label} validated ({f.space.value}, min f' = {check.min_derivative:.6g})")
    return check
