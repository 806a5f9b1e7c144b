"""Exception hierarchy shared by the core modules and the CLI."""

from typing import Any


class ThompsonError(Exception):
    """Base class for every error raised by thompson_approx."""


class NonFiniteError(ThompsonError, ValueError):
    """A NaN or infinite float was given where a finite value is required."""


class InvalidIntervalError(ThompsonError, ValueError):
    """An open interval (p, q) with p >= q."""


class NonDyadicResultError(ThompsonError, ArithmeticError):
    """An exact result exists but is not a dyadic rational."""


class OutOfDomainError(ThompsonError, ValueError):
    """Evaluation point outside [0, 1]."""


class OutOfRangeError(ThompsonError, ValueError):
    """Argument outside its admissible range."""


class SpaceMismatchError(ThompsonError, ValueError):
    """Interval and circle objects were mixed in one operation."""


class DegenerateRectangleError(ThompsonError, ValueError):
    """Interpolation endpoints that do not span a proper rectangle."""


class ElementFormatError(ThompsonError, ValueError):
    """Malformed element data (structure, ordering, endpoints or file layout)."""


class InvalidElementError(ThompsonError, ValueError):
    """A PL map that is not an element of F or T."""

    def __init__(self, message: str, violations: list[Any] | None = None):
        super().__init__(message)
        self.violations = violations or []


class ExprSyntaxError(ThompsonError, ValueError):
    """Expression text that does not parse."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier that is neither x, a constant, nor a known function."""


class DomainError(ThompsonError, ArithmeticError):
    """Expression evaluation produced a non-finite intermediate."""


class UnknownFamilyError(ThompsonError, ValueError):
    """Unknown built-in family name."""


class ParameterOutOfRangeError(ThompsonError, ValueError):
    """Family or construction parameter outside its admissible range."""


class EpsilonOutOfRangeError(ParameterOutOfRangeError):
    """Approximation tolerance outside (0, 1)."""


class InvalidDiffeoError(ThompsonError, ValueError):
    """Input function failed the diffeomorphism or lift checks."""

    def __init__(self, message: str, violations: list[Any] | None = None):
        super().__init__(message)
        self.violations = violations or []


class LiftViolationError(InvalidDiffeoError):
    """Input function is not the lift of a circle map."""


class ConstructionError(ThompsonError, RuntimeError):
    """The approximation could not be assembled (empty safety-shrunk interval)."""


class RotationInputError(ThompsonError, ValueError):
    """The derivative gap is identically zero: the input is a rotation."""
