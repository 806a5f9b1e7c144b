"""
Element and report files.

Elements are stored exactly: every coordinate is a pair [m, k] meaning
m / 2^k, with m written as a decimal string once it no longer fits in 53 bits.
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from ..core.analysis import Certificate
from ..core.dyadic import Dyadic
from ..core.errors import ElementFormatError, ThompsonError
from ..core.plmap import PLMap, Space, ValidationResult

logger = logging.getLogger(__name__)

ELEMENT_FILE_VERSION = 1

DyadicJSON = list[int | str]


class PointRecord(BaseModel):
    x: DyadicJSON
    y: DyadicJSON


class ElementFile(BaseModel):
    """On-disk form of a PLMap."""

    version: Literal[1] = ELEMENT_FILE_VERSION
    space: Space
    points: list[PointRecord] = Field(min_length=2)


class ReportFile(BaseModel):
    """Run parameters, certificate and validation outcome of one command."""

    command: str
    source: str | None = None
    space: Space
    epsilon: float | None = None
    S: float | None = None
    Delta: int | None = None
    n: int | None = None
    delta: float | None = None
    pieces: int
    certificate: Certificate | None = None
    validation: ValidationResult
    timing: dict[str, float] = Field(default_factory=dict)
    created_at: datetime = Field(default_factory=datetime.now)


def element_to_file(g: PLMap) -> ElementFile:
    return ElementFile(
        space=g.space,
        points=[PointRecord(x=x.to_json(), y=y.to_json()) for x, y in g.points],
    )


def element_from_file(data: ElementFile | dict[str, Any]) -> PLMap:
    """Rebuild the PLMap; any structural problem is an ElementFormatError."""
    try:
        record = data if isinstance(data, ElementFile) else ElementFile.model_validate(data)
        points = tuple((Dyadic.from_json(p.x), Dyadic.from_json(p.y)) for p in record.points)
        return PLMap(record.space, points)
    except ValidationError as e:
        raise ElementFormatError(f"Malformed element file: {e}") from e
    except ThompsonError:
        raise
    except (TypeError, ValueError) as e:
        raise ElementFormatError(f"Malformed element coordinates: {e}") from e


def _write_atomic(path: Path, data: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_file = path.with_suffix(path.suffix + ".tmp")
    with open(temp_file, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    temp_file.replace(path)


def save_element(g: PLMap, path: Path) -> None:
    _write_atomic(path, element_to_file(g).model_dump(mode="json"))
    logger.debug(f"Wrote {g.pieces}-piece {g.space.value} element to {path}")


def load_element(path: Path) -> PLMap:
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ElementFormatError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ElementFormatError(f"{path} does not hold an element object")
    g = element_from_file(data)
    logger.debug(f"Loaded {g.pieces}-piece {g.space.value} element from {path}")
    return g


def save_report(report: ReportFile, path: Path) -> None:
    _write_atomic(path, report.model_dump(mode="json"))
    logger.info(f"Report written to {path}")


def load_report(path: Path) -> ReportFile:
    with open(path) as f:
        return ReportFile.model_validate(json.load(f))
