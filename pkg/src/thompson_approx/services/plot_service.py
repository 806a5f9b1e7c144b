"""
PNG rendering of group elements.

Two pictures of an element are supported: the lift picture (graph of g on
[0, 1], values in [0, 1] for F and [y0, y0 + 1] for T) and the circle picture
(values reduced mod 1, one branch per crossing of an integer). An input
function f can be overlaid in the same frame.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..core.funcspec import DiffeoSpec
from ..core.plmap import PLMap, Space, circle_branches

logger = logging.getLogger(__name__)

RGB = tuple[int, int, int]
Mode = Literal["lift", "circle"]


@dataclass
class PlotDimensions:
    width: int = 480
    height: int = 480


@dataclass
class PlotSpacing:
    margin: int = 40  # around the plot frame
    label_offset: int = 4
    tick_length: int = 4


@dataclass
class PlotColors:
    background: RGB = (255, 255, 255)
    frame: RGB = (0, 0, 0)
    grid: RGB = (215, 215, 215)
    element: RGB = (0, 0, 0)
    breakpoint: RGB = (0, 0, 0)
    overlay: RGB = (200, 40, 40)
    text: RGB = (0, 0, 0)


@dataclass
class PlotStrokes:
    frame: int = 1
    grid: int = 1
    element: int = 2
    overlay: int = 1
    breakpoint_radius: int = 2


@dataclass
class PlotTheme:
    """Sizes, spacing, colors and strokes used by render_element."""

    dimensions: PlotDimensions = field(default_factory=PlotDimensions)
    spacing: PlotSpacing = field(default_factory=PlotSpacing)
    colors: PlotColors = field(default_factory=PlotColors)
    strokes: PlotStrokes = field(default_factory=PlotStrokes)
    overlay_samples: int = 512
    max_marked_breakpoints: int = 64  # beyond this, breakpoints are not marked

    @property
    def plot_area(self) -> tuple[int, int, int, int]:
        """(left, top, right, bottom) of the frame."""
        m = self.spacing.margin
        return (m, m, self.dimensions.width - m, self.dimensions.height - m)


theme = PlotTheme()


class _Frame:
    """Maps data coordinates in [0, 1] x [y_lo, y_hi] to pixels."""

    def __init__(self, area: tuple[int, int, int, int], y_lo: float, y_hi: float):
        self.left, self.top, self.right, self.bottom = area
        self.y_lo, self.y_hi = y_lo, y_hi

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        px = self.left + x * (self.right - self.left)
        py = self.bottom - (y - self.y_lo) / (self.y_hi - self.y_lo) * (self.bottom - self.top)
        return px, py


def _draw_axes(draw: ImageDraw.ImageDraw, frame: _Frame, plot_theme: PlotTheme) -> None:
    font = ImageFont.load_default()
    colors, strokes, spacing = plot_theme.colors, plot_theme.strokes, plot_theme.spacing

    for k in range(1, 4):
        gx, _ = frame(k / 4, frame.y_lo)
        draw.line([(gx, frame.top), (gx, frame.bottom)], fill=colors.grid, width=strokes.grid)
    steps = int(round((frame.y_hi - frame.y_lo) * 4))
    for k in range(1, steps):
        _, gy = frame(0.0, frame.y_lo + k / 4)
        draw.line([(frame.left, gy), (frame.right, gy)], fill=colors.grid, width=strokes.grid)

    draw.rectangle(
        [frame.left, frame.top, frame.right, frame.bottom],
        outline=colors.frame,
        width=strokes.frame,
    )
    for x in (0.0, 0.5, 1.0):
        px, _ = frame(x, frame.y_lo)
        draw.text(
            (px - 6, frame.bottom + spacing.label_offset), f"{x:g}", fill=colors.text, font=font
        )
    for k in range(steps + 1):
        y = frame.y_lo + k / 4
        if k % 2:
            continue
        _, py = frame(0.0, y)
        draw.text((spacing.label_offset, py - 6), f"{y:g}", fill=colors.text, font=font)


def _y_range(g: PLMap, mode: Mode) -> tuple[float, float]:
    if g.space is Space.INTERVAL or mode == "circle":
        return 0.0, 1.0
    return 0.0, 2.0


def _element_polylines(g: PLMap, mode: Mode) -> list[list[tuple[float, float]]]:
    if g.space is Space.CIRCLE and mode == "circle":
        return [[(float(x), float(y)) for x, y in branch] for branch in circle_branches(g)]
    return [[(float(x), float(y)) for x, y in g.points]]


def _overlay_polylines(
    f: DiffeoSpec, g: PLMap, mode: Mode, samples: int
) -> list[list[tuple[float, float]]]:
    xs = np.linspace(0.0, 1.0, samples + 1)
    ys = np.asarray(f.value(xs), dtype=float)
    if g.space is Space.CIRCLE:
        ys = ys + round(float(g.points[0][1]) - float(ys[0]))
        if mode == "circle":
            ys = ys - np.floor(ys)
            # break the curve where it wraps
            cuts = np.nonzero(np.diff(ys) < 0)[0] + 1
            pieces = zip(np.split(xs, cuts), np.split(ys, cuts), strict=True)
            return [list(zip(px.tolist(), py.tolist(), strict=True)) for px, py in pieces]
    return [list(zip(xs.tolist(), ys.tolist(), strict=True))]


def render_element(
    g: PLMap,
    f: DiffeoSpec | None = None,
    mode: Mode = "lift",
    size: tuple[int, int] | None = None,
    plot_theme: PlotTheme | None = None,
) -> Image.Image:
    """Draw g (and optionally f) into a new RGB image."""
    if mode not in ("lift", "circle"):
        raise ValueError(f"Unknown plot mode {mode!r}")
    plot_theme = plot_theme or theme
    if size is not None:
        plot_theme = PlotTheme(
            dimensions=PlotDimensions(*size),
            spacing=plot_theme.spacing,
            colors=plot_theme.colors,
            strokes=plot_theme.strokes,
            overlay_samples=plot_theme.overlay_samples,
            max_marked_breakpoints=plot_theme.max_marked_breakpoints,
        )
    dims, colors, strokes = plot_theme.dimensions, plot_theme.colors, plot_theme.strokes

    image = Image.new("RGB", (dims.width, dims.height), colors.background)
    draw = ImageDraw.Draw(image)
    frame = _Frame(plot_theme.plot_area, *_y_range(g, mode))
    _draw_axes(draw, frame, plot_theme)

    if f is not None:
        for line in _overlay_polylines(f, g, mode, plot_theme.overlay_samples):
            if len(line) >= 2:
                draw.line([frame(x, y) for x, y in line], fill=colors.overlay, width=strokes.overlay)

    for line in _element_polylines(g, mode):
        pixels = [frame(x, y) for x, y in line]
        draw.line(pixels, fill=colors.element, width=strokes.element)
        if g.pieces <= plot_theme.max_marked_breakpoints:
            r = strokes.breakpoint_radius
            for px, py in pixels:
                draw.ellipse([px - r, py - r, px + r, py + r], fill=colors.breakpoint)

    logger.debug(f"Rendered {g.pieces}-piece element ({mode}) at {dims.width}x{dims.height}")
    return image


def save_png(image: Image.Image, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    image.save(path, format="PNG")
    logger.info(f"Saved plot to {path}")
