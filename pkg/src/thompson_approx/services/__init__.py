"""
Service modules: element/report files and PNG rendering.
"""

from .element_io import ElementFile, ReportFile, load_element, save_element
from .plot_service import render_element, save_png

__all__ = [
    "ElementFile",
    "ReportFile",
    "load_element",
    "save_element",
    "render_element",
    "save_png",
]
