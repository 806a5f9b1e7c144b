"""
Core modules: dyadic arithmetic, PL elements, interpolation, input functions,
the approximation and its analysis.
"""

from .config import Settings, get_settings
from .dyadic import Dyadic, find_dyadic_in
from .plmap import PLMap, Space, compose, invert, validate_thompson

__all__ = [
    "Settings",
    "get_settings",
    "Dyadic",
    "find_dyadic_in",
    "PLMap",
    "Space",
    "compose",
    "invert",
    "validate_thompson",
]
