"""
Centralized path management for development checkouts and installed use.

Environment variables override every path:
- THOMPSON_LOG_DIR: Log directory (file logging is opt-in)
- THOMPSON_FIGURES_DIR: Output directory of generate_figures.py

Development mode is auto-detected by a pyproject.toml next to src/.
"""

import os
from functools import lru_cache
from pathlib import Path


@lru_cache(maxsize=1)
def get_project_root() -> Path:
    """Project root (3 levels up from src/thompson_approx/paths.py)."""
    return Path(__file__).parent.parent.parent


@lru_cache(maxsize=1)
def _is_development() -> bool:
    root = get_project_root()
    return (root / "pyproject.toml").exists() and (root / "src").is_dir()


def get_log_dir() -> Path:
    """Log directory.

    Priority:
    1. THOMPSON_LOG_DIR environment variable
    2. ./var/log/thompson-approx (development)
    3. ~/.local/state/thompson-approx/log (installed)
    """
    if override := os.getenv("THOMPSON_LOG_DIR"):
        return Path(override)

    if _is_development():
        return get_project_root() / "var" / "log" / "thompson-approx"

    return Path.home() / ".local" / "state" / "thompson-approx" / "log"


def get_figures_dir() -> Path:
    """Figure output directory (THOMPSON_FIGURES_DIR, else /tmp/thompson_figures)."""
    if override := os.getenv("THOMPSON_FIGURES_DIR"):
        return Path(override)
    return Path("/tmp/thompson_figures")
