"""Thompson group approximation.

Exact construction of elements of Thompson's groups F and T that approximate
interval and circle diffeomorphisms, with certified sup-norm error bounds.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("thompson-approx")
except PackageNotFoundError:
    __version__ = "unknown"

__all__ = ["__version__"]
