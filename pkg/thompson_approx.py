#!/usr/bin/env python3
"""Development wrapper for thompson-approx.

The package entry point is src/thompson_approx/__main__.py.

Installed: thompson-approx <command> ...
Development: python -m thompson_approx <command> ...
"""

if __name__ == "__main__":
    import sys

    from thompson_approx.__main__ import main

    sys.exit(main())
