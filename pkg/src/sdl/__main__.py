"""Allow ``python -m sdl`` as an alias for the ``sdl`` console script."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
