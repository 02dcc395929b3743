"""Module entry point so python -m mdsense matches the console script."""

import sys

from .cli import main

sys.exit(main())
