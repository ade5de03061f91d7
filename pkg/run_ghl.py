#!/usr/bin/env python3
"""
Run the group homology engine from a checkout.

Usage:
    python run_ghl.py compute --group cyclic:3 --theory ext-homology --degrees 0..2

Or with Poetry:
    poetry run ghl catalog
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from ghl.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
