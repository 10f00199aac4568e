#!/usr/bin/env python3
"""
Proximal comixture toolkit command line (comix).

Runs composite-average vs comixture solver comparisons on the deblurring,
phase recovery and overlapping group lasso experiments, and validates the
prox catalog against numerical oracles.
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.commands import main


if __name__ == '__main__':
    sys.exit(main())
