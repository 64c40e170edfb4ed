#!/usr/bin/env python3
"""
Farthest sampling segmentation command line.

    python main.py segment --mesh cube.off --metric angular --clusters 6 --frac 0.01 --seed 7
    python main.py beta --mesh model.off --metric geodesic --k 500
    python main.py lab errors --mesh model.off --metric geodesic --kgrid 1:500
    python main.py eval --a auto.seg --b truth.seg
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
