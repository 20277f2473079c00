#!/usr/bin/env python3
"""
DYAD - exact solver for bilinear systems of equations.
Command-line entry point.
"""

import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.cli import run


def main():
    """Parse the command line, run one command and exit with its code."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
