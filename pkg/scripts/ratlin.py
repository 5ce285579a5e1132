#!/usr/bin/env python3
"""
Command-line entry point for ratlin.

Usage:
    # Smith-McMillan form in the whole line
    python scripts/ratlin.py sm examples/G.rm

    # Is L a linearization of G at infinity with grade 2?
    python scripts/ratlin.py check-lin L.psm --target G.rm --inf --grade 2

    # Build a Su-Bai pencil and write its files next to the prefix
    python scripts/ratlin.py build subai params.yaml -o out/subai

Run `python scripts/ratlin.py --help` for every subcommand.
"""

import os
import sys

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cli import main

if __name__ == '__main__':
    sys.exit(main())
