#!/usr/bin/env python3
"""
Convenience shim to run Andermeans from a source checkout.
Usage: python andermeans.py [run|bench|gen] --help
"""

import sys

from andermeans.cli import main


if __name__ == "__main__":
    sys.exit(main())
