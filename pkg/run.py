#!/usr/bin/env python3
"""
Gradient-free methods toolkit entry point
"""

import sys

from gfm.cli import main

if __name__ == '__main__':
    sys.exit(main())
