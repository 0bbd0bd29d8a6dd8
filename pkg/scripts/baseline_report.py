#!/usr/bin/env python3
"""Full coupling report for the measured device, printed as JSON.

Equivalent to: cavityforge report --paper-baseline
"""

import sys

from cavityforge.cli import main

if __name__ == "__main__":
    sys.exit(main(["report", "--paper-baseline", *sys.argv[1:]]))
