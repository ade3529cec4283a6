#!/usr/bin/env python3
"""Run the quick experiment suite into runs/quick (small grids, short sweeps)."""

import sys

from derham_gap.cli import main

if __name__ == "__main__":
    outdir = sys.argv[1] if len(sys.argv) > 1 else "runs/quick"
    raise SystemExit(main(["-o", outdir, "all", "--quick"]))
