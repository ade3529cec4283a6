#!/usr/bin/env python3
"""Run the full experiment suite into runs/full (acceptance-scale grids)."""

import sys

from derham_gap.cli import main

if __name__ == "__main__":
    outdir = sys.argv[1] if len(sys.argv) > 1 else "runs/full"
    raise SystemExit(main(["-o", outdir, "all"]))
