#!/usr/bin/env python3
"""Produce the four gap-vs-length CSVs behind the trichotomy figure."""

import sys

from derham_gap.cli import main

SCANS = [
    ("grad", "scalar", "x"),
    ("div", "normal", "x"),
    ("curl", "tangential", "x"),
    ("curl", "tangential", "xy"),
]

if __name__ == "__main__":
    base = sys.argv[1] if len(sys.argv) > 1 else "runs/trichotomy"
    code = 0
    for op, bc, axes in SCANS:
        code |= main(
            ["-o", f"{base}/{op}-{bc}-{axes}", "gap-scan", "--op", op, "--bc", bc,
             "--axes", axes, "--lengths", "1,2,4,8", "--per-unit", "8"]
        )
    raise SystemExit(code)
