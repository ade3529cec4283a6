"""Slope diagnostics shared by sweeps, the CLI and (by re-derivation) plots.

Figures and acceptance checks must agree on these numbers, so the formulas
are deliberately tiny and applied to the same CSV-roundtripped values.
"""

from __future__ import annotations

import numpy as np


def loglog_slope(x, y) -> float:
    """Ordinary least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    dx = lx - lx.mean()
    return float(np.sum(dx * (ly - ly.mean())) / np.sum(dx * dx))


def tail_slope(x, y) -> float:
    """Log-log slope between the two largest abscissae (asymptotic trend)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.argsort(x)
    x, y = x[order], y[order]
    return float((np.log(y[-1]) - np.log(y[-2])) / (np.log(x[-1]) - np.log(x[-2])))


def fit_decay_rate(t, energy, discard_fraction: float = 0.1,
                   floor_ratio: float = 1e-24) -> tuple[float, float]:
    """Amplitude decay rate from an energy trace.

    Least-squares slope of log(energy) over time after discarding the leading
    `discard_fraction` of samples and everything below `floor_ratio` times the
    peak (roundoff floor); the slope is halved because energy is quadratic.
    Returns (rate, rms fit residual of log energy).
    """
    t = np.asarray(t, dtype=float)
    e = np.asarray(energy, dtype=float)
    if t.size < 10:
        raise ValueError("trace too short to fit (need >= 10 samples)")
    start = int(np.floor(discard_fraction * t.size))
    t, e = t[start:], e[start:]
    keep = e > floor_ratio * np.max(e)
    t, e = t[keep], e[keep]
    if t.size < 10 or np.any(e <= 0.0):
        raise ValueError("not enough positive energies in the fit window")
    ly = np.log(e)
    dx = t - t.mean()
    slope = float(np.sum(dx * (ly - ly.mean())) / np.sum(dx * dx))
    resid = ly - (ly.mean() + slope * dx)
    return -slope / 2.0, float(np.sqrt(np.mean(resid**2)))
