"""Figure kinds: gap-sweep, ratio-slopes, energy-decay, convergence.

Each renderer validates the CSV header against the documented schema, draws
the figure, and returns a sidecar dict of the fitted numbers it displayed.
The fit formulas mirror the experiment driver's diagnostics exactly (same
arithmetic on the same CSV-roundtripped doubles), so sidecar values agree
with the driver's JSON to well below 1e-9.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SCHEMAS = {
    "gap-sweep": ["operator", "bc", "l1", "l2", "l3", "n1", "n2", "n3", "gap",
                  "kernel_dim", "method"],
    "ratio-slopes": ["kind", "n", "norm_sq", "dnorm_sq", "ratio"],
    "energy-decay": ["t", "total", "range", "kernel"],
    "convergence": ["operator", "family", "h", "index", "discrete", "oracle", "abs_error"],
}


class SchemaError(ValueError):
    pass


def read_rows(path, kind: str) -> list[dict]:
    want = SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != want:
            raise SchemaError(f"{path}: header {header} does not match schema {want}")
        rows = [dict(zip(header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


# --- fit formulas, identical to the experiment driver's diagnostics ---------

def loglog_slope(x, y) -> float:
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    dx = lx - lx.mean()
    return float(np.sum(dx * (ly - ly.mean())) / np.sum(dx * dx))


def tail_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.argsort(x)
    x, y = x[order], y[order]
    return float((np.log(y[-1]) - np.log(y[-2])) / (np.log(x[-1]) - np.log(x[-2])))


def fit_decay_rate(t, energy, discard_fraction: float = 0.1,
                   floor_ratio: float = 1e-24) -> tuple[float, float]:
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


# --- renderers ---------------------------------------------------------------

def render_gap_sweep(csv_paths, out_path) -> dict:
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    sidecar = {}
    all_l = []
    for path in csv_paths:
        rows = read_rows(path, "gap-sweep")
        groups = {}
        for r in rows:
            groups.setdefault((r["operator"], r["bc"]), []).append(r)
        for (op, bc), rs in groups.items():
            ell = np.array([float(r["l1"]) for r in rs])
            gap = np.array([float(r["gap"]) for r in rs])
            order = np.argsort(ell)
            ell, gap = ell[order], gap[order]
            all_l.extend(ell)
            label = f"{op} ({bc})"
            ax.loglog(ell, gap, "o-", label=label)
            sidecar[label] = {
                "slope_ols": loglog_slope(ell, gap),
                "slope_tail": tail_slope(ell, gap),
            }
    lref = np.array([min(all_l), max(all_l)])
    ax.loglog(lref, lref**0.0 * np.exp(0.0), ":", color="0.6", label="slope 0")
    ax.loglog(lref, lref**-1.0 * float(np.exp(1.0)), ":", color="0.3", label="slope -1")
    ax.set_xlabel("box length")
    ax.set_ylabel("spectral gap")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return sidecar


def render_ratio_slopes(csv_paths, out_path) -> dict:
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    sidecar = {}
    for path in csv_paths:
        rows = read_rows(path, "ratio-slopes")
        groups = {}
        for r in rows:
            groups.setdefault(r["kind"], []).append(r)
        for kind, rs in groups.items():
            n = np.array([float(r["n"]) for r in rs])
            order = np.argsort(n)
            n = n[order]
            ratio = np.array([float(r["ratio"]) for r in rs])[order]
            norm_sq = np.array([float(r["norm_sq"]) for r in rs])[order]
            dnorm_sq = np.array([float(r["dnorm_sq"]) for r in rs])[order]
            ax.loglog(n, ratio, "o-", label=kind)
            sidecar[kind] = {
                "norm_slope": loglog_slope(n, norm_sq),
                "dnorm_slope": loglog_slope(n, dnorm_sq),
                "ratio_slope": loglog_slope(n, ratio),
            }
    ax.set_xlabel("profile width n")
    ax.set_ylabel("|field| / |derivative|")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return sidecar


def render_energy_decay(csv_paths, out_path) -> dict:
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    sidecar = {}
    for path in csv_paths:
        rows = read_rows(path, "energy-decay")
        t = np.array([float(r["t"]) for r in rows])
        for component in ("total", "range", "kernel"):
            e = np.array([float(r[component]) for r in rows])
            if np.max(e) <= 0:
                sidecar[component] = None
                continue
            positive = e > 0
            ax.semilogy(t[positive], e[positive], label=component)
            try:
                eta, resid = fit_decay_rate(t, e)
                sidecar[component] = {"eta": eta, "fit_residual": resid}
                tt = np.linspace(t[0], t[-1], 50)
                scale = e[positive][0] * np.exp(2.0 * eta * t[positive][0])
                ax.semilogy(tt, scale * np.exp(-2.0 * eta * tt), "--", alpha=0.6)
                ax.annotate(f"eta({component}) = {eta:.3f}",
                            xy=(0.55, 0.9 - 0.08 * len(sidecar)),
                            xycoords="axes fraction", fontsize=8)
            except ValueError:
                sidecar[component] = None
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return sidecar


def render_convergence(csv_paths, out_path) -> dict:
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    sidecar = {}
    for path in csv_paths:
        rows = read_rows(path, "convergence")
        groups = {}
        for r in rows:
            groups.setdefault(r["operator"], []).append(r)
        for op, rs in groups.items():
            errs = {}
            for r in rs:
                errs.setdefault(float(r["h"]), []).append(float(r["abs_error"]))
            hs = sorted(errs)
            totals = [sum(errs[h]) for h in hs]
            ax.loglog(hs, totals, "o-", label=op)
            sidecar[op] = {
                "error_ratio": totals[1] / totals[0] if len(totals) == 2 and totals[0] > 0 else None,
                "slope_ols": loglog_slope(hs, totals) if len(hs) >= 2 else None,
            }
            href = np.array([min(hs), max(hs)])
            ax.loglog(href, totals[-1] * (href / hs[-1]) ** 2, ":", color="0.5")
    ax.set_xlabel("h")
    ax.set_ylabel("summed |eigenvalue error|")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return sidecar


RENDERERS = {
    "gap-sweep": render_gap_sweep,
    "ratio-slopes": render_ratio_slopes,
    "energy-decay": render_energy_decay,
    "convergence": render_convergence,
}


def render(kind: str, csv_paths, out_path) -> dict:
    """Render one figure kind; returns the sidecar and writes it next to the image."""
    if kind not in RENDERERS:
        raise SchemaError(f"unknown figure kind {kind!r}; choose from {sorted(RENDERERS)}")
    for p in csv_paths:
        if not Path(p).exists():
            raise SchemaError(f"missing CSV {p}")
    sidecar = RENDERERS[kind](csv_paths, out_path)
    import json

    sidecar_path = Path(out_path).with_suffix(Path(out_path).suffix + ".json")
    with open(sidecar_path, "w") as fh:
        json.dump({"kind": kind, "inputs": [str(p) for p in csv_paths],
                   "fits": sidecar}, fh, indent=2)
    return sidecar
