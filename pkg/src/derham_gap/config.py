"""INI-style configuration files shared by the grid and evolution drivers.

Documented keys::

    [grid]
    lengths = 1.0, 1.0, 1.0
    cells   = 8, 8, 8
    bc      = tangential            ; preset: free/scalar/tangential/normal/mixed
    bc.x-   = tangential_zero       ; optional per-face flags instead of a preset
    ...     ; faces: x-, x+, y-, y+, z-, z+

    [evolution]
    eps = 1.0
    mu = 1.0
    sigma = 1.0
    dt = 0.01
    t_end = 10.0
    seed = 0
"""

from __future__ import annotations

import configparser

from .errors import DerhamGapError
from .grid import FACE_KEYS, PRESETS, GridSpec, bc_from_flags


def _parse_triple(text: str, cast):
    parts = [p.strip() for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 3:
        raise DerhamGapError(f"expected three comma-separated values, got {text!r}")
    return tuple(cast(p) for p in parts)


def read_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise DerhamGapError(f"unreadable config file {path!r}")
    return parser


def grid_spec_from_config(parser: configparser.ConfigParser) -> GridSpec:
    if "grid" not in parser:
        raise DerhamGapError("config is missing the [grid] section")
    section = parser["grid"]
    lengths = _parse_triple(section.get("lengths", "1,1,1"), float)
    cells = _parse_triple(section.get("cells", "8,8,8"), int)
    face_flags = {}
    for key in FACE_KEYS:
        val = section.get(f"bc.{key}")
        if val is not None:
            face_flags[key] = val.strip()
    if face_flags:
        bc = bc_from_flags(face_flags)
    else:
        preset = section.get("bc", "free").strip()
        if preset not in PRESETS:
            raise DerhamGapError(f"unknown bc preset {preset!r}")
        bc = PRESETS[preset]()
    return GridSpec(lengths, cells, bc)


def evolution_params_from_config(parser: configparser.ConfigParser) -> dict:
    section = parser["evolution"] if "evolution" in parser else {}
    get = section.get if hasattr(section, "get") else (lambda *a, **k: None)
    return {
        "eps": float(get("eps", "1.0")),
        "mu": float(get("mu", "1.0")),
        "sigma": float(get("sigma", "1.0")),
        "dt": float(get("dt", "0.01")),
        "t_end": float(get("t_end", "10.0")),
        "seed": int(get("seed", "0")),
    }


def read_grid_spec(path) -> GridSpec:
    return grid_spec_from_config(read_config(path))


def read_evolution_params(path) -> dict:
    return evolution_params_from_config(read_config(path))
