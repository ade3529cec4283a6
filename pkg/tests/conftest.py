import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from derham_gap.grid import PRESETS, GridSpec, build_complex


@lru_cache(maxsize=32)
def cached_complex(lengths, cells, preset):
    return build_complex(GridSpec(lengths, cells, PRESETS[preset]()))


@pytest.fixture
def unit_cube_8():
    return lambda preset: cached_complex((1.0, 1.0, 1.0), (8, 8, 8), preset)
