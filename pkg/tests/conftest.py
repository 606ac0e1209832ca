"""Shared fixtures: sample banks reused across test modules.

Banks are deterministic (counter-based streams keyed by bank id), so a
disk cache under tests/.bankcache only saves build time; deleting it
never changes a test outcome.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from logchaos.gmc import SampleBank, create_bank, load_bank, save_bank
from logchaos.params import ModelParams

CACHE_DIR = Path(__file__).parent / ".bankcache"


def cached_bank(params: ModelParams, radius: float, cpa: int, n: int, bank_id: int) -> SampleBank:
    CACHE_DIR.mkdir(exist_ok=True)
    tag = (
        f"d{params.d}-g{params.gamma:g}-T{params.T:g}"
        f"-r{radius:g}-c{cpa}-n{n}-id{bank_id}"
    )
    path = CACHE_DIR / f"{tag}.bank"
    if path.exists():
        return load_bank(str(path))
    bank = create_bank(params, radius, cpa, n, bank_id=bank_id)
    save_bank(bank, str(path))
    return bank


def synthetic_bank(masses, params: ModelParams | None = None) -> SampleBank:
    """Wrap an explicit mass vector as a bank (for estimator tests where
    the mass law must be known in closed form)."""
    m = np.asarray(masses, dtype=float)
    return SampleBank(
        params=params or ModelParams(1, 1.0, 0.5),
        radius=1.0,
        cells_per_axis=2,
        epsilon=1.0,
        bank_id=0,
        n_samples=m.size,
        n_cells=2,
        total_volume=2.0,
        masses=m,
    )


@pytest.fixture(scope="session")
def bank_d1():
    """Unit-ball bank of the one-dimensional reference model."""
    return cached_bank(ModelParams(1, 1.0, 0.5), 1.0, 64, 20000, 101)


@pytest.fixture(scope="session")
def bank_d1_half():
    """Direct radius-1/2 bank at the same cell count per axis, so its
    law coincides with the scaled unit-bank law exactly."""
    return cached_bank(ModelParams(1, 1.0, 0.5), 0.5, 64, 20000, 102)


@pytest.fixture(scope="session")
def bank_d1_g12():
    """gamma = 1.2 unit-ball bank (non-integer b and q)."""
    return cached_bank(ModelParams(1, 1.2, 0.5), 1.0, 64, 20000, 106)


@pytest.fixture(scope="session")
def bank_d3():
    """Three-dimensional bank at the closed-form kernel-scale bound."""
    return cached_bank(ModelParams(3, 1.0, math.e / 2.0), 1.0, 12, 50000, 301)
