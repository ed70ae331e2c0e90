"""Seeded random row-finite matrices.

Each ``(seed, n, trial)`` gets its own PCG64 stream. A row's finite columns
are the first ``finite_per_row`` entries of a random permutation of the
columns, and its values are uniform integers in ``value_range``.
"""

import numpy as np

from tropabs.bench.config import BenchConfig
from tropabs.errors import DimensionError
from tropabs.tropical import TropicalMatrix, epsilon_matrix


def rng_for(cfg: BenchConfig, n: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, n, trial]))


def random_row_finite(n: int, cfg: BenchConfig, trial: int) -> TropicalMatrix:
    k = cfg.finite_per_row
    if k > n:
        raise DimensionError(f"finite_per_row={k} exceeds the dimension n={n}")
    rng = rng_for(cfg, n, trial)
    lo, hi = cfg.value_range
    A = epsilon_matrix(n)
    for i in range(n):
        columns = rng.permutation(n)[:k]
        A[i, columns] = rng.integers(lo, hi, size=k, endpoint=True)
    return A
