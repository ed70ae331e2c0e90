from .config import BenchConfig, parse_dims
from .generator import random_row_finite
from .runner import BenchReport, BenchRow, bench_run

__all__ = [
    "BenchConfig",
    "BenchReport",
    "BenchRow",
    "bench_run",
    "parse_dims",
    "random_row_finite",
]
