"""PWA representation and partition of a row-finite MPL matrix.

Public inputs are plain ``n x n`` matrices; the dummy row and column of
``x0`` are added internally. A region's ``coefficient`` is written the way
it is usually written, 1-based and of length ``n``; prepending 0 gives the
augmented coefficient, which indexes the augmented matrix directly.
"""

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import numpy.typing as npt

from tropabs.dbm import Dbm, canonical_form, contains_point
from tropabs.errors import (
    InvariantError,
    NotPartitionedError,
    UnknownCoefficientError,
)
from tropabs.parallel import map_chunked
from tropabs.tropical import (
    EPS,
    FiniteCoefficient,
    TropicalMatrix,
    augment_coefficient,
    augment_zero,
    count_finite_coefficients,
    enumerate_finite_coefficients,
    finite_columns,
    identity,
    mat_oplus,
    region_matrix,
    row_definite,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Region:
    coefficient: FiniteCoefficient
    zone: Dbm
    dynamics: TropicalMatrix

    @property
    def augmented_coefficient(self) -> FiniteCoefficient:
        return augment_coefficient(self.coefficient)


@dataclass(frozen=True, eq=False)
class PwaSystem:
    source: TropicalMatrix
    regions: tuple[Region, ...]
    partitioned: bool
    _index: dict[FiniteCoefficient, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {r.coefficient: k for k, r in enumerate(self.regions)}
        )

    @property
    def n(self) -> int:
        return self.source.shape[0] - 1

    @property
    def matrix(self) -> TropicalMatrix:
        """The system matrix without the dummy row and column."""
        return self.source[1:, 1:]

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self) -> Iterator[Region]:
        return iter(self.regions)

    def index_of(self, coefficient: Sequence[int]) -> int:
        key = tuple(int(j) for j in coefficient)
        try:
            return self._index[key]
        except KeyError:
            raise UnknownCoefficientError(
                f"No non-empty region with coefficient {key}"
            ) from None

    def region(self, coefficient: Sequence[int]) -> Region:
        return self.regions[self.index_of(coefficient)]


def region_zone(A: TropicalMatrix, g: FiniteCoefficient) -> Dbm:
    """``gĀ ⊕ I`` as a DBM with every sign non-strict (not canonical).

    ``A`` is augmented and ``g`` an augmented coefficient.
    """
    bounds = mat_oplus(row_definite(A, g), identity(A.shape[0]))
    return Dbm(n=A.shape[0] - 1, bounds=bounds, signs=bounds != EPS)


def sign_rule(R: Dbm) -> Dbm:
    """Strictness that makes the regions pairwise disjoint.

    Non-strict iff the bound is positive, or zero with ``i <= j``.
    """
    i, j = np.indices(R.bounds.shape)
    signs = (R.bounds > 0) | ((R.bounds == 0) & (i <= j))
    return Dbm(n=R.n, bounds=R.bounds, signs=signs)


def _build_region(A: TropicalMatrix, g: FiniteCoefficient, *, partition: bool) -> Region | None:
    zone = region_zone(A, g)
    if partition:
        zone = sign_rule(zone)
    zone = canonical_form(zone)
    if zone.empty:
        logger.debug("Coefficient %s gives an empty region", g[1:])
        return None
    logger.debug("Coefficient %s gives a non-empty region", g[1:])
    return Region(coefficient=g[1:], zone=zone, dynamics=region_matrix(A, g))


def _generate(
    A: TropicalMatrix, *, partition: bool, workers: int, chunk_size: int
) -> PwaSystem:
    A = np.asarray(A, dtype=np.float64)
    finite_columns(A)
    source = augment_zero(A)
    total = count_finite_coefficients(source)
    logger.info(
        "Enumerating %d finite coefficients of a %dx%d matrix", total, *A.shape
    )
    built = map_chunked(
        partial(_build_region, source, partition=partition),
        enumerate_finite_coefficients(source),
        workers=workers,
        chunk_size=chunk_size,
    )
    regions = tuple(r for r in built if r is not None)
    logger.info(
        "%s: %d non-empty regions out of %d coefficients",
        "Partition" if partition else "PWA system",
        len(regions),
        total,
    )
    return PwaSystem(source=source, regions=regions, partitioned=partition)


def generate_pwa(A: TropicalMatrix, *, workers: int = 1, chunk_size: int = 256) -> PwaSystem:
    """All non-empty PWA regions with non-strict boundaries (may overlap)."""
    return _generate(A, partition=False, workers=workers, chunk_size=chunk_size)


def generate_partition(
    A: TropicalMatrix, *, workers: int = 1, chunk_size: int = 256
) -> PwaSystem:
    """Pairwise disjoint regions covering R^n: the abstract states."""
    return _generate(A, partition=True, workers=workers, chunk_size=chunk_size)


def are_adjacent(g: Sequence[int], g2: Sequence[int], pwa: PwaSystem) -> bool:
    """Whether ``R_g > R_g2``: a single index where ``g`` is larger, equal elsewhere."""
    pwa.index_of(g)
    pwa.index_of(g2)
    diffs = [(a, b) for a, b in zip(g, g2, strict=True) if a != b]
    return len(diffs) == 1 and diffs[0][0] > diffs[0][1]


def locate(x: Sequence[float] | npt.NDArray[np.float64], pwa: PwaSystem) -> int:
    """Index of the unique region of a partition containing ``x``."""
    if not pwa.partitioned:
        raise NotPartitionedError("locate needs a partition, not an overlapping PWA system")
    hits = [k for k, r in enumerate(pwa.regions) if contains_point(r.zone, x)]
    if len(hits) != 1:
        raise InvariantError(
            f"Point {list(np.asarray(x))} lies in {len(hits)} regions of the partition"
        )
    return hits[0]
