"""Images and inverse images of DBMs, and finite-horizon reach sets.

Affine dynamics ``x'_i = x_{g_i} + A_g(i, g_i)`` are given by a coefficient
``g`` (1-based, length ``n``, as stored on :class:`~tropabs.pwa.Region`) and
the region matrix ``Ag``. ``Ag`` may be the plain ``n x n`` matrix or the
augmented one with the dummy row and column in front.
"""

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import partial
from typing import Literal

import numpy as np
import numpy.typing as npt

from tropabs.counters import tally
from tropabs.dbm import (
    Dbm,
    canonical_form,
    contains_point,
    embed,
    empty_dbm,
    from_constraints,
    intersect,
    restrict,
)
from tropabs.errors import (
    DimensionError,
    InvalidCoefficientError,
    InvariantError,
    NotCanonicalError,
    NotPartitionedError,
)
from tropabs.parallel import map_chunked
from tropabs.pwa import PwaSystem, Region
from tropabs.tropical import (
    EPS,
    TropicalMatrix,
    augment_coefficient,
    augment_zero,
    conjugate,
    identity,
    is_finite_coefficient,
    mat_oplus,
    mat_otimes,
)

logger = logging.getLogger(__name__)

type Direction = Literal["fwd", "bwd"]


@dataclass(frozen=True)
class DbmUnion:
    """A finite union of canonical, non-empty DBMs. No parts means ∅."""

    n: int
    parts: tuple[Dbm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        for part in self.parts:
            if part.n != self.n:
                raise DimensionError(f"Union over {self.n} variables got a part over {part.n}")
            if not part.canonical or part.empty is not False:
                raise InvariantError("Union parts must be canonical and non-empty")

    @classmethod
    def of(cls, n: int, dbms: Sequence[Dbm]) -> "DbmUnion":
        """Canonicalize every DBM and drop the empty ones."""
        parts = [canonical_form(D) for D in dbms]
        return cls(n=n, parts=tuple(C for C in parts if not C.empty))

    @classmethod
    def from_dbm(cls, D: Dbm) -> "DbmUnion":
        return cls.of(D.n, [D])

    def is_empty(self) -> bool:
        return not self.parts

    def contains_point(self, x: Sequence[float] | npt.NDArray[np.float64]) -> bool:
        return any(contains_point(part, x) for part in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[Dbm]:
        return iter(self.parts)


def _dynamics(n: int, g: Sequence[int], Ag: TropicalMatrix) -> tuple[npt.NDArray[np.intp], TropicalMatrix]:
    """Augmented coefficient as an index array, and the augmented region matrix."""
    Ag = np.asarray(Ag, dtype=np.float64)
    if Ag.shape == (n, n):
        Ag = augment_zero(Ag)
    if Ag.shape != (n + 1, n + 1):
        raise DimensionError(f"Dynamics of shape {Ag.shape} do not act on {n} variables")
    ga = augment_coefficient(g)
    if len(ga) != n + 1 or not is_finite_coefficient(Ag, ga):
        raise InvalidCoefficientError(f"{tuple(g)} is not a finite coefficient of these dynamics")
    return np.asarray(ga, dtype=np.intp), Ag


def image_affine(D: Dbm, g: Sequence[int], Ag: TropicalMatrix) -> Dbm:
    """Image of a canonical DBM, read entry by entry from ``D``.

    ``D'(i, j) = D(g_i, g_j) + A_g(i, g_i) - A_g(j, g_j)`` with the sign of
    ``D(g_i, g_j)``. The result is canonical.
    """
    if not D.canonical:
        raise NotCanonicalError("The image is read off the bounds of a canonical DBM")
    ga, Ag = _dynamics(D.n, g, Ag)
    if D.empty:
        return empty_dbm(D.n)
    c = Ag[np.arange(D.n + 1), ga]
    sub = np.ix_(ga, ga)
    bounds = D.bounds[sub] + c[:, np.newaxis] - c[np.newaxis, :]
    tally("affine", (D.n + 1) ** 2)
    tally("calls.image_affine", 1)
    return Dbm(n=D.n, bounds=bounds, signs=D.signs[sub], canonical=True, empty=D.empty)


def image_affine_tropical(D: Dbm, Ag: TropicalMatrix) -> TropicalMatrix:
    """Bounds of the image as ``A_g ⊗ D ⊗ A_g^c``. Signs are not produced."""
    if not D.canonical:
        raise NotCanonicalError("The image is read off the bounds of a canonical DBM")
    Ag = np.asarray(Ag, dtype=np.float64)
    if Ag.shape == (D.n, D.n):
        Ag = augment_zero(Ag)
    return mat_otimes(mat_otimes(Ag, D.bounds), conjugate(Ag))


def preimage_affine(Dp: Dbm, g: Sequence[int], Ag: TropicalMatrix) -> Dbm:
    """Inverse image of a canonical DBM, not intersected with the region.

    Every bound of ``Dp`` lands on position ``(g_i, g_j)``; when several do,
    the largest is kept and a strict one wins a tie. The result is not
    necessarily canonical.
    """
    if not Dp.canonical:
        raise NotCanonicalError("The inverse image needs a canonical DBM")
    ga, Ag = _dynamics(Dp.n, g, Ag)
    m = Dp.n + 1
    c = Ag[np.arange(m), ga]
    cand = Dp.bounds + c[np.newaxis, :] - c[:, np.newaxis]
    cand = np.where(Dp.bounds == EPS, EPS, cand)
    rows, cols = np.meshgrid(ga, ga, indexing="ij")

    bounds = identity(m)
    np.maximum.at(bounds, (rows, cols), cand)
    attained = (cand == bounds[rows, cols]) & (cand != EPS)
    strict = np.zeros((m, m), dtype=np.bool_)
    np.logical_or.at(strict, (rows, cols), attained & ~Dp.signs)
    signs = (bounds != EPS) & ~strict
    tally("affine", m * m)
    return Dbm(n=Dp.n, bounds=bounds, signs=signs)


def preimage_affine_tropical(Dp: Dbm, Ag: TropicalMatrix) -> TropicalMatrix:
    """Bounds of the inverse image as ``(A_g^c ⊗ D' ⊗ A_g) ⊕ I``."""
    if not Dp.canonical:
        raise NotCanonicalError("The inverse image needs a canonical DBM")
    Ag = np.asarray(Ag, dtype=np.float64)
    if Ag.shape == (Dp.n, Dp.n):
        Ag = augment_zero(Ag)
    product = mat_otimes(mat_otimes(conjugate(Ag), Dp.bounds), Ag)
    return mat_oplus(product, identity(Dp.n + 1))


def image_via_lifting(D: Dbm, g: Sequence[int], Ag: TropicalMatrix, direction: Direction = "fwd") -> Dbm:
    """Image (``fwd``) or inverse image (``bwd``) through a DBM over ``(x, x')``.

    ``x`` takes indices ``1..n`` and ``x'`` takes ``n+1..2n``. The dynamics
    become the equalities ``x'_i - x_{g_i} = A_g(i, g_i)``; after
    canonicalization the other block is projected out. Cubic in ``2n + 1``,
    kept as a reference for the direct algorithms.
    """
    n = D.n
    ga, Ag = _dynamics(n, g, Ag)
    unprimed = list(range(1, n + 1))
    primed = list(range(n + 1, 2 * n + 1))
    if direction == "fwd":
        source, target = unprimed, primed
    elif direction == "bwd":
        source, target = primed, unprimed
    else:
        raise ValueError(f"Unknown direction '{direction}'")

    equalities = []
    for i in range(1, n + 1):
        c = float(Ag[i, ga[i]])
        src = int(ga[i])
        equalities.append((n + i, src, c, False))
        equalities.append((src, n + i, -c, False))
    lifted = intersect(embed(D, 2 * n, source), from_constraints(2 * n, equalities))
    return restrict(canonical_form(lifted), target)


def _region_image(D: Dbm, region: Region, *, oracle: bool) -> Dbm | None:
    X = canonical_form(intersect(D, region.zone))
    if X.empty:
        return None
    if oracle:
        return image_via_lifting(X, region.coefficient, region.dynamics, "fwd")
    return image_affine(X, region.coefficient, region.dynamics)


def _region_preimage(Dp: Dbm, region: Region, *, oracle: bool) -> Dbm | None:
    if oracle:
        P = image_via_lifting(Dp, region.coefficient, region.dynamics, "bwd")
    else:
        P = preimage_affine(Dp, region.coefficient, region.dynamics)
    X = canonical_form(intersect(P, region.zone))
    return None if X.empty else X


def _per_region(
    func, D: Dbm, pwa: PwaSystem, *, oracle: bool, workers: int, chunk_size: int
) -> DbmUnion:
    if not pwa.partitioned:
        raise NotPartitionedError("Reachability needs a partition, not an overlapping PWA system")
    if D.n != pwa.n:
        raise DimensionError(f"DBM over {D.n} variables for a system over {pwa.n}")
    results = map_chunked(
        partial(func, D, oracle=oracle),
        pwa.regions,
        workers=workers,
        chunk_size=chunk_size,
    )
    return DbmUnion(n=D.n, parts=tuple(r for r in results if r is not None))


def image_mpl(
    D: Dbm,
    pwa: PwaSystem,
    *,
    oracle: bool = False,
    workers: int = 1,
    chunk_size: int = 256,
) -> DbmUnion:
    """One-step image under the whole system, one part per region hit."""
    return _per_region(_region_image, D, pwa, oracle=oracle, workers=workers, chunk_size=chunk_size)


def preimage_mpl(
    Dp: Dbm,
    pwa: PwaSystem,
    *,
    oracle: bool = False,
    workers: int = 1,
    chunk_size: int = 256,
) -> DbmUnion:
    """Points mapped into ``Dp`` in one step, one part per region."""
    Dp = canonical_form(Dp)
    if Dp.empty:
        return DbmUnion(n=Dp.n)
    return _per_region(
        _region_preimage, Dp, pwa, oracle=oracle, workers=workers, chunk_size=chunk_size
    )


def image_union(U: DbmUnion, pwa: PwaSystem, **kwargs) -> DbmUnion:
    parts = [p for part in U for p in image_mpl(part, pwa, **kwargs)]
    return DbmUnion(n=U.n, parts=tuple(parts))


def preimage_union(U: DbmUnion, pwa: PwaSystem, **kwargs) -> DbmUnion:
    parts = [p for part in U for p in preimage_mpl(part, pwa, **kwargs)]
    return DbmUnion(n=U.n, parts=tuple(parts))


def _check_horizon(steps: int) -> None:
    if steps < 1:
        raise ValueError(f"The horizon must be at least 1, got {steps}")


def forward_reach(X0: DbmUnion, pwa: PwaSystem, steps: int, **kwargs) -> list[DbmUnion]:
    """``X_1 .. X_N`` where ``X_k`` is the image of ``X_{k-1}``."""
    _check_horizon(steps)
    sets: list[DbmUnion] = []
    current = X0
    for k in range(1, steps + 1):
        current = image_union(current, pwa, **kwargs)
        logger.info("Forward reach step %d/%d: %d parts", k, steps, len(current))
        sets.append(current)
    return sets


def backward_reach(Y0: DbmUnion, pwa: PwaSystem, steps: int, **kwargs) -> list[DbmUnion]:
    """``Y_-1 .. Y_-N``; once a set is empty every later one is too."""
    _check_horizon(steps)
    sets: list[DbmUnion] = []
    current = Y0
    for k in range(1, steps + 1):
        current = preimage_union(current, pwa, **kwargs)
        logger.info("Backward reach step %d/%d: %d parts", k, steps, len(current))
        sets.append(current)
        if current.is_empty():
            if k < steps:
                logger.info(
                    "Backward reach set is empty at step %d, skipping the remaining %d steps",
                    k,
                    steps - k,
                )
            sets.extend(DbmUnion(n=Y0.n) for _ in range(steps - k))
            break
    return sets


def termination_step(sets: Sequence[DbmUnion]) -> int | None:
    """1-based index of the first empty reach set, if any."""
    return next((k for k, U in enumerate(sets, start=1) if U.is_empty()), None)
