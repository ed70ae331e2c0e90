"""Difference-Bound Matrices stored as tropical matrices.

A :class:`Dbm` over ``n`` variables holds two ``(n+1) x (n+1)`` matrices.
``bounds[i, j] = d`` encodes ``x_i - x_j >= d`` (or ``> d``), index 0 is the
dummy variable ``x0 = 0`` and ε (``-inf``) means unconstrained.
``signs[i, j]`` is ``True`` for a non-strict ``>=`` and ``False`` for a strict
``>``. Unconstrained entries always carry ``False``.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from tropabs.config import Config
from tropabs.counters import tally
from tropabs.errors import DimensionError, NotCanonicalError, UnsupportedSizeError
from tropabs.tropical import (
    EPS,
    TropicalMatrix,
    epsilon_matrix,
    identity,
    permanent,
)

logger = logging.getLogger(__name__)

type SignMatrix = npt.NDArray[np.bool_]
type Constraint = tuple[int, int, float, bool]
type CanonicalMethod = Literal["floyd-warshall", "powers"]


@dataclass(frozen=True, eq=False)
class Dbm:
    n: int
    bounds: TropicalMatrix
    signs: SignMatrix
    canonical: bool = False
    empty: bool | None = field(default=None, compare=False)

    def __post_init__(self):
        bounds = np.array(self.bounds, dtype=np.float64)
        signs = np.array(self.signs, dtype=np.bool_)
        shape = (self.n + 1, self.n + 1)
        if bounds.shape != shape or signs.shape != shape:
            raise DimensionError(
                f"A DBM over {self.n} variables needs {shape} matrices, "
                f"got bounds {bounds.shape} and signs {signs.shape}"
            )
        signs[bounds == EPS] = False
        bounds.flags.writeable = False
        signs.flags.writeable = False
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "signs", signs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dbm):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.bounds, other.bounds)
            and np.array_equal(self.signs, other.signs)
        )

    __hash__ = None  # ty:ignore[invalid-assignment]

    def constraints(self) -> list[Constraint]:
        """Finite off-diagonal constraints as ``(i, j, bound, strict)``."""
        return [
            (i, j, float(self.bounds[i, j]), not bool(self.signs[i, j]))
            for i in range(self.n + 1)
            for j in range(self.n + 1)
            if i != j and self.bounds[i, j] != EPS
        ]

    def __repr__(self) -> str:
        return f"Dbm(n={self.n}, canonical={self.canonical}, {describe(self) or 'R^n'})"


def full_space(n: int) -> Dbm:
    if n < 0:
        raise ValueError(f"Variable count must be non-negative, got {n}")
    signs = np.eye(n + 1, dtype=np.bool_)
    return Dbm(n=n, bounds=identity(n + 1), signs=signs, canonical=True, empty=False)


def _merge(
    B1: TropicalMatrix, S1: SignMatrix, B2: TropicalMatrix, S2: SignMatrix
) -> tuple[TropicalMatrix, SignMatrix]:
    """Entrywise tighter constraint: larger bound, strict on ties."""
    bounds = np.maximum(B1, B2)
    signs = np.where(B1 > B2, S1, np.where(B1 < B2, S2, S1 & S2))
    return bounds, signs


def from_constraints(n: int, constraints: Iterable[Constraint]) -> Dbm:
    """Build the DBM of ``x_i - x_j >= bound`` (``>`` when strict) constraints.

    Repeated constraints on one pair keep the tighter one.
    """
    bounds = identity(n + 1)
    signs = np.eye(n + 1, dtype=np.bool_)
    for i, j, bound, strict in constraints:
        if not (0 <= i <= n and 0 <= j <= n):
            raise DimensionError(f"Constraint on x{i} - x{j} is out of range for n={n}")
        b = float(bound)
        s = not strict
        if b > bounds[i, j]:
            bounds[i, j], signs[i, j] = b, s
        elif b == bounds[i, j]:
            signs[i, j] = signs[i, j] and s
        if i == j and (b > 0 or (b == 0 and strict)):
            logger.warning("Constraint x%d - x%d %s %s makes the DBM empty", i, j, ">" if strict else ">=", b)
    return Dbm(n=n, bounds=bounds, signs=signs)


def box(lo: Sequence[float], hi: Sequence[float]) -> Dbm:
    """``lo_i <= x_i <= hi_i`` for every variable."""
    if len(lo) != len(hi):
        raise DimensionError(f"Box bounds differ in length: {len(lo)} vs {len(hi)}")
    if any(a > b for a, b in zip(lo, hi, strict=True)):
        logger.warning("Box with lo > hi is empty: lo=%s hi=%s", list(lo), list(hi))
    constraints: list[Constraint] = []
    for i, (a, b) in enumerate(zip(lo, hi, strict=True), start=1):
        constraints.append((i, 0, a, False))
        constraints.append((0, i, -b, False))
    return from_constraints(len(lo), constraints)


def intersect(D1: Dbm, D2: Dbm) -> Dbm:
    """Intersection: entrywise ⊕ of the bounds; the result is not canonical."""
    if D1.n != D2.n:
        raise DimensionError(f"Cannot intersect DBMs over {D1.n} and {D2.n} variables")
    tally("oplus", D1.bounds.size)
    bounds, signs = _merge(D1.bounds, D1.signs, D2.bounds, D2.signs)
    return Dbm(n=D1.n, bounds=bounds, signs=signs)


def floyd_warshall(B: TropicalMatrix, S: SignMatrix) -> tuple[TropicalMatrix, SignMatrix]:
    """All-pairs longest paths with sign propagation.

    A path is strict if any of its edges is; among equally heavy paths a
    strict one wins.
    """
    bounds = np.array(B, dtype=np.float64)
    signs = np.array(S, dtype=np.bool_)
    m = bounds.shape[0]
    for k in range(m):
        cand = bounds[:, k, np.newaxis] + bounds[np.newaxis, k, :]
        cand_signs = signs[:, k, np.newaxis] & signs[np.newaxis, k, :]
        better = cand > bounds
        tie = cand == bounds
        signs = np.where(better, cand_signs, np.where(tie, signs & cand_signs, signs))
        bounds = np.where(better, cand, bounds)
    tally("relax", m**3)
    return bounds, signs


def _signed_otimes(
    B1: TropicalMatrix, S1: SignMatrix, B2: TropicalMatrix, S2: SignMatrix
) -> tuple[TropicalMatrix, SignMatrix]:
    cand = B1[:, :, np.newaxis] + B2[np.newaxis, :, :]
    cand_signs = S1[:, :, np.newaxis] & S2[np.newaxis, :, :]
    bounds = cand.max(axis=1)
    attained = cand == bounds[:, np.newaxis, :]
    signs = np.all(~attained | cand_signs, axis=1)
    tally("otimes", cand.size)
    return bounds, signs


def power_series(B: TropicalMatrix, S: SignMatrix) -> tuple[TropicalMatrix, SignMatrix]:
    """``⊕_{m=0}^{n+1} D^{⊗m}`` with the same sign rule as Floyd-Warshall."""
    m = B.shape[0]
    total_b, total_s = identity(m), np.eye(m, dtype=np.bool_)
    term_b, term_s = total_b, total_s
    # n + 1 == m: paths with up to m edges cover every simple cycle
    for _ in range(m):
        term_b, term_s = _signed_otimes(term_b, term_s, B, S)
        total_b, total_s = _merge(total_b, total_s, term_b, term_s)
    return total_b, total_s


def empty_dbm(n: int) -> Dbm:
    """The canonical representative of the empty set: ``x0 - x0 > 0``, nothing else."""
    signs = np.eye(n + 1, dtype=np.bool_)
    signs[0, 0] = False
    return Dbm(n=n, bounds=identity(n + 1), signs=signs, canonical=True, empty=True)


def canonical_form(D: Dbm, method: CanonicalMethod = "floyd-warshall") -> Dbm:
    """Tightest bounds for the same set of points.

    Positive cycles make the bounds depend on the method and on how often it
    runs, so every empty DBM canonicalizes to :func:`empty_dbm`.
    """
    if D.canonical:
        return D
    # x_i - x_i >= 0 always holds
    B, S = _merge(D.bounds, D.signs, identity(D.n + 1), np.eye(D.n + 1, dtype=np.bool_))
    if method == "floyd-warshall":
        bounds, signs = floyd_warshall(B, S)
    elif method == "powers":
        bounds, signs = power_series(B, S)
    else:
        raise ValueError(f"Unknown canonical-form method '{method}'")
    signs = np.where(bounds == EPS, False, signs)
    if _diagonal_empty(bounds, signs):
        logger.debug("DBM over %d variables is empty", D.n)
        return empty_dbm(D.n)
    return Dbm(n=D.n, bounds=bounds, signs=signs, canonical=True, empty=False)


def _diagonal_empty(bounds: TropicalMatrix, signs: SignMatrix) -> bool:
    diagonal = np.diagonal(bounds)
    return bool(np.any(diagonal > 0) or np.any((diagonal == 0) & ~np.diagonal(signs)))


def is_empty(D: Dbm) -> bool:
    C = canonical_form(D)
    if C.empty is None:
        return _diagonal_empty(C.bounds, C.signs)
    return C.empty


def is_definite(D: Dbm, max_n: int | None = None) -> bool:
    """Permanent 0 and zero diagonal.

    ``max_n`` caps the variable count (default ``Config().limits.permanent_max_n``);
    the permanent runs on the ``(n + 1) x (n + 1)`` bound matrix.
    """
    if not D.canonical:
        raise NotCanonicalError("Definiteness is only meaningful on a canonical DBM")
    if max_n is None:
        max_n = Config().limits.permanent_max_n
    if D.n > max_n:
        raise UnsupportedSizeError(f"Definiteness check is capped at {max_n} variables, got {D.n}")
    if np.any(np.diagonal(D.bounds) != 0):
        return False
    return permanent(D.bounds, max_n=max_n + 1) == 0


def contains_point(D: Dbm, x: Sequence[float] | npt.NDArray[np.float64]) -> bool:
    point = np.asarray(x, dtype=np.float64)
    if point.shape != (D.n,):
        raise DimensionError(f"Point of shape {point.shape} for a DBM over {D.n} variables")
    v = np.concatenate(([0.0], point))
    diff = v[:, np.newaxis] - v[np.newaxis, :]
    finite = D.bounds != EPS
    holds = np.where(D.signs, diff >= D.bounds, diff > D.bounds)
    return bool(np.all(holds | ~finite))


def restrict(D: Dbm, variables: Sequence[int]) -> Dbm:
    """Keep only ``variables`` (dummy first). Exact projection on canonical input."""
    if not D.canonical:
        raise NotCanonicalError("Projection needs a canonical DBM")
    index = np.asarray([0, *variables], dtype=np.intp)
    sub = np.ix_(index, index)
    return Dbm(
        n=len(variables),
        bounds=D.bounds[sub],
        signs=D.signs[sub],
        canonical=True,
        empty=D.empty,
    )


def embed(D: Dbm, n: int, variables: Sequence[int]) -> Dbm:
    """Place ``D`` into a DBM over ``n`` variables, renaming ``x_k`` to ``x_{variables[k-1]}``."""
    index = np.asarray([0, *variables], dtype=np.intp)
    bounds = epsilon_matrix(n + 1)
    bounds[np.ix_(index, index)] = D.bounds
    np.fill_diagonal(bounds, np.maximum(np.diagonal(bounds), 0))
    signs = np.zeros((n + 1, n + 1), dtype=np.bool_)
    signs[np.ix_(index, index)] = D.signs
    free = np.setdiff1d(np.arange(n + 1), index)
    signs[free, free] = True
    return Dbm(n=n, bounds=bounds, signs=signs)


def _variable(i: int) -> str:
    return "0" if i == 0 else f"x{i}"


def _difference(i: int, j: int) -> str:
    if j == 0:
        return f"x{i}"
    if i == 0:
        return f"-x{j}"
    return f"x{i} - x{j}"


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def describe(D: Dbm) -> str:
    """Render the finite constraints one pair per clause, e.g. ``-3 < x1 - x2 < 1``."""
    clauses: list[str] = []
    for i in range(D.n + 1):
        for j in range(i + 1, D.n + 1):
            if i == 0:
                # keep the variable on the left: x_j - x_0
                lo, lo_s = D.bounds[j, 0], D.signs[j, 0]
                up, up_s = D.bounds[0, j], D.signs[0, j]
                term = _variable(j)
            else:
                lo, lo_s = D.bounds[i, j], D.signs[i, j]
                up, up_s = D.bounds[j, i], D.signs[j, i]
                term = _difference(i, j)
            has_lo, has_up = lo != EPS, up != EPS
            if has_lo and has_up and lo == -up and lo_s and up_s:
                clauses.append(f"{term} = {_fmt(lo)}")
            elif has_lo and has_up:
                clauses.append(
                    f"{_fmt(lo)} {'<=' if lo_s else '<'} {term} {'<=' if up_s else '<'} {_fmt(-up)}"
                )
            elif has_lo:
                clauses.append(f"{term} {'>=' if lo_s else '>'} {_fmt(lo)}")
            elif has_up:
                clauses.append(f"{term} {'<=' if up_s else '<'} {_fmt(-up)}")
    return ", ".join(clauses)
