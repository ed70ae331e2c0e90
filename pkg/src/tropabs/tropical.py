"""The (max, +) semiring over dense numpy matrices.

Matrices are ``float64`` arrays in which ``-inf`` is the bottom element
ε. IEEE arithmetic makes ε absorbing for ``+`` and neutral for ``max``
structurally, and since conjugation maps ε to ε (never to ``+inf``) no
``-inf + inf`` can ever be formed. Integer entries stay exact up to 2**53.

Finite coefficients are tuples of 0-based column indices into the matrix
they are used with. For an augmented matrix (see :func:`augment_zero`) the
tail of an augmented coefficient is the familiar 1-based coefficient, e.g.
``(0, 2, 1, 1)`` is the coefficient usually written ``(2, 1, 1)``.
"""

import itertools
import logging
from collections.abc import Iterator, Sequence

import numpy as np
import numpy.typing as npt

from tropabs.config import Config
from tropabs.counters import tally
from tropabs.errors import (
    DimensionError,
    InvalidCoefficientError,
    NotRowFiniteError,
    UnsupportedSizeError,
)

logger = logging.getLogger(__name__)

type TropicalScalar = float
type TropicalMatrix = npt.NDArray[np.float64]
type FiniteCoefficient = tuple[int, ...]

EPS: TropicalScalar = -np.inf
E: TropicalScalar = 0.0


def oplus(a: TropicalScalar, b: TropicalScalar) -> TropicalScalar:
    return max(a, b)


def otimes(a: TropicalScalar, b: TropicalScalar) -> TropicalScalar:
    return a + b


def is_eps(a: TropicalScalar) -> bool:
    return a == EPS


def as_matrix(entries: Sequence[Sequence[float | None]] | TropicalMatrix) -> TropicalMatrix:
    """Build a tropical matrix; ``None`` entries become ε."""
    if isinstance(entries, np.ndarray):
        return entries.astype(np.float64, copy=True)
    rows = [[EPS if v is None else float(v) for v in row] for row in entries]
    if not rows:
        return np.empty((0, 0), dtype=np.float64)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DimensionError(f"Ragged matrix: row lengths {sorted(widths)}")
    return np.array(rows, dtype=np.float64)


def to_entries(A: TropicalMatrix) -> list[list[float | int | None]]:
    """Inverse of :func:`as_matrix`, with integral entries as ``int``."""
    return [
        [None if v == EPS else (int(v) if float(v).is_integer() else float(v)) for v in row]
        for row in A
    ]


def epsilon_matrix(rows: int, cols: int | None = None) -> TropicalMatrix:
    return np.full((rows, rows if cols is None else cols), EPS, dtype=np.float64)


def identity(n: int) -> TropicalMatrix:
    M = epsilon_matrix(n)
    np.fill_diagonal(M, E)
    return M


def _check_square(A: TropicalMatrix, what: str = "matrix") -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:  # noqa: PLR2004
        raise DimensionError(f"The {what} must be square, got shape {A.shape}")
    return A.shape[0]


def mat_oplus(A: TropicalMatrix, B: TropicalMatrix) -> TropicalMatrix:
    if A.shape != B.shape:
        raise DimensionError(f"Cannot ⊕ matrices of shapes {A.shape} and {B.shape}")
    tally("oplus", A.size)
    return np.maximum(A, B)


def mat_otimes(A: TropicalMatrix, C: TropicalMatrix) -> TropicalMatrix:
    """Tropical product: entry (i, j) is max_k A(i, k) + C(k, j)."""
    if A.ndim != 2 or C.ndim != 2 or A.shape[1] != C.shape[0]:  # noqa: PLR2004
        raise DimensionError(f"Cannot ⊗ matrices of shapes {A.shape} and {C.shape}")
    m, k = A.shape
    p = C.shape[1]
    tally("otimes", m * k * p)
    if k == 0:
        return epsilon_matrix(m, p)
    return (A[:, :, np.newaxis] + C[np.newaxis, :, :]).max(axis=1)


def mat_vec(A: TropicalMatrix, x: Sequence[float] | npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """One MPL step ``A ⊗ x``."""
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (A.shape[1],):
        raise DimensionError(f"Vector of length {v.shape} does not fit a {A.shape} matrix")
    return mat_otimes(A, v[:, np.newaxis])[:, 0]


def simulate(
    A: TropicalMatrix, x0: Sequence[float] | npt.NDArray[np.float64], steps: int
) -> list[npt.NDArray[np.float64]]:
    """Trajectory ``x(0), ..., x(steps)`` of ``x(k+1) = A ⊗ x(k)``."""
    trajectory = [np.asarray(x0, dtype=np.float64)]
    for _ in range(steps):
        trajectory.append(mat_vec(A, trajectory[-1]))
    return trajectory


def mat_power(A: TropicalMatrix, m: int) -> TropicalMatrix:
    n = _check_square(A)
    if m < 0:
        raise ValueError(f"Power must be non-negative, got {m}")
    result = identity(n)
    base = A
    while m:
        if m & 1:
            result = mat_otimes(result, base)
        m >>= 1
        if m:
            base = mat_otimes(base, base)
    return result


def power_sum(A: TropicalMatrix, m: int) -> TropicalMatrix:
    """``A^0 ⊕ A^1 ⊕ ... ⊕ A^m``."""
    n = _check_square(A)
    total = identity(n)
    term = identity(n)
    for _ in range(m):
        term = mat_otimes(term, A)
        total = mat_oplus(total, term)
    return total


def finite_columns(A: TropicalMatrix) -> list[tuple[int, ...]]:
    """Per row, the column indices holding a finite entry."""
    _check_square(A)
    columns = [tuple(int(j) for j in np.flatnonzero(row != EPS)) for row in A]
    for i, cols in enumerate(columns):
        if not cols:
            raise NotRowFiniteError(i)
    return columns


def count_finite_coefficients(A: TropicalMatrix) -> int:
    return int(np.prod([len(c) for c in finite_columns(A)], dtype=object))


def enumerate_finite_coefficients(
    A: TropicalMatrix, start: int = 0, stop: int | None = None
) -> Iterator[FiniteCoefficient]:
    """Yield the finite coefficients of ``A`` in lexicographic order.

    ``start``/``stop`` select a slice of that order, so disjoint ranges can
    be consumed independently and concatenated back deterministically.
    """
    columns = finite_columns(A)
    return itertools.islice(itertools.product(*columns), start, stop)


def is_finite_coefficient(A: TropicalMatrix, g: FiniteCoefficient) -> bool:
    n = _check_square(A)
    if len(g) != n:
        return False
    return all(0 <= j < n and A[i, j] != EPS for i, j in enumerate(g))


def _check_coefficient(A: TropicalMatrix, g: FiniteCoefficient) -> None:
    if not is_finite_coefficient(A, g):
        raise InvalidCoefficientError(f"{tuple(g)} is not a finite coefficient of this {A.shape} matrix")


def region_matrix(A: TropicalMatrix, g: FiniteCoefficient) -> TropicalMatrix:
    """Keep ``A(i, g_i)`` on every row, ε elsewhere."""
    _check_coefficient(A, g)
    n = A.shape[0]
    rows = np.arange(n)
    cols = np.asarray(g, dtype=np.intp)
    Ag = epsilon_matrix(n)
    Ag[rows, cols] = A[rows, cols]
    return Ag


def conjugate(A: TropicalMatrix) -> TropicalMatrix:
    """Negated transpose of the finite entries; ε stays ε."""
    T = A.T
    return np.where(T == EPS, EPS, -T)


def row_definite(A: TropicalMatrix, g: FiniteCoefficient) -> TropicalMatrix:
    return mat_otimes(conjugate(region_matrix(A, g)), A)


def col_definite(A: TropicalMatrix, g: FiniteCoefficient) -> TropicalMatrix:
    return mat_otimes(A, conjugate(region_matrix(A, g)))


def permanent(A: TropicalMatrix, max_n: int | None = None) -> TropicalScalar:
    """Tropical permanent by brute force over all permutations.

    ``max_n`` defaults to ``Config().limits.permanent_max_n``.
    """
    if max_n is None:
        max_n = Config().limits.permanent_max_n
    n = _check_square(A)
    if n > max_n:
        raise UnsupportedSizeError(f"Brute-force permanent is capped at n={max_n}, got n={n}")
    best = EPS
    rows = np.arange(n)
    for sigma in itertools.permutations(range(n)):
        best = max(best, float(A[rows, list(sigma)].sum()))
    return best


def augment_zero(A: TropicalMatrix) -> TropicalMatrix:
    """Prepend the row and column of the dummy variable ``x0``."""
    n = _check_square(A)
    M = epsilon_matrix(n + 1)
    M[0, 0] = E
    M[1:, 1:] = A
    return M


def augment_coefficient(g: Sequence[int]) -> FiniteCoefficient:
    """1-based coefficient ``(g1..gn)`` → augmented 0-based ``(0, g1..gn)``."""
    return (0, *(int(j) for j in g))
