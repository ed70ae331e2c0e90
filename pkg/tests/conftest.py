import numpy as np
import pytest

from tropabs.bench import BenchConfig, random_row_finite
from tropabs.dbm import Dbm, canonical_form, contains_point, from_constraints
from tropabs.tropical import as_matrix

# The abstract states of the 3x3 running example, in coefficient order,
# as (i, j, bound, strict) for x_i - x_j >= bound (> when strict).
EXAMPLE_STATES = {
    (2, 1, 1): [(1, 2, 1, False), (1, 3, 3, False), (2, 3, 2, False)],
    (2, 1, 2): [(2, 1, -1, True), (1, 3, -1, True), (2, 3, 2, False)],
    (2, 3, 2): [(2, 1, 3, False), (3, 1, 1, False), (2, 3, 2, False)],
    (3, 1, 1): [(1, 2, 1, False), (1, 3, -1, True), (3, 2, -2, True)],
    (3, 1, 2): [
        (1, 2, -3, True),
        (2, 1, -1, True),
        (1, 3, -1, True),
        (3, 1, -3, True),
        (2, 3, -2, True),
        (3, 2, -2, True),
    ],
    (3, 3, 1): [(1, 2, 1, False), (3, 1, 1, False), (3, 2, 2, False)],
    (3, 3, 2): [(2, 1, -1, True), (3, 1, 1, False), (3, 2, -2, True)],
}

# 1-based state ids
EXAMPLE_TRANSITIONS = {
    (1, 7),
    (4, 7),
    (7, 7),
    (3, 7),
    (3, 6),
    (6, 5),
    (6, 7),
    (6, 2),
    (2, 6),
    (5, 7),
    (7, 5),
    (7, 2),
    (2, 7),
}


@pytest.fixture
def example_matrix():
    return as_matrix([[None, 1, 3], [5, None, 4], [7, 8, None]])


@pytest.fixture
def example_states() -> dict[tuple[int, ...], Dbm]:
    return {g: canonical_form(from_constraints(3, cs)) for g, cs in EXAMPLE_STATES.items()}


@pytest.fixture
def affine_dynamics():
    """x1' = x2 + 1, x2' = x1 + 5, x3' = x1 + 2."""
    return (2, 1, 1), as_matrix([[None, 1, None], [5, None, None], [2, None, None]])


@pytest.fixture
def source_zone() -> Dbm:
    return canonical_form(from_constraints(3, [(1, 2, 6, False), (1, 3, -1, True), (2, 3, 2, False)]))


@pytest.fixture
def target_zone() -> Dbm:
    return canonical_form(
        from_constraints(3, [(2, 1, 10, False), (3, 1, 7, False), (2, 3, 3, False), (3, 2, -3, False)])
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20170612)


@pytest.fixture
def random_system():
    """Row-finite test matrix, two finite entries per row unless asked otherwise."""

    def _make(n: int, trial: int, seed: int = 7, finite_per_row: int = 2):
        return random_row_finite(n, BenchConfig(dims=[n], seed=seed, finite_per_row=finite_per_row), trial)

    return _make


@pytest.fixture
def random_dbm():
    """Random DBM with a few integer constraints; may be empty."""

    def _make(rng: np.random.Generator, n: int, count: int | None = None) -> Dbm:
        count = count if count is not None else rng.integers(1, 2 * n + 1)
        constraints = []
        for _ in range(count):
            i, j = rng.choice(n + 1, size=2, replace=False)
            constraints.append((int(i), int(j), int(rng.integers(-10, 11)), bool(rng.random() < 0.3)))
        return from_constraints(n, constraints)

    return _make


@pytest.fixture
def sample_in():
    """Up to ``count`` random integer points of ``D``, by rejection."""

    def _sample(rng: np.random.Generator, D: Dbm, count: int, scale: int = 30, tries: int = 20000):
        points = []
        for _ in range(tries):
            x = rng.integers(-scale, scale + 1, size=D.n).astype(np.float64)
            if contains_point(D, x):
                points.append(x)
                if len(points) == count:
                    break
        return points

    return _sample


@pytest.fixture
def example_transitions() -> set[tuple[int, int]]:
    return set(EXAMPLE_TRANSITIONS)


@pytest.fixture
def membership():
    """``(points, regions)`` boolean table of which region contains which point."""

    def _table(zones, X: np.ndarray) -> np.ndarray:
        v = np.hstack([np.zeros((len(X), 1)), X])
        diff = v[:, :, np.newaxis] - v[:, np.newaxis, :]
        table = np.empty((len(X), len(zones)), dtype=np.bool_)
        for k, D in enumerate(zones):
            holds = np.where(D.signs, diff >= D.bounds, diff > D.bounds) | (D.bounds == -np.inf)
            table[:, k] = holds.all(axis=(1, 2))
        return table

    return _table


@pytest.fixture
def max_plus_step():
    """``A ⊗ x`` for every row of ``X`` at once."""

    def _step(A: np.ndarray, X: np.ndarray) -> np.ndarray:
        return (A[np.newaxis, :, :] + X[:, np.newaxis, :]).max(axis=2)

    return _step
