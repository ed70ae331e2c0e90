import json

import numpy as np
import pytest

from tropabs.abstraction import (
    TransitionSystem,
    abstract_trace,
    build_transitions,
    from_json,
    is_path,
    to_dot,
    to_json,
)
from tropabs.counters import counting
from tropabs.errors import NotPartitionedError
from tropabs.pwa import generate_partition, generate_pwa
from tropabs.tropical import as_matrix, simulate


@pytest.fixture
def example_system(example_matrix) -> TransitionSystem:
    return build_transitions(generate_partition(example_matrix))


def test_transitions_of_the_running_example(example_system, example_transitions):
    assert len(example_system.states) == 7
    assert {(i + 1, j + 1) for i, j in example_system.transitions} == example_transitions


def test_one_image_per_state(example_matrix):
    pwa = generate_partition(example_matrix)
    with counting() as ops:
        build_transitions(pwa)
    assert ops["calls.image_affine"] == len(pwa)


def test_needs_a_partition(example_matrix):
    with pytest.raises(NotPartitionedError):
        build_transitions(generate_pwa(example_matrix))


def test_single_region_loops_on_itself():
    ts = build_transitions(generate_partition(as_matrix([[1, None], [None, 2]])))
    assert len(ts.states) == 1
    assert ts.transitions == {(0, 0)}


def test_every_state_has_a_successor(random_system):
    for trial in range(5):
        ts = build_transitions(generate_partition(random_system(4, trial)))
        assert all(ts.successors(i) for i in range(len(ts.states)))


def test_trajectories_are_paths(random_system, rng, membership, max_plus_step):
    for trial in range(50):
        n = 3 + trial % 5
        A = random_system(n, trial)
        ts = build_transitions(generate_partition(A))
        zones = [s.zone for s in ts.states]
        X = rng.integers(-50, 51, size=(20, n)).astype(np.float64)
        owners = []
        for _ in range(11):
            table = membership(zones, X)
            assert np.all(table.sum(axis=1) == 1)
            owners.append(table.argmax(axis=1))
            X = max_plus_step(A, X)
        for trace in np.array(owners).T:
            assert is_path(ts, [int(s) for s in trace])


def test_abstract_trace_of_a_simulation(random_system, rng):
    for trial in range(5):
        A = random_system(4, trial)
        ts = build_transitions(generate_partition(A))
        x0 = rng.integers(-50, 51, size=4).astype(np.float64)
        trace = abstract_trace(ts, simulate(A, x0, 10))
        assert len(trace) == 11
        assert is_path(ts, trace)


def test_is_path(example_system):
    # 1-based r6 -> r5 -> r7 -> r7
    assert is_path(example_system, [5, 4, 6, 6])
    assert not is_path(example_system, [0, 1])
    assert is_path(example_system, [3])


def test_dot_output(example_system):
    dot = to_dot(example_system)
    assert dot.startswith("digraph transitions {")
    assert dot.count("[label=") == 7
    assert dot.count("->") == 13
    assert 'r1 [label="r1\\n(2, 1, 1)"];' in dot
    assert "  r6 -> r2;\n  r6 -> r5;\n  r6 -> r7;" in dot


def test_dot_without_transitions(example_system):
    empty = TransitionSystem(pwa=example_system.pwa, transitions=frozenset())
    dot = to_dot(empty)
    assert dot.count("[label=") == 7
    assert "->" not in dot


def test_output_does_not_depend_on_workers(example_matrix):
    serial = build_transitions(generate_partition(example_matrix))
    threaded = build_transitions(generate_partition(example_matrix, workers=3, chunk_size=2), workers=3, chunk_size=2)
    assert to_dot(serial) == to_dot(threaded)
    assert to_json(serial) == to_json(threaded)


def test_json_layout(example_system):
    doc = json.loads(to_json(example_system))
    assert [s["id"] for s in doc["states"]] == list(range(1, 8))
    assert doc["states"][0]["coefficient"] == [2, 1, 1]
    assert len(doc["transitions"]) == 13
    assert doc["transitions"] == sorted(doc["transitions"])
    assert doc["matrix"]["entries"][0] == [None, 1, 3]


def test_json_round_trip(example_system):
    assert from_json(to_json(example_system)) == example_system
