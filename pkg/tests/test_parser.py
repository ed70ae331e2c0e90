import json

import numpy as np
import pytest

from tropabs.abstraction import build_transitions, to_json
from tropabs.dbm import from_constraints
from tropabs.errors import ParseError
from tropabs.models import DbmModel, MatrixModel
from tropabs.parser import (
    dbm_json,
    parse_dbm,
    parse_matrix,
    parse_transition_system,
    parse_union,
    reach_step_json,
    union_json,
)
from tropabs.pwa import generate_partition
from tropabs.reach import DbmUnion
from tropabs.tropical import EPS


def _write(tmp_path, doc, name="input.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return path


def test_matrix_round_trip(tmp_path, example_matrix):
    path = _write(tmp_path, MatrixModel.from_matrix(example_matrix).model_dump_json())
    assert np.array_equal(parse_matrix(path), example_matrix)


def test_null_is_eps(tmp_path):
    A = parse_matrix(_write(tmp_path, {"n": 2, "entries": [[None, 1], [2.5, None]]}))
    assert A[0, 0] == EPS
    assert A[1, 0] == 2.5


def test_non_square_matrix(tmp_path):
    path = _write(tmp_path, {"n": 2, "entries": [[1, 2, 3], [4, 5, 6]]})
    with pytest.raises(ParseError, match="2 rows x 3 columns"):
        parse_matrix(path)


def test_declared_size_must_match(tmp_path):
    with pytest.raises(ParseError, match="3x3 was declared"):
        parse_matrix(_write(tmp_path, {"n": 3, "entries": [[1, 2], [3, 4]]}))


def test_ragged_matrix(tmp_path):
    with pytest.raises(ParseError, match="row 1 has 1 entries"):
        parse_matrix(_write(tmp_path, {"n": 2, "entries": [[1, 2], [3]]}))


def test_not_row_finite(tmp_path):
    path = _write(tmp_path, {"n": 2, "entries": [[1, None], [None, None]]})
    with pytest.raises(ParseError, match="Row 1"):
        parse_matrix(path)
    assert parse_matrix(path, require_row_finite=False)[1, 1] == EPS


def test_error_names_the_entry(tmp_path):
    path = _write(tmp_path, {"n": 2, "entries": [[1, "x"], [None, 1]]})
    with pytest.raises(ParseError, match=r"entries\[0\]\[1\]") as info:
        parse_matrix(path)
    assert str(path) in str(info.value)


def test_malformed_json(tmp_path):
    with pytest.raises(ParseError, match="Invalid JSON"):
        parse_matrix(_write(tmp_path, '{"n": 2, "entries": [[1, 2]'))


def test_missing_file(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        parse_matrix(tmp_path / "nope.json")


def test_dbm_round_trip(tmp_path, source_zone):
    D = parse_dbm(_write(tmp_path, dbm_json(source_zone)))
    assert D == source_zone
    assert not D.canonical


def test_dbm_json_layout(source_zone):
    doc = json.loads(dbm_json(source_zone))
    assert doc["n"] == 3
    assert doc["bounds"][1][2] == 6
    assert doc["bounds"][1][3] == 8
    assert doc["bounds"][2][1] is None
    assert doc["strict"][2][1] is False
    assert doc["strict"][1][3] is False


def test_dbm_shape_mismatch(tmp_path):
    doc = {"n": 1, "bounds": [[0, None], [None, 0]], "strict": [[False, False]]}
    with pytest.raises(ParseError, match="Strictness matrix"):
        parse_dbm(_write(tmp_path, doc))


def test_strict_flag_on_null_is_ignored(tmp_path):
    doc = {"n": 1, "bounds": [[0, None], [None, 0]], "strict": [[False, True], [True, False]]}
    D = parse_dbm(_write(tmp_path, doc))
    assert not D.signs[0, 1]


def test_union_from_a_single_dbm(tmp_path, source_zone):
    U = parse_union(_write(tmp_path, dbm_json(source_zone)))
    assert len(U) == 1
    assert U.parts[0] == source_zone


def test_union_drops_empty_parts(tmp_path, source_zone):
    empty = DbmModel.from_dbm(from_constraints(3, [(1, 2, 1, False), (2, 1, 0, False)]))
    doc = {"n": 3, "parts": [json.loads(dbm_json(source_zone)), empty.model_dump()]}
    U = parse_union(_write(tmp_path, doc))
    assert len(U) == 1


def test_union_dimensions_must_agree(tmp_path, source_zone):
    doc = {"n": 2, "parts": [json.loads(dbm_json(source_zone))]}
    with pytest.raises(ParseError, match="Part 0"):
        parse_union(_write(tmp_path, doc))


def test_union_and_step_json(source_zone):
    U = DbmUnion.from_dbm(source_zone)
    assert json.loads(union_json(U))["parts"][0]["n"] == 3
    assert json.loads(union_json(DbmUnion(n=3))) == {"n": 3, "parts": []}
    assert json.loads(reach_step_json(4, U))["k"] == 4


def test_transition_system_file(tmp_path, example_matrix):
    ts = build_transitions(generate_partition(example_matrix))
    assert parse_transition_system(_write(tmp_path, to_json(ts))) == ts


def test_transition_to_unknown_state(tmp_path, example_matrix):
    doc = json.loads(to_json(build_transitions(generate_partition(example_matrix))))
    doc["transitions"].append([1, 9])
    with pytest.raises(ParseError, match="unknown state"):
        parse_transition_system(_write(tmp_path, doc))


def test_invalid_utf8(tmp_path):
    path = tmp_path / "A.json"
    path.write_bytes(b'{"n": 1, "entries": [[1]]}\xff')
    with pytest.raises(ParseError, match="not UTF-8"):
        parse_matrix(path)
