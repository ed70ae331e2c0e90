import json

import pytest
from typer.testing import CliRunner

from cli import analysis as analysis_module
from cli.common import parallel_options
from cli.main import app
from tropabs.dbm import box
from tropabs.models import MatrixModel
from tropabs.parser import dbm_json, parse_matrix, parse_transition_system

runner = CliRunner()


@pytest.fixture(autouse=True)
def log_to_tmp(tmp_path, monkeypatch):
    monkeypatch.setenv("TROPABS_RUNTIME__LOG_FILE", str(tmp_path / "tropabs.log"))


@pytest.fixture
def matrix_file(tmp_path, example_matrix):
    path = tmp_path / "A.json"
    path.write_text(MatrixModel.from_matrix(example_matrix).model_dump_json(), encoding="utf-8")
    return path


@pytest.fixture
def zone_file(tmp_path, example_states):
    path = tmp_path / "D.json"
    path.write_text(dbm_json(example_states[(3, 3, 1)]), encoding="utf-8")
    return path


def _invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def test_pwa(matrix_file, tmp_path):
    out = tmp_path / "regions.json"
    result = _invoke("pwa", matrix_file, "--describe", "-o", out)
    assert result.exit_code == 0, result.output
    regions = json.loads(out.read_text())
    assert [r["coefficient"] for r in regions][:2] == [[2, 1, 1], [2, 1, 2]]
    assert len(regions) == 7
    assert all("description" in r for r in regions)


def test_pwa_overlapping_and_raw(matrix_file, tmp_path):
    out = tmp_path / "regions.json"
    result = _invoke("pwa", matrix_file, "--no-partition", "--raw", "-o", out)
    assert result.exit_code == 0, result.output
    regions = json.loads(out.read_text())
    assert len(regions) == 7
    assert all("description" not in r for r in regions)


def test_abstract(matrix_file, tmp_path):
    json_out = tmp_path / "ts.json"
    dot_out = tmp_path / "ts.dot"
    result = _invoke("abstract", matrix_file, "--json", json_out, "--dot", dot_out, "--workers", 2)
    assert result.exit_code == 0, result.output
    ts = parse_transition_system(json_out)
    assert len(ts.states) == 7
    assert len(ts.transitions) == 13
    assert dot_out.read_text().count("->") == 13


def test_image_and_preimage(matrix_file, zone_file, tmp_path):
    for command in ("image", "preimage"):
        direct = tmp_path / f"{command}.json"
        lifted = tmp_path / f"{command}-oracle.json"
        assert _invoke(command, matrix_file, zone_file, "-o", direct).exit_code == 0
        assert _invoke(command, matrix_file, zone_file, "--oracle", "-o", lifted).exit_code == 0
        assert json.loads(direct.read_text()) == json.loads(lifted.read_text())
        assert json.loads(direct.read_text())["n"] == 3


def test_reach(matrix_file, tmp_path):
    initial = tmp_path / "X0.json"
    initial.write_text(dbm_json(box([0, 0, 0], [1, 1, 1])), encoding="utf-8")
    fwd = tmp_path / "fwd.jsonl"
    bwd = tmp_path / "bwd.jsonl"
    assert _invoke("reach", matrix_file, initial, "--steps", 3, "-o", fwd).exit_code == 0
    assert _invoke("reach", matrix_file, initial, "--backward", "--steps", 2, "-o", bwd).exit_code == 0
    assert [json.loads(line)["k"] for line in fwd.read_text().splitlines()] == [1, 2, 3]
    assert [json.loads(line)["k"] for line in bwd.read_text().splitlines()] == [-1, -2]


def test_simulate(matrix_file):
    result = _invoke("simulate", matrix_file, "--x0", "0,3,-2", "--steps", 4)
    assert result.exit_code == 0, result.output


def test_simulate_rejects_a_bad_vector(matrix_file):
    result = _invoke("simulate", matrix_file, "--x0", "0,a,1")
    assert result.exit_code != 0


def test_broken_trace_is_an_invariant_error(matrix_file, monkeypatch):
    monkeypatch.setattr(analysis_module, "is_path", lambda ts, trace: False)
    result = _invoke("simulate", matrix_file, "--x0", "0,0,0", "--steps", 2)
    assert result.exit_code == 2


def test_non_square_matrix_exits_with_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "entries": [[1, 2, 3], [4, 5, 6]]}), encoding="utf-8")
    assert _invoke("abstract", path).exit_code == 1


def test_not_row_finite_exits_with_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 2, "entries": [[1, None], [None, None]]}), encoding="utf-8")
    assert _invoke("pwa", path).exit_code == 1


def test_gen_is_deterministic(tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert _invoke("gen", "--n", 5, "--seed", 3, "-o", first).exit_code == 0
    assert _invoke("gen", "--n", 5, "--seed", 3, "-o", second).exit_code == 0
    assert first.read_text() == second.read_text()
    assert parse_matrix(first).shape == (5, 5)


def test_bench(tmp_path):
    out = tmp_path / "report.csv"
    result = _invoke("bench", "--dims", "3,4", "--trials", 1, "--steps", 2, "--scaling", "--out", out)
    assert result.exit_code == 0, result.output
    assert out.exists()
    assert (tmp_path / "report.summary.csv").exists()
    header = [line for line in out.read_text().splitlines() if not line.startswith("#")][0]
    assert header.startswith("n,trial,phase")


def test_bench_rejects_bad_dims(tmp_path):
    result = _invoke("bench", "--dims", "5..3", "--out", tmp_path / "r.csv")
    assert result.exit_code != 0


def test_binary_matrix_file_exits_with_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_bytes(b'{"n": 1, "entries": [[1]]}\xff')
    result = _invoke("pwa", path)
    assert result.exit_code == 1
    assert not isinstance(result.exception, UnicodeDecodeError)


def test_chunk_size_comes_from_the_config(matrix_file, tmp_path, monkeypatch):
    default = tmp_path / "default.json"
    assert _invoke("abstract", matrix_file, "--json", default).exit_code == 0
    monkeypatch.setenv("TROPABS_RUNTIME__CHUNK_SIZE", "1")
    assert parallel_options(3) == {"workers": 3, "chunk_size": 1}
    chunked = tmp_path / "chunked.json"
    assert _invoke("abstract", matrix_file, "--json", chunked, "--workers", 3).exit_code == 0
    assert chunked.read_text() == default.read_text()
