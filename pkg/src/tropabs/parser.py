"""Reading and writing the JSON files the CLI works with."""

import logging
from pathlib import Path

from pydantic import TypeAdapter, ValidationError

from tropabs.abstraction import TransitionSystem, from_model
from tropabs.dbm import Dbm
from tropabs.errors import NotRowFiniteError, ParseError
from tropabs.models import DbmModel, MatrixModel, ReachStepModel, TransitionSystemModel, UnionModel
from tropabs.reach import DbmUnion
from tropabs.tropical import TropicalMatrix, finite_columns

logger = logging.getLogger(__name__)


def _location(loc: tuple[int | str, ...]) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "document"


def format_validation_error(e: ValidationError) -> str:
    return "; ".join(f"{_location(err['loc'])}: {err['msg']}" for err in e.errors())


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(path, f"cannot read file: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise ParseError(path, f"not UTF-8 text: invalid byte at offset {e.start}") from e


def _validate[M](adapter: TypeAdapter[M], path: Path) -> M:
    text = _read(path)
    try:
        return adapter.validate_json(text)
    except ValidationError as e:
        raise ParseError(path, format_validation_error(e)) from e


def parse_matrix(path: Path, *, require_row_finite: bool = True) -> TropicalMatrix:
    A = _validate(TypeAdapter(MatrixModel), path).to_matrix()
    if require_row_finite:
        try:
            finite_columns(A)
        except NotRowFiniteError as e:
            raise ParseError(path, str(e)) from e
    logger.debug("Read a %dx%d matrix from %s", *A.shape, path)
    return A


def parse_dbm(path: Path) -> Dbm:
    return _validate(TypeAdapter(DbmModel), path).to_dbm()


def parse_union(path: Path) -> DbmUnion:
    """A single DBM object or ``{"n": .., "parts": [..]}``; empty parts are dropped."""
    model = _validate(TypeAdapter(UnionModel | DbmModel), path)
    if isinstance(model, DbmModel):
        return DbmUnion.from_dbm(model.to_dbm())
    return DbmUnion.of(model.n, [p.to_dbm() for p in model.parts])


def parse_transition_system(path: Path) -> TransitionSystem:
    return from_model(_validate(TypeAdapter(TransitionSystemModel), path))


def dbm_json(D: Dbm) -> str:
    return DbmModel.from_dbm(D).model_dump_json()


def union_json(U: DbmUnion) -> str:
    return UnionModel(n=U.n, parts=[DbmModel.from_dbm(p) for p in U]).model_dump_json()


def reach_step_json(k: int, U: DbmUnion) -> str:
    return ReachStepModel(k=k, parts=[DbmModel.from_dbm(p) for p in U]).model_dump_json()


def write_text(text: str, path: Path | None) -> None:
    """Write to ``path``, or to stdout when it is ``None``."""
    if path is None:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
