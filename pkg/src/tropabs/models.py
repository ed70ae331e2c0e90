"""JSON wire formats. ``null`` stands for ε everywhere."""

from typing import Self

from pydantic import BaseModel, Field, model_validator

from tropabs.dbm import Dbm
from tropabs.pwa import Region
from tropabs.tropical import EPS, TropicalMatrix, as_matrix, to_entries

type Entry = int | float | None


def _check_square(rows: list[list], size: int, what: str) -> None:
    widths = sorted({len(r) for r in rows})
    if len(widths) > 1:
        ragged = next(i for i, r in enumerate(rows) if len(r) != len(rows[0]))
        raise ValueError(
            f"{what} is ragged: row {ragged} has {len(rows[ragged])} entries, row 0 has {len(rows[0])}"
        )
    cols = widths[0] if widths else 0
    if len(rows) != cols:
        raise ValueError(f"{what} must be square: got {len(rows)} rows x {cols} columns")
    if len(rows) != size:
        raise ValueError(f"{what} is {len(rows)}x{cols} but {size}x{size} was declared")


class MatrixModel(BaseModel):
    n: int = Field(ge=0)
    entries: list[list[Entry]]

    @model_validator(mode="after")
    def square(self) -> Self:
        _check_square(self.entries, self.n, "Matrix")
        return self

    def to_matrix(self) -> TropicalMatrix:
        return as_matrix(self.entries)

    @classmethod
    def from_matrix(cls, A: TropicalMatrix) -> "MatrixModel":
        return cls(n=A.shape[0], entries=to_entries(A))


class DbmModel(BaseModel):
    n: int = Field(ge=0)
    bounds: list[list[Entry]]
    strict: list[list[bool]]

    @model_validator(mode="after")
    def shapes(self) -> Self:
        _check_square(self.bounds, self.n + 1, "Bound matrix")
        _check_square(self.strict, self.n + 1, "Strictness matrix")
        return self

    def to_dbm(self) -> Dbm:
        bounds = as_matrix(self.bounds)
        return Dbm(n=self.n, bounds=bounds, signs=[[not s for s in row] for row in self.strict])

    @classmethod
    def from_dbm(cls, D: Dbm) -> "DbmModel":
        finite = D.bounds != EPS
        return cls(
            n=D.n,
            bounds=to_entries(D.bounds),
            strict=(finite & ~D.signs).tolist(),
        )


class UnionModel(BaseModel):
    n: int = Field(ge=0)
    parts: list[DbmModel]

    @model_validator(mode="after")
    def same_dimension(self) -> Self:
        for k, part in enumerate(self.parts):
            if part.n != self.n:
                raise ValueError(f"Part {k} is over {part.n} variables, the union over {self.n}")
        return self


class RegionModel(BaseModel):
    coefficient: list[int]
    dbm: DbmModel
    dynamics: MatrixModel
    description: str | None = None

    @classmethod
    def from_region(cls, region: Region, zone: Dbm | None = None, description: str | None = None) -> "RegionModel":
        return cls(
            coefficient=list(region.coefficient),
            dbm=DbmModel.from_dbm(zone if zone is not None else region.zone),
            dynamics=MatrixModel.from_matrix(region.dynamics[1:, 1:]),
            description=description,
        )


class StateModel(BaseModel):
    id: int = Field(ge=1)
    coefficient: list[int]
    dbm: DbmModel


class TransitionSystemModel(BaseModel):
    matrix: MatrixModel
    states: list[StateModel]
    transitions: list[tuple[int, int]]

    @model_validator(mode="after")
    def known_states(self) -> Self:
        ids = {s.id for s in self.states}
        for s in self.states:
            if s.dbm.n != self.matrix.n:
                raise ValueError(f"State {s.id} is over {s.dbm.n} variables, the matrix over {self.matrix.n}")
        if [s.id for s in self.states] != list(range(1, len(self.states) + 1)):
            raise ValueError("State ids must be 1..K in order")
        for source, target in self.transitions:
            if source not in ids or target not in ids:
                raise ValueError(f"Transition ({source}, {target}) refers to an unknown state")
        return self


class ReachStepModel(BaseModel):
    k: int
    parts: list[DbmModel]
