"""Finite abstraction of an MPL system by one-step forward reachability."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np
import numpy.typing as npt

from tropabs.dbm import Dbm, canonical_form, intersect
from tropabs.errors import NotPartitionedError
from tropabs.models import DbmModel, MatrixModel, StateModel, TransitionSystemModel
from tropabs.parallel import map_chunked
from tropabs.pwa import PwaSystem, Region, locate
from tropabs.reach import image_affine
from tropabs.tropical import augment_coefficient, augment_zero, region_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    """Abstract states (the regions of a partition) and 0-based transitions."""

    pwa: PwaSystem
    transitions: frozenset[tuple[int, int]]

    @property
    def states(self) -> tuple[Region, ...]:
        return self.pwa.regions

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.transitions)

    def successors(self, i: int) -> list[int]:
        return sorted(j for src, j in self.transitions if src == i)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionSystem):
            return NotImplemented
        return (
            np.array_equal(self.pwa.source, other.pwa.source)
            and len(self.states) == len(other.states)
            and all(
                a.coefficient == b.coefficient and a.zone == b.zone
                for a, b in zip(self.states, other.states, strict=True)
            )
            and self.transitions == other.transitions
        )

    __hash__ = None  # ty:ignore[invalid-assignment]


def _successors(image: Dbm, states: Sequence[Region]) -> list[int]:
    return [
        j for j, state in enumerate(states) if not canonical_form(intersect(image, state.zone)).empty
    ]


def build_transitions(pwa: PwaSystem, *, workers: int = 1, chunk_size: int = 256) -> TransitionSystem:
    """Add ``(i, j)`` whenever the image of state ``i`` meets state ``j``."""
    if not pwa.partitioned:
        raise NotPartitionedError("Transitions are built over a partition, not an overlapping PWA system")
    states = pwa.regions
    # one image per source state
    images = map_chunked(
        lambda r: image_affine(r.zone, r.coefficient, r.dynamics),
        states,
        workers=workers,
        chunk_size=chunk_size,
    )
    rows = map_chunked(
        partial(_successors, states=states),
        images,
        workers=workers,
        chunk_size=chunk_size,
    )
    transitions = frozenset((i, j) for i, targets in enumerate(rows) for j in targets)
    logger.info("Abstraction: %d states, %d transitions", len(states), len(transitions))
    return TransitionSystem(pwa=pwa, transitions=transitions)


def _label(region: Region) -> str:
    return "(" + ", ".join(str(j) for j in region.coefficient) + ")"


def to_dot(ts: TransitionSystem) -> str:
    lines = ["digraph transitions {"]
    for k, state in enumerate(ts.states, start=1):
        lines.append(f'  r{k} [label="r{k}\\n{_label(state)}"];')
    lines.extend(f"  r{i + 1} -> r{j + 1};" for i, j in ts.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_model(ts: TransitionSystem) -> TransitionSystemModel:
    return TransitionSystemModel(
        matrix=MatrixModel.from_matrix(ts.pwa.matrix),
        states=[
            StateModel(id=k, coefficient=list(s.coefficient), dbm=DbmModel.from_dbm(s.zone))
            for k, s in enumerate(ts.states, start=1)
        ],
        transitions=[(i + 1, j + 1) for i, j in ts.edges],
    )


def to_json(ts: TransitionSystem) -> str:
    return to_model(ts).model_dump_json(indent=2)


def from_model(model: TransitionSystemModel) -> TransitionSystem:
    """Rebuild the states from their stored zones; the dynamics come from the matrix."""
    source = augment_zero(model.matrix.to_matrix())
    regions = tuple(
        Region(
            coefficient=tuple(s.coefficient),
            zone=canonical_form(s.dbm.to_dbm()),
            dynamics=region_matrix(source, augment_coefficient(s.coefficient)),
        )
        for s in model.states
    )
    pwa = PwaSystem(source=source, regions=regions, partitioned=True)
    return TransitionSystem(
        pwa=pwa, transitions=frozenset((i - 1, j - 1) for i, j in model.transitions)
    )


def from_json(text: str | bytes) -> TransitionSystem:
    return from_model(TransitionSystemModel.model_validate_json(text))


def abstract_trace(ts: TransitionSystem, trajectory: Sequence[npt.ArrayLike]) -> list[int]:
    """The 0-based abstract state of every point of a concrete trajectory."""
    return [locate(np.asarray(x, dtype=np.float64), ts.pwa) for x in trajectory]


def is_path(ts: TransitionSystem, states: Sequence[int]) -> bool:
    return all((a, b) in ts.transitions for a, b in zip(states, states[1:]))
