"""Benchmark harness: per instance, time and count every analysis phase.

Operation counts come from :mod:`tropabs.counters` and do not depend on the
machine; only ``wall_ms`` does. Trials may run on worker threads; the rows
are sorted by ``(n, trial, phase)`` before anything is written, so the
report never depends on the schedule.
"""

import asyncio
import csv
import logging
import statistics
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

from tropabs.abstraction import build_transitions
from tropabs.bench.config import BenchConfig
from tropabs.bench.generator import random_row_finite
from tropabs.counters import counting
from tropabs.dbm import box
from tropabs.pwa import PwaSystem, generate_partition
from tropabs.reach import (
    DbmUnion,
    backward_reach,
    forward_reach,
    image_affine,
    image_via_lifting,
    termination_step,
)

logger = logging.getLogger(__name__)

SCHEMA = "tropabs-bench/1"

PHASES = ("states", "transitions", "image", "image_lifting", "forward", "backward")

COLUMNS = (
    "n",
    "trial",
    "phase",
    "wall_ms",
    "op_count",
    "state_count",
    "transition_count",
    "parts",
    "termination_step",
)

SUMMARY_COLUMNS = (
    "n",
    "phase",
    "trials",
    "mean_wall_ms",
    "max_wall_ms",
    "mean_op_count",
    "max_op_count",
)


@dataclass(frozen=True)
class BenchRow:
    n: int
    trial: int
    phase: str
    wall_ms: float
    op_count: int
    state_count: int
    transition_count: int
    # size of the last reach set (forward/backward phases only)
    parts: int | None = None
    termination_step: int | None = None

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return (self.n, self.trial, PHASES.index(self.phase))

    def to_csv(self) -> list[Any]:
        return [
            self.n,
            self.trial,
            self.phase,
            f"{self.wall_ms:.3f}",
            self.op_count,
            self.state_count,
            self.transition_count,
            "" if self.parts is None else self.parts,
            "" if self.termination_step is None else self.termination_step,
        ]


@dataclass(frozen=True)
class PhaseSummary:
    n: int
    phase: str
    trials: int
    mean_wall_ms: float
    max_wall_ms: float
    mean_op_count: float
    max_op_count: int

    def to_csv(self) -> list[Any]:
        return [
            self.n,
            self.phase,
            self.trials,
            f"{self.mean_wall_ms:.3f}",
            f"{self.max_wall_ms:.3f}",
            f"{self.mean_op_count:.1f}",
            self.max_op_count,
        ]


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list[BenchRow]

    def summary(self) -> list[PhaseSummary]:
        """Mean and max of every phase per dimension."""
        groups: dict[tuple[int, str], list[BenchRow]] = {}
        for row in self.rows:
            groups.setdefault((row.n, row.phase), []).append(row)
        out = []
        for (n, phase), rows in sorted(groups.items(), key=lambda kv: (kv[0][0], PHASES.index(kv[0][1]))):
            out.append(
                PhaseSummary(
                    n=n,
                    phase=phase,
                    trials=len(rows),
                    mean_wall_ms=statistics.fmean(r.wall_ms for r in rows),
                    max_wall_ms=max(r.wall_ms for r in rows),
                    mean_op_count=statistics.fmean(r.op_count for r in rows),
                    max_op_count=max(r.op_count for r in rows),
                )
            )
        return out

    def scaling_ratios(self) -> dict[int, float]:
        """Per dimension, lifting over direct operation counts for the image phase."""
        ratios = {}
        by_key = {(s.n, s.phase): s for s in self.summary()}
        for n in self.config.dims:
            direct, lifted = by_key.get((n, "image")), by_key.get((n, "image_lifting"))
            if direct and lifted and direct.mean_op_count > 0:
                ratios[n] = lifted.mean_op_count / direct.mean_op_count
        return ratios

    def provenance(self) -> dict[str, str]:
        cfg = self.config
        return {
            "schema": SCHEMA,
            "seed": str(cfg.seed),
            "dims": ",".join(str(n) for n in cfg.dims),
            "trials": str(cfg.trials),
            "finite_per_row": str(cfg.finite_per_row),
            "value_range": f"{cfg.value_range[0]}..{cfg.value_range[1]}",
            "horizon": str(cfg.horizon),
            "forward_box": f"{cfg.forward_box[0]}..{cfg.forward_box[1]}",
            "backward_box": f"{cfg.backward_box[0]}..{cfg.backward_box[1]}",
            "generator": "numpy PCG64 seeded by SeedSequence([seed, n, trial])",
        }

    def write_csv(self, path: Path) -> None:
        _write_csv_with_provenance_header(path, self.provenance(), COLUMNS, [r.to_csv() for r in self.rows])

    def write_summary_csv(self, path: Path) -> None:
        _write_csv_with_provenance_header(
            path, self.provenance(), SUMMARY_COLUMNS, [s.to_csv() for s in self.summary()]
        )


def summary_path(path: Path) -> Path:
    """``report.csv`` -> ``report.summary.csv``."""
    return path.with_name(f"{path.stem}.summary{path.suffix or '.csv'}")


def _write_csv_with_provenance_header(
    path: Path, header_kv: dict[str, str], columns: tuple[str, ...], rows: list[list[Any]]
) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        for k, v in header_kv.items():
            f.write(f"# {k}={v}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    logger.info("Wrote %d rows to %s", len(rows), path)


@dataclass
class _Measured:
    value: Any
    wall_ms: float
    op_count: int


def _measure(func: Callable[[], Any]) -> _Measured:
    with counting() as ops:
        start = time.perf_counter()
        value = func()
        wall_ms = (time.perf_counter() - start) * 1000
    return _Measured(value=value, wall_ms=wall_ms, op_count=ops.total)


def _images(pwa: PwaSystem, *, lifting: bool) -> list:
    if lifting:
        return [image_via_lifting(r.zone, r.coefficient, r.dynamics, "fwd") for r in pwa]
    return [image_affine(r.zone, r.coefficient, r.dynamics) for r in pwa]


def _box(n: int, bounds: tuple[float, float]) -> DbmUnion:
    lo, hi = bounds
    return DbmUnion.from_dbm(box([lo] * n, [hi] * n))


def run_trial(cfg: BenchConfig, n: int, trial: int) -> list[BenchRow]:
    """All phases on the instance ``(cfg.seed, n, trial)``."""
    A = random_row_finite(n, cfg, trial)
    measured: dict[str, _Measured] = {}

    measured["states"] = _measure(lambda: generate_partition(A))
    pwa: PwaSystem = measured["states"].value
    measured["transitions"] = _measure(lambda: build_transitions(pwa))
    measured["image"] = _measure(lambda: _images(pwa, lifting=False))
    if cfg.scaling:
        measured["image_lifting"] = _measure(lambda: _images(pwa, lifting=True))
    measured["forward"] = _measure(lambda: forward_reach(_box(n, cfg.forward_box), pwa, cfg.horizon))
    measured["backward"] = _measure(lambda: backward_reach(_box(n, cfg.backward_box), pwa, cfg.horizon))

    state_count = len(pwa)
    transition_count = len(measured["transitions"].value.transitions)
    forward_sets = measured["forward"].value
    backward_sets = measured["backward"].value
    stop = termination_step(backward_sets)
    logger.debug(
        "n=%d trial=%d: %d states, %d transitions, backward empty at %s",
        n,
        trial,
        state_count,
        transition_count,
        stop,
    )

    rows = []
    for phase, m in measured.items():
        parts = None
        if phase == "forward":
            parts = len(forward_sets[-1])
        elif phase == "backward":
            parts = len(backward_sets[-1])
        rows.append(
            BenchRow(
                n=n,
                trial=trial,
                phase=phase,
                wall_ms=m.wall_ms,
                op_count=m.op_count,
                state_count=state_count,
                transition_count=transition_count,
                parts=parts,
                termination_step=stop if phase == "backward" else None,
            )
        )
    return rows


async def _run_batch(cfg: BenchConfig, jobs: list[tuple[int, int]], *, workers: int, console: Console) -> list[BenchRow]:
    semaphore = asyncio.Semaphore(workers)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=False,
    ) as progress:
        task_id = progress.add_task(f"Benchmarking [bold]{len(jobs)}[/bold] instances…", total=len(jobs))

        async def _bounded(n: int, trial: int) -> list[BenchRow]:
            async with semaphore:
                rows = await asyncio.to_thread(run_trial, cfg, n, trial)
            progress.advance(task_id)
            progress.update(task_id, description=f"[green]✓[/green] n={n} trial={trial}")
            return rows

        results = await asyncio.gather(*[_bounded(n, t) for n, t in jobs])

    return [row for rows in results for row in rows]


def bench_run(cfg: BenchConfig, *, workers: int = 1, console: Console | None = None) -> BenchReport:
    jobs = [(n, trial) for n in cfg.dims for trial in range(cfg.trials)]
    logger.info(
        "Benchmark: dims=%s, %d trials each, seed=%d, %d workers",
        cfg.dims,
        cfg.trials,
        cfg.seed,
        workers,
    )
    # fail fast on dimensions the generator cannot fill
    for n in cfg.dims:
        if cfg.finite_per_row > n:
            random_row_finite(n, cfg, 0)
    rows = asyncio.run(
        _run_batch(cfg, jobs, workers=max(1, workers), console=console or Console(stderr=True))
    )
    rows.sort(key=lambda r: r.sort_key)
    return BenchReport(config=cfg, rows=rows)
