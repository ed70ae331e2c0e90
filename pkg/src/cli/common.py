import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated

import typer
from pydantic import ValidationError
from rich.console import Console

from tropabs.config import Config
from tropabs.errors import InvariantError, TropabsError

logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_INVALID = 1
EXIT_INVARIANT = 2

MatrixArg = Annotated[
    Path,
    typer.Argument(
        help="Matrix JSON file, null entries are ε.",
        exists=True,
        file_okay=True,
        dir_okay=False,
        readable=True,
    ),
]

DbmArg = Annotated[
    Path,
    typer.Argument(help="DBM JSON file.", exists=True, file_okay=True, dir_okay=False, readable=True),
]

OutputOpt = Annotated[
    Path | None,
    typer.Option("--output", "-o", help="Where to write the result. Defaults to stdout.", dir_okay=False),
]

WorkersOpt = Annotated[
    int | None,
    typer.Option(help="Worker threads for the per-region loops. Defaults to the configured value.", min=1),
]


def workers_or_default(workers: int | None) -> int:
    return workers if workers is not None else Config().runtime.workers


def parallel_options(workers: int | None) -> dict[str, int]:
    """``workers`` and ``chunk_size`` for the per-region loops, filled from the config."""
    runtime = Config().runtime
    return {
        "workers": workers if workers is not None else runtime.workers,
        "chunk_size": runtime.chunk_size,
    }


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn library errors into a red message and an exit code."""
    try:
        yield
    except InvariantError as exc:
        logger.exception("Internal invariant violated")
        console.print(f"[bold red]Invariant violated:[/bold red] {exc}")
        raise typer.Exit(EXIT_INVARIANT) from exc
    except (TropabsError, ValidationError) as exc:
        console.print(f"[red]Error:[/red] {exc}")
        raise typer.Exit(EXIT_INVALID) from exc
