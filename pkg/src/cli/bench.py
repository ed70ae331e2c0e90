from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from tropabs.bench import BenchConfig, bench_run, parse_dims, random_row_finite
from tropabs.bench.runner import BenchReport, summary_path
from tropabs.models import MatrixModel
from tropabs.parser import write_text

from .common import OutputOpt, console, handle_errors, workers_or_default

bench = typer.Typer(no_args_is_help=True)


def _dims(value: str | None) -> list[int] | None:
    if value is None:
        return None
    try:
        return parse_dims(value)
    except ValueError as e:
        raise typer.BadParameter(str(e)) from None


def _print_summary(report: BenchReport, out: Path) -> None:
    table = Table(title="Benchmark Summary", show_header=True, header_style="bold magenta")
    table.add_column("n", justify="right")
    table.add_column("Phase", style="dim")
    table.add_column("Mean ms", justify="right")
    table.add_column("Max ms", justify="right")
    table.add_column("Mean ops", justify="right")
    table.add_column("Max ops", justify="right")
    for s in report.summary():
        table.add_row(
            str(s.n),
            s.phase,
            f"{s.mean_wall_ms:.2f}",
            f"{s.max_wall_ms:.2f}",
            f"{s.mean_op_count:.0f}",
            str(s.max_op_count),
        )
    console.print(table)

    ratios = report.scaling_ratios()
    if ratios:
        scaling = Table(title="Lifting / direct image ops", show_header=True, header_style="bold magenta")
        scaling.add_column("n", justify="right")
        scaling.add_column("Ratio", justify="right")
        for n, ratio in ratios.items():
            scaling.add_row(str(n), f"{ratio:.2f}")
        console.print(scaling)

    console.print(f"Report: [bold]{out.resolve()}[/bold]")


@bench.command("bench")
def run_bench(  # noqa: PLR0913
    dims: Annotated[
        str | None,
        typer.Option(help="Dimensions, a range like 3..15 or a list like 3,5,8."),
    ] = None,
    trials: Annotated[int | None, typer.Option(help="Random instances per dimension.", min=1)] = None,
    seed: Annotated[int | None, typer.Option(help="Seed of the instance generator.", min=0)] = None,
    finite_per_row: Annotated[
        int | None, typer.Option(help="Finite entries in each matrix row.", min=1)
    ] = None,
    steps: Annotated[int | None, typer.Option(help="Reach-set horizon N.", min=1)] = None,
    scaling: Annotated[
        bool,
        typer.Option(help="Also count the image of every state through the lifted construction."),
    ] = False,
    out: Annotated[
        Path,
        typer.Option(help="CSV report; the mean/max summary goes next to it.", dir_okay=False),
    ] = Path("report.csv"),
    workers: Annotated[int | None, typer.Option(help="Trials run at the same time.", min=1)] = None,
):
    """Time and count every analysis phase on seeded random instances."""
    overrides = {
        "dims": _dims(dims),
        "trials": trials,
        "seed": seed,
        "finite_per_row": finite_per_row,
        "horizon": steps,
    }
    with handle_errors():
        cfg = BenchConfig(**{k: v for k, v in overrides.items() if v is not None}, scaling=scaling)
        report = bench_run(cfg, workers=workers_or_default(workers), console=console)
        report.write_csv(out)
        report.write_summary_csv(summary_path(out))
        _print_summary(report, out)


@bench.command()
def gen(
    n: Annotated[int, typer.Option("--n", help="Dimension of the matrix.", min=1)],
    seed: Annotated[int, typer.Option(help="Seed of the instance generator.", min=0)] = 0,
    trial: Annotated[int, typer.Option(help="Trial index within the seed.", min=0)] = 0,
    finite_per_row: Annotated[int, typer.Option(help="Finite entries in each row.", min=1)] = 2,
    output: OutputOpt = None,
):
    """Emit a random row-finite matrix as JSON."""
    with handle_errors():
        cfg = BenchConfig(dims=[n], seed=seed, finite_per_row=finite_per_row)
        A = random_row_finite(n, cfg, trial)
        write_text(MatrixModel.from_matrix(A).model_dump_json(), output)
