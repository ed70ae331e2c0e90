from pathlib import Path
from typing import Annotated

import numpy as np
import typer
from pydantic import TypeAdapter
from rich.table import Table

from tropabs.abstraction import abstract_trace, build_transitions, is_path, to_dot, to_json
from tropabs.dbm import describe
from tropabs.errors import InvariantError
from tropabs.models import RegionModel
from tropabs.parser import parse_dbm, parse_matrix, parse_union, reach_step_json, union_json, write_text
from tropabs.pwa import PwaSystem, generate_partition, generate_pwa, region_zone, sign_rule
from tropabs.reach import backward_reach, forward_reach, image_mpl, preimage_mpl
from tropabs.tropical import simulate as simulate_trajectory

from .common import (
    DbmArg,
    MatrixArg,
    OutputOpt,
    WorkersOpt,
    console,
    handle_errors,
    parallel_options,
)

analysis = typer.Typer(no_args_is_help=True)

OracleOpt = Annotated[
    bool,
    typer.Option(help="Use the lifted 2n-variable construction instead of the direct algorithms."),
]


def _describe_table(pwa: PwaSystem) -> Table:
    table = Table(title="Regions", show_header=True, header_style="bold magenta")
    table.add_column("State", style="dim")
    table.add_column("Coefficient")
    table.add_column("Constraints")
    for k, region in enumerate(pwa, start=1):
        table.add_row(f"r{k}", str(region.coefficient), describe(region.zone) or "R^n")
    return table


@analysis.command()
def pwa(
    matrix: MatrixArg,
    partition: Annotated[
        bool,
        typer.Option(help="Disjoint abstract states, or the overlapping PWA regions."),
    ] = True,
    describe_regions: Annotated[
        bool,
        typer.Option("--describe", help="Add readable inequalities and print them as a table."),
    ] = False,
    raw: Annotated[
        bool,
        typer.Option(help="Emit the region DBMs before canonicalization."),
    ] = False,
    output: OutputOpt = None,
    workers: WorkersOpt = None,
):
    """Generate the PWA regions of a matrix."""
    with handle_errors():
        A = parse_matrix(matrix)
        build = generate_partition if partition else generate_pwa
        system = build(A, **parallel_options(workers))
        models = []
        for region in system:
            zone = region.zone
            if raw:
                zone = region_zone(system.source, region.augmented_coefficient)
                if partition:
                    zone = sign_rule(zone)
            models.append(
                RegionModel.from_region(
                    region,
                    zone=zone,
                    description=describe(region.zone) if describe_regions else None,
                )
            )
        text = TypeAdapter(list[RegionModel]).dump_json(models, indent=2, exclude_none=True).decode()
        write_text(text, output)
        if describe_regions:
            console.print(_describe_table(system))


@analysis.command()
def abstract(
    matrix: MatrixArg,
    json_out: Annotated[
        Path | None,
        typer.Option("--json", help="Where to write the transition system as JSON.", dir_okay=False),
    ] = None,
    dot: Annotated[
        Path | None,
        typer.Option(help="Where to write the transition graph in GraphViz format.", dir_okay=False),
    ] = None,
    workers: WorkersOpt = None,
):
    """Build the finite abstraction: abstract states and transitions."""
    with handle_errors():
        options = parallel_options(workers)
        A = parse_matrix(matrix)
        ts = build_transitions(generate_partition(A, **options), **options)
        if dot is not None:
            write_text(to_dot(ts), dot)
        if json_out is not None or dot is None:
            write_text(to_json(ts), json_out)

        table = Table(title="Abstraction", show_header=True, header_style="bold magenta")
        table.add_column("Metric", style="dim")
        table.add_column("Value", justify="right")
        table.add_row("Dimension", str(A.shape[0]))
        table.add_row("States", str(len(ts.states)))
        table.add_row("Transitions", str(len(ts.transitions)))
        console.print(table)


@analysis.command()
def image(
    matrix: MatrixArg,
    dbm: DbmArg,
    oracle: OracleOpt = False,
    output: OutputOpt = None,
    workers: WorkersOpt = None,
):
    """One-step image of a DBM under the MPL system."""
    with handle_errors():
        options = parallel_options(workers)
        system = generate_partition(parse_matrix(matrix), **options)
        U = image_mpl(parse_dbm(dbm), system, oracle=oracle, **options)
        write_text(union_json(U), output)


@analysis.command()
def preimage(
    matrix: MatrixArg,
    dbm: DbmArg,
    oracle: OracleOpt = False,
    output: OutputOpt = None,
    workers: WorkersOpt = None,
):
    """Inverse image of a DBM: the states mapped into it in one step."""
    with handle_errors():
        options = parallel_options(workers)
        system = generate_partition(parse_matrix(matrix), **options)
        U = preimage_mpl(parse_dbm(dbm), system, oracle=oracle, **options)
        write_text(union_json(U), output)


@analysis.command()
def reach(
    matrix: MatrixArg,
    initial: Annotated[
        Path,
        typer.Argument(help="Initial set: a DBM or a union of DBMs.", exists=True, dir_okay=False),
    ],
    forward: Annotated[
        bool,
        typer.Option("--forward/--backward", help="Direction of the reach sets."),
    ] = True,
    steps: Annotated[int, typer.Option(help="Horizon N.", min=1)] = 10,
    oracle: OracleOpt = False,
    output: OutputOpt = None,
    workers: WorkersOpt = None,
):
    """Reach sets over a finite horizon, one JSON document per line and step."""
    with handle_errors():
        options = parallel_options(workers)
        system = generate_partition(parse_matrix(matrix), **options)
        start = parse_union(initial)
        run = forward_reach if forward else backward_reach
        sets = run(start, system, steps, oracle=oracle, **options)
        sign = 1 if forward else -1
        lines = [reach_step_json(sign * k, U) for k, U in enumerate(sets, start=1)]
        write_text("\n".join(lines) + "\n", output)


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise typer.BadParameter(f"'{text}' is not a comma-separated list of numbers") from None


@analysis.command()
def simulate(
    matrix: MatrixArg,
    x0: Annotated[str, typer.Option(help="Initial state, comma-separated, e.g. 0,0,0.")],
    steps: Annotated[int, typer.Option(help="Number of steps.", min=0)] = 10,
    check: Annotated[
        bool,
        typer.Option(help="Check that the abstract trace is a path of the abstraction."),
    ] = True,
):
    """Simulate x(k+1) = A ⊗ x(k) and map the trajectory onto abstract states."""
    start = _parse_vector(x0)
    with handle_errors():
        A = parse_matrix(matrix)
        trajectory = simulate_trajectory(A, start, steps)
        ts = build_transitions(generate_partition(A))
        trace = abstract_trace(ts, trajectory)

        table = Table(title="Trajectory", show_header=True, header_style="bold magenta")
        table.add_column("k", justify="right")
        table.add_column("x(k)")
        table.add_column("State")
        table.add_column("Coefficient")
        for k, (x, state) in enumerate(zip(trajectory, trace, strict=True)):
            values = ", ".join(f"{v:g}" for v in np.asarray(x))
            table.add_row(str(k), values, f"r{state + 1}", str(ts.states[state].coefficient))
        console.print(table)

        if check and not is_path(ts, trace):
            raise InvariantError(
                "The abstract trace " + " ".join(f"r{s + 1}" for s in trace) + " is not a path of the abstraction"
            )
