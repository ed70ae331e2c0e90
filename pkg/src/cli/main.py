import logging
from typing import Annotated

import typer
from rich.logging import RichHandler

from tropabs.config import Config

from .analysis import analysis
from .bench import bench
from .common import console

app = typer.Typer(no_args_is_help=True)

logging_format = "%(asctime)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"


@app.callback()
def callback(
    verbose: Annotated[
        bool,
        typer.Option("--verbose", "-v", help="Show debug messages on the console."),
    ] = False,
):
    """
    Finite abstractions of max-plus-linear systems
    """
    config = Config()
    logging.basicConfig(
        level=logging.DEBUG,
        format=logging_format,
        handlers=[
            RichHandler(level=logging.DEBUG if verbose else logging.INFO, console=console),
            logging.FileHandler(config.runtime.log_file, encoding="utf-8"),
        ],
        force=True,
    )


app.add_typer(analysis)
app.add_typer(bench)
