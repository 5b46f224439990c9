"""`balanced` command line: exit 0 balanced, 1 unbalanced or not balanceable, 2 usage and parse errors."""

import json
import logging
from pathlib import Path

import click
from pydantic import ValidationError

from balanced.command_schemas import Command, CommandReport, CommandRequest, report_payload
from balanced.config import load_caps
from balanced.schemas import Family, Mode
from balanced.services.command import error_report, render_text, run_command

_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def _emit(report: CommandReport, emit: str) -> None:
    if emit == "machine":
        click.echo(json.dumps(report_payload(report)))
    else:
        click.echo(render_text(report))


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("command", type=click.Choice([command.value for command in Command]))
@click.option("--mode", type=click.Choice([mode.value for mode in Mode]), default=None, help="Traversal semantics.")
@click.option("--family", type=click.Choice([family.value for family in Family]), default=None, help="Labeling family.")
@click.option("--graph", "graph_path", type=click.Path(path_type=Path), required=True, help="Graph file (v/e lines).")
@click.option("--labels", "labels_path", type=click.Path(path_type=Path), default=None, help="Labeling file (id TAB coords).")
@click.option("--group", default="Z", show_default=True, help='Group spec such as "Z^2 x Z/4".')
@click.option("--seed", type=int, default=None, help="Seed for the sample command.")
@click.option("--emit", type=click.Choice(["text", "machine"]), default="text", show_default=True)
@click.option("--max-cycles-edges", "max_cycle_edges", type=int, default=None)
@click.option("--max-enumeration", type=int, default=None)
@click.option("--max-orientation-edges", type=int, default=None)
@click.option("--sample-bound", type=int, default=None)
@click.option("--env-file", type=click.Path(path_type=Path), default=None, help="dotenv file with BALANCED_* caps.")
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging.")
@click.pass_context
def main(
    ctx: click.Context,
    command: str,
    mode: str | None,
    family: str | None,
    graph_path: Path,
    labels_path: Path | None,
    group: str,
    seed: int | None,
    emit: str,
    max_cycle_edges: int | None,
    max_enumeration: int | None,
    max_orientation_edges: int | None,
    sample_bound: int | None,
    env_file: Path | None,
    verbose: int,
) -> None:
    """Check, parametrize and count balanced group labelings of a directed multigraph."""
    logging.basicConfig(level=_LEVELS.get(verbose, logging.DEBUG), format="%(levelname)s %(name)s: %(message)s")
    try:
        request = CommandRequest(
            command=command,
            mode=mode,
            family=family,
            graph_path=graph_path,
            labels_path=labels_path,
            group=group,
            seed=seed,
            caps={
                "max_cycle_edges": max_cycle_edges,
                "max_enumeration": max_enumeration,
                "max_orientation_edges": max_orientation_edges,
                "sample_bound": sample_bound,
            },
        )
    except ValidationError as exc:
        report = error_report(Command(command), exc.errors()[0]["msg"])
        _emit(report, emit)
        ctx.exit(report.status)

    status, report = run_command(request, load_caps(env_file))
    _emit(report, emit)
    ctx.exit(status)
