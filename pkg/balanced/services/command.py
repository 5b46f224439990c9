"""Command dispatch shared by the CLI and `/v1/commands:run`: parse inputs, call the library, build a report."""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

from pydantic import ValidationError

from balanced.command_schemas import Command, CommandOptions, CommandPayload, CommandReport, CommandRequest
from balanced.config import Caps, load_caps
from balanced.errors import BalanceError, ParameterError, UnbalancedError
from balanced.schemas import Digraph, Family, GroupSpec, Labeling, StructureDescriptor, Verdict, Witness
from balanced.services import abelian, flexible, oracle, rigid
from balanced.services.digraph import parse_graph
from balanced.services.labeling import edge_part, parse_labeling, vertex_part

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNBALANCED = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class _Context:
    options: CommandOptions
    spec: GroupSpec
    graph: Digraph
    labels: Labeling | None
    caps: Caps

    @property
    def family(self) -> Family:
        if self.options.family is None:
            raise ParameterError(f"{self.options.command.value} needs a family.")
        return self.options.family

    @property
    def labeling(self) -> Labeling:
        if self.labels is None:
            raise ParameterError(f"{self.options.command.value} needs labels.")
        return self.labels


def _base_report(context: _Context, status: int = EXIT_OK, **fields: object) -> CommandReport:
    return CommandReport(
        command=context.options.command,
        status=status,
        mode=context.options.effective_mode,
        family=context.options.family,
        group=abelian.format_group_spec(context.spec),
        **fields,
    )


def _labels_dict(labeling: Labeling) -> dict[str, str]:
    values = {key: abelian.format_element(value) for key, value in labeling.on_vertices.items()}
    values.update((key, abelian.format_element(value)) for key, value in labeling.on_edges.items())
    return values


def _witness_fields(witness: Witness | None) -> dict[str, object]:
    if witness is None:
        return {}
    fields: dict[str, object] = {"witness": witness.tokens()}
    if witness.sum is not None:
        fields["witness_sum"] = abelian.format_element(witness.sum)
    return fields


def _verdict_report(context: _Context, verdict: Verdict) -> CommandReport:
    if verdict.balanced:
        return _base_report(context, verdict="balanced")
    return _base_report(context, EXIT_UNBALANCED, verdict="unbalanced", **_witness_fields(verdict.witness))


def _descriptor(graph: Digraph, family: Family) -> StructureDescriptor:
    if family in (Family.HF, Family.BF, Family.WF):
        return flexible.flexible_structure(graph, family)
    return rigid.rigid_structure(graph, family)


def _structure(context: _Context) -> CommandReport:
    descriptor = _descriptor(context.graph, context.family)
    return _base_report(
        context,
        structure=str(descriptor),
        a_exponent=descriptor.a_exponent,
        a2_exponent=descriptor.a2_exponent,
        cardinality=descriptor.cardinality(context.spec),
        parameters={"evaluated": str(descriptor.evaluate_group(context.spec))},
    )


def _balanceability(context: _Context) -> CommandReport:
    if context.family is Family.BR:
        balanced = rigid.br_balance(context.graph, context.labeling)
        return _base_report(context, verdict="balanceable", labels=_labels_dict(balanced))
    report = flexible.bf_balance(context.graph, context.labeling)
    if report.balanceable:
        return _base_report(context, verdict="balanceable", labels=_labels_dict(report.balancer))
    return _base_report(
        context,
        EXIT_UNBALANCED,
        verdict="not_balanceable",
        reason=report.reason,
        **_witness_fields(report.witness),
    )


_CHECKERS: dict[Family, Callable[[Digraph, Labeling], Verdict]] = {
    Family.HF: flexible.hf_check,
    Family.WF: flexible.wf_check,
    Family.HR: rigid.hr_check,
    Family.WR: rigid.wr_check,
}


def _check(context: _Context) -> CommandReport:
    family = context.family
    if family in (Family.BF, Family.BR):
        return _balanceability(context)
    if family in _CHECKERS:
        return _verdict_report(context, _CHECKERS[family](context.graph, context.labeling))
    return _verdict_report(context, oracle.check_by_definition(context.graph, context.labeling, family, caps=context.caps))


def _potential(context: _Context) -> CommandReport:
    potential = flexible.hf_potential_of(context.graph, context.labeling)
    return _base_report(
        context,
        verdict="balanced",
        parameters={vertex: abelian.format_element(value) for vertex, value in potential.items()},
    )


def _params(context: _Context) -> CommandReport:
    parameters: dict[str, str] = {}
    if context.family is Family.WF:
        params = flexible.wf_params_of(context.graph, context.labeling)
        for root, amplitude in params.amplitudes.items():
            parameters[f"amplitude.{root}"] = abelian.format_element(amplitude)
        for vertex, value in params.potential.items():
            parameters[f"potential.{vertex}"] = abelian.format_element(value)
    else:
        params = rigid.hr_params_of(context.graph, context.labeling)
        for root, potential in params.potentials.items():
            for vertex, value in potential.items():
                parameters[f"potential.{root}.{vertex}"] = abelian.format_element(value)
        for edge_id, value in params.cross_values.items():
            parameters[f"cross.{edge_id}"] = abelian.format_element(value)
    return _base_report(context, verdict="balanced", parameters=parameters)


def _split(context: _Context) -> CommandReport:
    gv, f = rigid.wr_split(context.graph, context.labeling)
    return _base_report(context, labels={**_labels_dict(gv), **_labels_dict(f)})


def _join(context: _Context) -> CommandReport:
    h = rigid.wr_join(context.graph, vertex_part(context.labeling), edge_part(context.labeling))
    return _base_report(context, labels=_labels_dict(h))


def _count(context: _Context) -> CommandReport:
    family = context.family
    count = oracle.exhaustive_count(context.graph, family, context.spec, caps=context.caps)
    if family in (Family.H, Family.W):
        return _base_report(context, count=count)
    descriptor = _descriptor(context.graph, family)
    expected = descriptor.cardinality(context.spec)
    return _base_report(
        context,
        count=count,
        expected_count=expected,
        structure=str(descriptor),
        a_exponent=descriptor.a_exponent,
        a2_exponent=descriptor.a2_exponent,
        agree=count == expected,
    )


def _cycles(context: _Context) -> CommandReport:
    mode = context.options.effective_mode
    found = oracle.enumerate_cycles(context.graph, mode, caps=context.caps)
    return _base_report(
        context,
        count=len(found.cycles),
        cycles=[" ".join(cycle.tokens()) for cycle in found.cycles],
    )


def _orientations(context: _Context) -> CommandReport:
    report = oracle.orientation_intersection_check(
        context.graph,
        context.labeling,
        family=context.family,
        caps=context.caps,
    )
    return _base_report(
        context,
        EXIT_OK if report.undirected_balanced else EXIT_UNBALANCED,
        verdict="balanced" if report.undirected_balanced else "unbalanced",
        undirected_balanced=report.undirected_balanced,
        intersection_balanced=report.intersection_balanced,
        orientations_checked=report.orientations_checked,
        agree=report.agree,
    )


_SAMPLERS = {
    Family.HF: flexible.sample_hf,
    Family.WF: flexible.sample_wf,
    Family.HR: rigid.sample_hr,
    Family.WR: rigid.sample_wr,
}


def _sample(context: _Context) -> CommandReport:
    seed = context.options.seed if context.options.seed is not None else 0
    sampled = _SAMPLERS[context.family](context.graph, context.spec, seed, context.caps)
    return _base_report(context, labels=_labels_dict(sampled))


_HANDLERS: dict[Command, Callable[[_Context], CommandReport]] = {
    Command.structure: _structure,
    Command.check: _check,
    Command.potential: _potential,
    Command.params: _params,
    Command.complete: _balanceability,
    Command.split: _split,
    Command.join: _join,
    Command.count: _count,
    Command.cycles: _cycles,
    Command.orientations: _orientations,
    Command.sample: _sample,
}


def execute(payload: CommandPayload, caps: Caps | None = None) -> CommandReport:
    """Run one command on inline inputs; library errors propagate as `BalanceError`."""
    caps = payload.caps.apply(caps or load_caps())
    spec = abelian.parse_group_spec(payload.group)
    graph = parse_graph(payload.graph)
    labels = parse_labeling(payload.labels, graph, spec) if payload.labels is not None else None
    context = _Context(options=payload, spec=spec, graph=graph, labels=labels, caps=caps)
    logger.info("running %s on %d vertices, %d edges", payload.command.value, len(graph.vertices), len(graph.edges))
    try:
        return _HANDLERS[payload.command](context)
    except UnbalancedError as exc:
        return _base_report(
            context,
            EXIT_UNBALANCED,
            verdict="unbalanced",
            reason=exc.message,
            **_witness_fields(exc.witness),
        )


def _read(path: Path, what: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read {what} file {str(path)!r}: {exc.strerror}.") from exc


def load_payload(request: CommandRequest) -> CommandPayload:
    """Turn a file-based request into the inline payload the dispatcher runs."""
    options = request.model_dump(exclude={"graph_path", "labels_path"})
    return CommandPayload(
        **options,
        graph=_read(request.graph_path, "graph"),
        labels=_read(request.labels_path, "labels") if request.labels_path is not None else None,
    )


def error_report(command: Command, message: str) -> CommandReport:
    return CommandReport(command=command, status=EXIT_USAGE, error=message)


def run_command(request: CommandRequest, caps: Caps | None = None) -> tuple[int, CommandReport]:
    """Run a file-based request; usage and parse errors become exit code 2 reports."""
    try:
        report = execute(load_payload(request), caps)
    except BalanceError as exc:
        logger.debug("command %s failed: %s", request.command.value, exc.code)
        report = error_report(request.command, exc.message)
    except ValidationError as exc:
        report = error_report(request.command, str(exc.errors()[0]["msg"]))
    return report.status, report


def render_text(report: CommandReport) -> str:
    """Line-oriented `key: value` form; dict entries become `key.id: value` lines."""
    lines: list[str] = []
    for key, value in report.model_dump(mode="json", exclude_none=True).items():
        if isinstance(value, dict):
            lines.extend(f"{key}.{name}: {item}" for name, item in value.items())
        elif isinstance(value, list):
            if key == "cycles":
                lines.extend(f"cycle: {item}" for item in value)
            else:
                lines.append(f"{key}: {' '.join(str(item) for item in value)}")
        elif isinstance(value, bool):
            lines.append(f"{key}: {'true' if value else 'false'}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)
