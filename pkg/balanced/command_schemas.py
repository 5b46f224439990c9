"""Pydantic schemas for the command surface shared by the CLI and the HTTP API."""

from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from balanced.config import Caps
from balanced.schemas import Family, Mode


class Command(str, Enum):
    structure = "structure"
    check = "check"
    potential = "potential"
    params = "params"
    complete = "complete"
    split = "split"
    join = "join"
    count = "count"
    cycles = "cycles"
    orientations = "orientations"
    sample = "sample"


# Families each command accepts; None means the command works from the mode alone.
COMMAND_FAMILIES: dict[Command, tuple[Family, ...] | None] = {
    Command.structure: (Family.HF, Family.BF, Family.WF, Family.HR, Family.BR, Family.WR),
    Command.check: tuple(Family),
    Command.potential: (Family.HF,),
    Command.params: (Family.WF, Family.HR),
    Command.complete: (Family.BF, Family.BR),
    Command.split: (Family.WR,),
    Command.join: (Family.WR,),
    Command.count: (Family.HF, Family.BF, Family.WF, Family.HR, Family.BR, Family.WR, Family.H, Family.W),
    Command.cycles: None,
    Command.orientations: (Family.H, Family.W),
    Command.sample: (Family.HF, Family.WF, Family.HR, Family.WR),
}

NEEDS_LABELS = frozenset(
    {
        Command.check,
        Command.potential,
        Command.params,
        Command.complete,
        Command.split,
        Command.join,
        Command.orientations,
    }
)


class CommandBaseModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CapOverrides(CommandBaseModel):
    max_cycle_edges: int | None = Field(default=None, ge=0, le=64)
    max_enumeration: int | None = Field(default=None, ge=1)
    max_orientation_edges: int | None = Field(default=None, ge=0, le=30)
    sample_bound: int | None = Field(default=None, ge=0)

    def apply(self, caps: Caps) -> Caps:
        return caps.merged(**self.model_dump())


class CommandOptions(CommandBaseModel):
    """Everything a command needs apart from where the graph and labels come from."""

    command: Command
    mode: Mode | None = None
    family: Family | None = None
    group: str = Field(default="Z", min_length=1, max_length=200)
    seed: int | None = None
    caps: CapOverrides = Field(default_factory=CapOverrides)

    @model_validator(mode="after")
    def validate_family(self) -> "CommandOptions":
        allowed = COMMAND_FAMILIES[self.command]
        if self.command is Command.orientations and self.family is None:
            self.family = Family.H
        if allowed is None:
            if self.family is not None and self.mode is None:
                self.mode = self.family.mode
        elif self.family is None:
            raise ValueError(f"family is required for {self.command.value}.")
        elif self.family not in allowed:
            names = ", ".join(family.value for family in allowed)
            raise ValueError(f"{self.command.value} accepts families {names}, not {self.family.value}.")
        if self.family is not None and self.mode is not None and self.family.mode is not self.mode:
            raise ValueError(f"family {self.family.value} belongs to {self.family.mode.value} mode, not {self.mode.value}.")
        return self

    @property
    def effective_mode(self) -> Mode:
        if self.family is not None:
            return self.family.mode
        return self.mode or Mode.flexible

    def _require_labels(self, present: bool) -> None:
        if self.command in NEEDS_LABELS and not present:
            raise ValueError(f"labels are required for {self.command.value}.")


class CommandRequest(CommandOptions):
    """CLI form: graph and labels are read from files."""

    graph_path: Path
    labels_path: Path | None = None

    @model_validator(mode="after")
    def validate_labels(self) -> "CommandRequest":
        self._require_labels(self.labels_path is not None)
        return self


class CommandPayload(CommandOptions):
    """HTTP form: graph and labels travel inline in their file formats."""

    graph: str = Field(..., max_length=200_000)
    labels: str | None = Field(default=None, max_length=200_000)

    @model_validator(mode="after")
    def validate_labels(self) -> "CommandPayload":
        self._require_labels(self.labels is not None)
        return self


class CommandReport(CommandBaseModel):
    """Result of one command; `status` is the process exit code."""

    command: Command
    status: int = Field(..., ge=0, le=2)
    mode: Mode | None = None
    family: Family | None = None
    group: str | None = None
    verdict: str | None = None
    reason: str | None = None
    structure: str | None = None
    a_exponent: int | None = None
    a2_exponent: int | None = None
    cardinality: int | None = None
    count: int | None = None
    expected_count: int | None = None
    orientations_checked: int | None = None
    undirected_balanced: bool | None = None
    intersection_balanced: bool | None = None
    agree: bool | None = None
    witness: list[str] | None = None
    witness_sum: str | None = None
    cycles: list[str] | None = None
    labels: dict[str, str] | None = None
    parameters: dict[str, str] | None = None
    error: str | None = None


class GraphAnalyzeRequest(CommandBaseModel):
    graph: str = Field(..., max_length=200_000)


class GraphAnalyzeResponse(CommandBaseModel):
    vertices: int
    edges: int
    weak_components: list[list[str]]
    bipartite: bool
    odd_cycle: list[str] | None = None
    strong_components: list[list[str]]
    component_count: int
    cross_edges: list[str]
    r: int


class GroupDescribeRequest(CommandBaseModel):
    group: str = Field(..., min_length=1, max_length=200)


class GroupDescribeResponse(CommandBaseModel):
    group: str
    free_rank: int
    torsion: list[int]
    finite: bool
    cardinality: int | None = None
    involution_rank: int
    involution_generators: list[str]


class ServiceInfo(CommandBaseModel):
    service: str
    version: str
    commands: list[Command]
    families: list[Family]
    modes: list[Mode]
    docs: str = "/docs"


class HealthResponse(CommandBaseModel):
    status: str = "ok"
    version: str
    caps: Caps


def report_payload(report: CommandReport) -> dict[str, Any]:
    return report.model_dump(mode="json", exclude_none=True)
