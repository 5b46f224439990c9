"""Pydantic models for groups, graphs, labelings, witnesses and parametrizations."""

from enum import Enum
from math import prod
from typing import TypeAlias

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from balanced.errors import ShapeError

# Coordinates of Z^r x Z/m_1 x ... ; free slots first, torsion slots reduced into [0, m_i).
GroupElement: TypeAlias = tuple[int, ...]


class DomainModel(BaseModel):
    """Base config: strict fields, values immutable after construction."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class Mode(str, Enum):
    flexible = "flexible"
    rigid = "rigid"
    undirected = "undirected"


class Family(str, Enum):
    HF = "HF"
    BF = "BF"
    WF = "WF"
    HR = "HR"
    BR = "BR"
    WR = "WR"
    H = "H"
    W = "W"

    @property
    def mode(self) -> Mode:
        if self in (Family.HF, Family.BF, Family.WF):
            return Mode.flexible
        if self in (Family.HR, Family.BR, Family.WR):
            return Mode.rigid
        return Mode.undirected

    @property
    def labels_vertices(self) -> bool:
        return self not in (Family.HF, Family.HR, Family.H)

    @property
    def labels_edges(self) -> bool:
        return self not in (Family.BF, Family.BR)


class Direction(str, Enum):
    forward = "forward"
    reverse = "reverse"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.forward else -1


class GroupSpec(DomainModel):
    """The group Z^free_rank x Z/m_1 x ... x Z/m_k, torsion kept in the order given."""

    free_rank: int = Field(default=0, ge=0)
    torsion: tuple[int, ...] = ()

    @field_validator("torsion")
    @classmethod
    def validate_torsion(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(modulus < 2 for modulus in value):
            raise ValueError("every torsion factor must be at least 2.")
        return value

    @property
    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate modulus, 0 marking a Z factor."""
        return (0,) * self.free_rank + self.torsion

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def cardinality(self) -> int | None:
        return prod(self.torsion) if self.is_finite else None

    @property
    def involution_rank(self) -> int:
        """Number of Z/2 factors of the doubling kernel A_2."""
        return sum(1 for modulus in self.torsion if modulus % 2 == 0)

    @property
    def zero(self) -> GroupElement:
        return (0,) * self.rank

    def is_canonical(self, element: GroupElement) -> bool:
        if len(element) != self.rank:
            return False
        return all(modulus == 0 or 0 <= value < modulus for value, modulus in zip(element, self.moduli))

    def require(self, element: GroupElement) -> GroupElement:
        """Return `element` unchanged or raise `ShapeError` when it is not canonical here."""
        if len(element) != self.rank:
            raise ShapeError(f"element {element} has {len(element)} coordinates, group has {self.rank}.")
        if not self.is_canonical(element):
            raise ShapeError(f"element {element} is not reduced modulo {self.torsion}.")
        return element

    def __str__(self) -> str:
        terms: list[str] = []
        if self.free_rank == 1:
            terms.append("Z")
        elif self.free_rank > 1:
            terms.append(f"Z^{self.free_rank}")
        terms.extend(f"Z/{modulus}" for modulus in self.torsion)
        return " x ".join(terms) if terms else "0"


class InvolutionSubgroup(DomainModel):
    """A_2 = {a : a + a = 0}, always (Z/2)^q, with its generators embedded in A."""

    spec: GroupSpec
    embedding: tuple[GroupElement, ...] = ()

    @property
    def cardinality(self) -> int:
        return 2 ** len(self.embedding)


class Edge(DomainModel):
    id: str = Field(..., min_length=1)
    tail: str = Field(..., min_length=1)
    head: str = Field(..., min_length=1)

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def start(self, direction: Direction) -> str:
        return self.tail if direction is Direction.forward else self.head

    def end(self, direction: Direction) -> str:
        return self.head if direction is Direction.forward else self.tail


class Digraph(DomainModel):
    """Directed multigraph; loops and parallel edges allowed, ids stable in input order."""

    vertices: tuple[str, ...] = ()
    edges: tuple[Edge, ...] = ()

    _edges_by_id: dict[str, Edge] = PrivateAttr(default_factory=dict)
    _out: dict[str, list[Edge]] = PrivateAttr(default_factory=dict)
    _in: dict[str, list[Edge]] = PrivateAttr(default_factory=dict)
    _arcs: dict[str, list[tuple[Edge, Direction]]] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def validate_ids(self) -> "Digraph":
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex ids must be unique.")
        edge_ids = [edge.id for edge in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise ValueError("edge ids must be unique.")
        known = set(self.vertices)
        for edge in self.edges:
            if edge.tail not in known or edge.head not in known:
                raise ValueError(f"edge {edge.id} references an unknown vertex.")
        return self

    def model_post_init(self, _context: object) -> None:
        self._edges_by_id = {edge.id: edge for edge in self.edges}
        self._out = {vertex: [] for vertex in self.vertices}
        self._in = {vertex: [] for vertex in self.vertices}
        self._arcs = {vertex: [] for vertex in self.vertices}
        for edge in self.edges:
            self._out[edge.tail].append(edge)
            self._in[edge.head].append(edge)
            self._arcs[edge.tail].append((edge, Direction.forward))
            self._arcs[edge.head].append((edge, Direction.reverse))

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(edge.id for edge in self.edges)

    def edge(self, edge_id: str) -> Edge:
        return self._edges_by_id[edge_id]

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edges_by_id

    def out_edges(self, vertex: str) -> list[Edge]:
        return self._out[vertex]

    def in_edges(self, vertex: str) -> list[Edge]:
        return self._in[vertex]

    def arcs(self, vertex: str) -> list[tuple[Edge, Direction]]:
        """Edges leaving `vertex` in the doubled edge set, in edge order; a loop yields both directions."""
        return self._arcs[vertex]


class Step(DomainModel):
    """Leave `vertex` along `edge`, with or against its direction."""

    vertex: str
    edge: str
    direction: Direction = Direction.forward

    def token(self) -> str:
        return f"{self.edge}{'+' if self.direction is Direction.forward else '-'}"


class Witness(DomainModel):
    """A closed walk; `sum` is its labeling value when a checker produced it."""

    steps: tuple[Step, ...]
    sum: GroupElement | None = None

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(step.vertex for step in self.steps)

    def tokens(self) -> list[str]:
        """Alternating vertex / edge tokens, `e+` forward and `e-` reverse, closed by the first vertex."""
        tokens: list[str] = []
        for step in self.steps:
            tokens.extend((step.vertex, step.token()))
        if self.steps:
            tokens.append(self.steps[0].vertex)
        return tokens


class Bipartition(DomainModel):
    bipartite: bool
    classes: dict[str, int] = Field(default_factory=dict)
    odd_cycle: Witness | None = None


class SccDecomposition(DomainModel):
    """Strongly connected components numbered by first vertex appearance."""

    component_of: dict[str, int]
    components: tuple[tuple[str, ...], ...]
    cross_edges: tuple[str, ...]

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def r(self) -> int:
        return len(self.cross_edges)

    @property
    def roots(self) -> tuple[str, ...]:
        return tuple(members[0] for members in self.components)


def _check_elements(spec: GroupSpec, values: dict[str, GroupElement]) -> None:
    for element in values.values():
        spec.require(element)


class Labeling(DomainModel):
    """Partial map from vertex and edge ids to elements; edge labels are f(e), with f(ē) = -f(e)."""

    spec: GroupSpec
    on_vertices: dict[str, GroupElement] = Field(default_factory=dict)
    on_edges: dict[str, GroupElement] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_elements(self) -> "Labeling":
        _check_elements(self.spec, self.on_vertices)
        _check_elements(self.spec, self.on_edges)
        return self


class Verdict(DomainModel):
    balanced: bool
    witness: Witness | None = None


class WfParams(DomainModel):
    """Amplitude per weak component (keyed by its root) plus a potential vanishing on every root."""

    spec: GroupSpec
    amplitudes: dict[str, GroupElement]
    potential: dict[str, GroupElement]

    @model_validator(mode="after")
    def validate_params(self) -> "WfParams":
        _check_elements(self.spec, self.amplitudes)
        _check_elements(self.spec, self.potential)
        for root in self.amplitudes:
            if self.potential.get(root, self.spec.zero) != self.spec.zero:
                raise ValueError(f"potential must vanish on component root {root}.")
        return self

    @property
    def root(self) -> str:
        return next(iter(self.amplitudes))

    @property
    def a(self) -> GroupElement:
        return self.amplitudes[self.root]


class HrParams(DomainModel):
    """One potential per strongly connected component plus free values on cross edges."""

    spec: GroupSpec
    potentials: dict[str, dict[str, GroupElement]]
    cross_values: dict[str, GroupElement] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_params(self) -> "HrParams":
        for root, potential in self.potentials.items():
            _check_elements(self.spec, potential)
            if potential.get(root, self.spec.zero) != self.spec.zero:
                raise ValueError(f"potential must vanish on component root {root}.")
        _check_elements(self.spec, self.cross_values)
        return self


class StructureDescriptor(DomainModel):
    """The formal group A^p x (A_2)^q."""

    a_exponent: int = Field(default=0, ge=0)
    a2_exponent: int = Field(default=0, ge=0)

    def __add__(self, other: "StructureDescriptor") -> "StructureDescriptor":
        return StructureDescriptor(
            a_exponent=self.a_exponent + other.a_exponent,
            a2_exponent=self.a2_exponent + other.a2_exponent,
        )

    def evaluate_group(self, spec: GroupSpec) -> GroupSpec:
        return GroupSpec(
            free_rank=spec.free_rank * self.a_exponent,
            torsion=spec.torsion * self.a_exponent + (2,) * (spec.involution_rank * self.a2_exponent),
        )

    def cardinality(self, spec: GroupSpec) -> int | None:
        """|A|^p * |A_2|^q, or None when the evaluated group is infinite."""
        return self.evaluate_group(spec).cardinality

    def __str__(self) -> str:
        terms = []
        if self.a2_exponent:
            terms.append("A_2" if self.a2_exponent == 1 else f"A_2^{self.a2_exponent}")
        if self.a_exponent:
            terms.append("A" if self.a_exponent == 1 else f"A^{self.a_exponent}")
        return " x ".join(terms) if terms else "0"


class CycleSet(DomainModel):
    mode: Mode
    cycles: tuple[Witness, ...] = ()


class BalanceReport(DomainModel):
    """Outcome of asking whether a vertex function is balanceable."""

    balanceable: bool
    balancer: Labeling | None = None
    reason: str | None = None
    pair: tuple[str, str] | None = None
    witness: Witness | None = None


class OrientationReport(DomainModel):
    undirected_balanced: bool
    intersection_balanced: bool
    orientations_checked: int
    failing_orientation: int | None = None

    @property
    def agree(self) -> bool:
        return self.undirected_balanced == self.intersection_balanced
