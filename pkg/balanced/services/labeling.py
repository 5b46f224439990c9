"""Labeling file format, walk sums and pointwise helpers shared by the checkers."""

from collections.abc import Iterable

from balanced.errors import DuplicateIdError, GraphFormatError, MissingLabelError, ParameterError, ShapeError
from balanced.schemas import Digraph, Direction, GroupElement, GroupSpec, Labeling, Mode, Step
from balanced.services import abelian


KIND_PREFIXES = {"v:": "vertex", "e:": "edge"}


def _resolve_id(label_id: str, graph: Digraph, vertex_ids: set[str], line_number: int) -> tuple[str, bool]:
    """(graph id, is_vertex); a `v:` / `e:` prefix picks the kind when an id names both."""
    is_vertex = label_id in vertex_ids
    is_edge = graph.has_edge(label_id)
    if is_vertex and is_edge:
        raise GraphFormatError(
            f"id {label_id!r} names both a vertex and an edge; write v:{label_id} or e:{label_id}", line_number
        )
    if is_vertex or is_edge:
        return label_id, is_vertex
    kind = KIND_PREFIXES.get(label_id[:2])
    stripped = label_id[2:]
    if kind == "vertex" and stripped in vertex_ids:
        return stripped, True
    if kind == "edge" and graph.has_edge(stripped):
        return stripped, False
    raise GraphFormatError(f"id {label_id!r} is not a vertex or edge of the graph", line_number)


def parse_labeling(text: str, graph: Digraph, spec: GroupSpec) -> Labeling:
    """Read `<id><TAB><coords>` lines; ids name one graph vertex or edge, `v:` / `e:` disambiguate shared ids."""
    vertex_ids = set(graph.vertices)
    on_vertices: dict[str, GroupElement] = {}
    on_edges: dict[str, GroupElement] = {}

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t", 1) if "\t" in line else line.split(None, 1)
        label_id, is_vertex = _resolve_id(parts[0].strip(), graph, vertex_ids, line_number)
        coords = parts[1] if len(parts) > 1 else ""
        target = on_vertices if is_vertex else on_edges
        if label_id in target:
            raise DuplicateIdError(f"id {label_id!r} labelled twice", line_number)
        try:
            target[label_id] = abelian.parse_element(coords, spec)
        except ShapeError as exc:
            raise GraphFormatError(str(exc), line_number) from exc

    return Labeling(spec=spec, on_vertices=on_vertices, on_edges=on_edges)


def format_labeling(labeling: Labeling) -> str:
    shared = labeling.on_vertices.keys() & labeling.on_edges.keys()
    lines = [
        f"{'v:' if key in shared else ''}{key}\t{abelian.format_element(value)}"
        for key, value in labeling.on_vertices.items()
    ]
    lines.extend(
        f"{'e:' if key in shared else ''}{key}\t{abelian.format_element(value)}"
        for key, value in labeling.on_edges.items()
    )
    return "\n".join(lines) + ("\n" if lines else "")


def require_edges(graph: Digraph, labeling: Labeling) -> None:
    missing = [edge.id for edge in graph.edges if edge.id not in labeling.on_edges]
    if missing:
        raise MissingLabelError("edge", missing)


def require_vertices(graph: Digraph, labeling: Labeling) -> None:
    missing = [vertex for vertex in graph.vertices if vertex not in labeling.on_vertices]
    if missing:
        raise MissingLabelError("vertex", missing)


def require_total(graph: Digraph, labeling: Labeling) -> None:
    require_vertices(graph, labeling)
    require_edges(graph, labeling)


def edge_value(labeling: Labeling, edge_id: str, direction: Direction) -> GroupElement:
    value = labeling.on_edges[edge_id]
    if direction is Direction.forward:
        return value
    return abelian.negate(value, labeling.spec)


def walk_sum(
    steps: Iterable[Step],
    labeling: Labeling,
    *,
    include_vertices: bool,
    mode: Mode = Mode.flexible,
) -> GroupElement:
    """Sum of the labeling along a walk; reverse traversals negate unless the walk is undirected."""
    spec = labeling.spec
    accumulated = spec.zero
    for step in steps:
        if include_vertices:
            accumulated = abelian.add(accumulated, labeling.on_vertices[step.vertex], spec)
        if mode is Mode.undirected:
            value = labeling.on_edges[step.edge]
        else:
            if mode is Mode.rigid and step.direction is not Direction.forward:
                raise ParameterError(f"rigid walk traverses {step.edge!r} in reverse.")
            value = edge_value(labeling, step.edge, step.direction)
        accumulated = abelian.add(accumulated, value, spec)
    return accumulated


def _pointwise(
    left: dict[str, GroupElement],
    right: dict[str, GroupElement],
    spec: GroupSpec,
) -> dict[str, GroupElement]:
    if left.keys() != right.keys():
        raise ParameterError("labelings must share the same domain to be added.")
    return {key: abelian.add(value, right[key], spec) for key, value in left.items()}


def add_labelings(left: Labeling, right: Labeling) -> Labeling:
    if left.spec != right.spec:
        raise ParameterError("labelings take values in different groups.")
    return Labeling(
        spec=left.spec,
        on_vertices=_pointwise(left.on_vertices, right.on_vertices, left.spec),
        on_edges=_pointwise(left.on_edges, right.on_edges, left.spec),
    )


def vertex_part(labeling: Labeling) -> Labeling:
    return Labeling(spec=labeling.spec, on_vertices=dict(labeling.on_vertices))


def edge_part(labeling: Labeling) -> Labeling:
    return Labeling(spec=labeling.spec, on_edges=dict(labeling.on_edges))


def restrict(labeling: Labeling, graph: Digraph) -> Labeling:
    """Keep only the labels of vertices and edges present in `graph`."""
    return Labeling(
        spec=labeling.spec,
        on_vertices={vertex: labeling.on_vertices[vertex] for vertex in graph.vertices if vertex in labeling.on_vertices},
        on_edges={edge.id: labeling.on_edges[edge.id] for edge in graph.edges if edge.id in labeling.on_edges},
    )


def constant_labeling(
    graph: Digraph,
    spec: GroupSpec,
    *,
    vertices: GroupElement | None = None,
    edges: GroupElement | None = None,
) -> Labeling:
    return Labeling(
        spec=spec,
        on_vertices={vertex: vertices for vertex in graph.vertices} if vertices is not None else {},
        on_edges={edge.id: edges for edge in graph.edges} if edges is not None else {},
    )
