"""Directed multigraph parsing and the structural algorithms the balance theory relies on."""

import logging
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from balanced.config import Caps, resolve_caps
from balanced.errors import (
    CapExceededError,
    DuplicateIdError,
    GraphFormatError,
    ParameterError,
    UnknownVertexError,
)
from balanced.schemas import (
    Bipartition,
    Digraph,
    Direction,
    Edge,
    Mode,
    SccDecomposition,
    Step,
    Witness,
)

logger = logging.getLogger(__name__)

REVERSED_SUFFIX = "~"


def flip(direction: Direction) -> Direction:
    return Direction.reverse if direction is Direction.forward else Direction.forward


def parse_graph(text: str, *, strict: bool = False) -> Digraph:
    """Read `v <id>` / `e <id> <tail> <head>` lines; `#` starts a comment."""
    vertices: list[str] = []
    known: set[str] = set()
    declared: set[str] = set()
    edges: list[Edge] = []
    edge_ids: set[str] = set()

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        tokens = raw_line.split("#", 1)[0].split()
        if not tokens:
            continue
        kind = tokens[0]
        if kind == "v":
            if len(tokens) != 2:
                raise GraphFormatError("expected `v <vertex-id>`", line_number)
            vertex = tokens[1]
            if vertex in declared:
                raise DuplicateIdError(f"duplicate vertex id {vertex!r}", line_number)
            declared.add(vertex)
            if vertex not in known:
                known.add(vertex)
                vertices.append(vertex)
        elif kind == "e":
            if len(tokens) != 4:
                raise GraphFormatError("expected `e <edge-id> <tail-id> <head-id>`", line_number)
            edge_id, tail, head = tokens[1:]
            if edge_id in edge_ids:
                raise DuplicateIdError(f"duplicate edge id {edge_id!r}", line_number)
            for endpoint in (tail, head):
                if endpoint in known:
                    continue
                if strict:
                    raise UnknownVertexError(f"edge {edge_id!r} references undeclared vertex {endpoint!r}", line_number)
                known.add(endpoint)
                vertices.append(endpoint)
            edge_ids.add(edge_id)
            edges.append(Edge(id=edge_id, tail=tail, head=head))
        else:
            raise GraphFormatError(f"unknown record type {kind!r}", line_number)

    graph = Digraph(vertices=tuple(vertices), edges=tuple(edges))
    logger.debug("parsed graph with %d vertices and %d edges", len(vertices), len(edges))
    return graph


def format_graph(graph: Digraph) -> str:
    lines = [f"v {vertex}" for vertex in graph.vertices]
    lines.extend(f"e {edge.id} {edge.tail} {edge.head}" for edge in graph.edges)
    return "\n".join(lines) + "\n"


def weak_components(graph: Digraph) -> list[tuple[str, ...]]:
    """Components of the underlying undirected multigraph, each in vertex order, ordered by first vertex."""
    seen: set[str] = set()
    components: list[tuple[str, ...]] = []
    position = {vertex: index for index, vertex in enumerate(graph.vertices)}
    for start in graph.vertices:
        if start in seen:
            continue
        seen.add(start)
        members = [start]
        queue = deque([start])
        while queue:
            vertex = queue.popleft()
            for edge, direction in graph.arcs(vertex):
                neighbour = edge.end(direction)
                if neighbour not in seen:
                    seen.add(neighbour)
                    members.append(neighbour)
                    queue.append(neighbour)
        components.append(tuple(sorted(members, key=position.__getitem__)))
    return components


@dataclass(frozen=True)
class SpanningForest:
    """Breadth-first spanning forest of the underlying multigraph, one tree per weak component."""

    roots: tuple[str, ...]
    order: tuple[str, ...]
    parent: dict[str, tuple[Edge, Direction]]
    depth: dict[str, int]
    root_of: dict[str, str]

    def is_tree_edge(self, edge: Edge) -> bool:
        for endpoint in (edge.tail, edge.head):
            arc = self.parent.get(endpoint)
            if arc is not None and arc[0].id == edge.id:
                return True
        return False

    def parent_vertex(self, vertex: str) -> str:
        edge, direction = self.parent[vertex]
        return edge.start(direction)

    def path(self, source: str, target: str) -> list[Step]:
        """Tree walk from `source` to `target` through their lowest common ancestor."""
        up: list[Step] = []
        down: list[Step] = []
        a, b = source, target
        while self.depth[a] > self.depth[b]:
            up.append(self._up_step(a))
            a = self.parent_vertex(a)
        while self.depth[b] > self.depth[a]:
            down.append(self._down_step(b))
            b = self.parent_vertex(b)
        while a != b:
            up.append(self._up_step(a))
            a = self.parent_vertex(a)
            down.append(self._down_step(b))
            b = self.parent_vertex(b)
        return up + down[::-1]

    def _up_step(self, vertex: str) -> Step:
        edge, direction = self.parent[vertex]
        return Step(vertex=vertex, edge=edge.id, direction=flip(direction))

    def _down_step(self, vertex: str) -> Step:
        edge, direction = self.parent[vertex]
        return Step(vertex=edge.start(direction), edge=edge.id, direction=direction)


def spanning_forest(graph: Digraph, roots: Iterable[str] | None = None) -> SpanningForest:
    """BFS forest scanning incident edges in edge order; roots default to each component's first vertex."""
    start_vertices = list(roots) if roots is not None else [members[0] for members in weak_components(graph)]
    parent: dict[str, tuple[Edge, Direction]] = {}
    depth: dict[str, int] = {}
    root_of: dict[str, str] = {}
    order: list[str] = []
    used_roots: list[str] = []
    for root in start_vertices:
        if root in depth:
            continue
        used_roots.append(root)
        depth[root] = 0
        root_of[root] = root
        order.append(root)
        queue = deque([root])
        while queue:
            vertex = queue.popleft()
            for edge, direction in graph.arcs(vertex):
                neighbour = edge.end(direction)
                if neighbour in depth:
                    continue
                parent[neighbour] = (edge, direction)
                depth[neighbour] = depth[vertex] + 1
                root_of[neighbour] = root
                order.append(neighbour)
                queue.append(neighbour)
    return SpanningForest(
        roots=tuple(used_roots),
        order=tuple(order),
        parent=parent,
        depth=depth,
        root_of=root_of,
    )


def odd_cycles_by_component(graph: Digraph, forest: SpanningForest) -> dict[str, Witness | None]:
    """Per component root: an odd closed walk (a loop first, else a fundamental odd cycle) or None."""
    found: dict[str, Witness | None] = {root: None for root in forest.roots}
    for edge in graph.edges:
        root = forest.root_of[edge.tail]
        if found[root] is not None or not edge.is_loop:
            continue
        found[root] = Witness(steps=(Step(vertex=edge.tail, edge=edge.id),))
    for edge in graph.edges:
        root = forest.root_of[edge.tail]
        if found[root] is not None or edge.is_loop:
            continue
        if (forest.depth[edge.tail] - forest.depth[edge.head]) % 2:
            continue
        steps = forest.path(edge.tail, edge.head)
        steps.append(Step(vertex=edge.head, edge=edge.id, direction=Direction.reverse))
        found[root] = Witness(steps=tuple(steps))
    return found


def bipartition(graph: Digraph) -> Bipartition:
    """2-colouring of the underlying multigraph (root of each component in class 0) or the shortest
    per-component odd witness, so any loop in the graph wins."""
    forest = spanning_forest(graph)
    odd = odd_cycles_by_component(graph, forest)
    witnesses = [odd[root] for root in forest.roots if odd[root] is not None]
    if witnesses:
        shortest = min(witnesses, key=lambda witness: witness.length)
        logger.debug("graph is not bipartite (odd walk of length %d)", shortest.length)
        return Bipartition(bipartite=False, odd_cycle=shortest)
    classes = {vertex: forest.depth[vertex] % 2 for vertex in graph.vertices}
    return Bipartition(bipartite=True, classes=classes)


def scc(graph: Digraph) -> SccDecomposition:
    """Strongly connected components by an iterative single-pass Tarjan search."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    found: list[list[str]] = []
    counter = 0

    for start in graph.vertices:
        if start in index:
            continue
        index[start] = lowlink[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        work: list[tuple[str, Iterator[Edge]]] = [(start, iter(graph.out_edges(start)))]
        while work:
            vertex, successors = work[-1]
            descended = False
            for edge in successors:
                successor = edge.head
                if successor not in index:
                    index[successor] = lowlink[successor] = counter
                    counter += 1
                    stack.append(successor)
                    on_stack.add(successor)
                    work.append((successor, iter(graph.out_edges(successor))))
                    descended = True
                    break
                if successor in on_stack:
                    lowlink[vertex] = min(lowlink[vertex], index[successor])
            if descended:
                continue
            work.pop()
            if work:
                caller = work[-1][0]
                lowlink[caller] = min(lowlink[caller], lowlink[vertex])
            if lowlink[vertex] == index[vertex]:
                members: list[str] = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    members.append(member)
                    if member == vertex:
                        break
                found.append(members)

    position = {vertex: number for number, vertex in enumerate(graph.vertices)}
    components = sorted(
        (tuple(sorted(members, key=position.__getitem__)) for members in found),
        key=lambda members: position[members[0]],
    )
    component_of = {vertex: number for number, members in enumerate(components) for vertex in members}
    cross_edges = tuple(
        edge.id for edge in graph.edges if component_of[edge.tail] != component_of[edge.head]
    )
    logger.debug("scc: %d components, %d cross edges", len(components), len(cross_edges))
    return SccDecomposition(
        component_of=component_of,
        components=tuple(components),
        cross_edges=cross_edges,
    )


def induced(graph: Digraph, vertices: Iterable[str]) -> Digraph:
    """Subgraph on `vertices` keeping every edge with both endpoints inside."""
    keep = set(vertices)
    return Digraph(
        vertices=tuple(vertex for vertex in graph.vertices if vertex in keep),
        edges=tuple(edge for edge in graph.edges if edge.tail in keep and edge.head in keep),
    )


def doubled(graph: Digraph) -> Digraph:
    """The digraph (V, 𝔼): every edge e plus an opposite arc `e~`."""
    edges: list[Edge] = []
    for edge in graph.edges:
        twin = f"{edge.id}{REVERSED_SUFFIX}"
        if graph.has_edge(twin):
            raise ParameterError(f"edge id {twin!r} collides with the reversed copy of {edge.id!r}.")
        edges.append(edge)
        edges.append(Edge(id=twin, tail=edge.head, head=edge.tail))
    return Digraph(vertices=graph.vertices, edges=tuple(edges))


def orientations(
    graph: Digraph,
    *,
    caps: Caps | None = None,
    max_edges: int | None = None,
) -> Iterator[Digraph]:
    """All 2^|E| re-orientations, bit j of the counter reversing edge j; ids are preserved."""
    limit = resolve_caps(caps).max_orientation_edges if max_edges is None else max_edges
    if len(graph.edges) > limit:
        raise CapExceededError("max_orientation_edges", limit, len(graph.edges))

    def generate() -> Iterator[Digraph]:
        for mask in range(2 ** len(graph.edges)):
            edges = tuple(
                Edge(id=edge.id, tail=edge.head, head=edge.tail) if mask >> bit & 1 else edge
                for bit, edge in enumerate(graph.edges)
            )
            yield Digraph(vertices=graph.vertices, edges=edges)

    return generate()


def validate_walk(graph: Digraph, witness: Witness, mode: Mode) -> None:
    """Raise `ParameterError` unless the witness is a closed, incident, edge-distinct walk for `mode`."""
    if not witness.steps:
        raise ParameterError("a witness needs at least one step.")
    used: set[tuple[str, Direction] | str] = set()
    for position, step in enumerate(witness.steps):
        if not graph.has_edge(step.edge):
            raise ParameterError(f"step {position}: unknown edge {step.edge!r}.")
        edge = graph.edge(step.edge)
        if mode is Mode.rigid and step.direction is not Direction.forward:
            raise ParameterError(f"step {position}: rigid walks only traverse edges forward.")
        if edge.start(step.direction) != step.vertex:
            raise ParameterError(f"step {position}: edge {edge.id!r} does not leave {step.vertex!r}.")
        following = witness.steps[(position + 1) % len(witness.steps)].vertex
        if edge.end(step.direction) != following:
            raise ParameterError(f"step {position}: edge {edge.id!r} does not reach {following!r}.")
        key: tuple[str, Direction] | str = (edge.id, step.direction) if mode is Mode.flexible else edge.id
        if key in used:
            raise ParameterError(f"step {position}: edge {edge.id!r} repeats.")
        used.add(key)
