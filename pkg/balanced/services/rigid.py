"""Balance with forward-only traversal: HR, BR, WR, parametrized by SCC potentials and cross edges."""

import logging
import random
from collections import deque
from collections.abc import Iterator

from balanced.config import Caps, resolve_caps
from balanced.errors import ParameterError, UnbalancedError
from balanced.schemas import (
    Digraph,
    Edge,
    Family,
    GroupElement,
    GroupSpec,
    HrParams,
    Labeling,
    Mode,
    SccDecomposition,
    Step,
    StructureDescriptor,
    Verdict,
    Witness,
)
from balanced.services import abelian
from balanced.services.digraph import REVERSED_SUFFIX, doubled, induced, scc
from balanced.services.flexible import hf_potential_of
from balanced.services.labeling import require_edges, require_total, require_vertices, restrict, walk_sum

logger = logging.getLogger(__name__)


def _bfs_tree(graph: Digraph, root: str, *, reverse: bool) -> dict[str, Edge]:
    """Shortest directed paths from `root` (or to it when `reverse`), edges scanned by id."""
    via: dict[str, Edge] = {}
    seen = {root}
    queue = deque([root])
    while queue:
        vertex = queue.popleft()
        incident = graph.in_edges(vertex) if reverse else graph.out_edges(vertex)
        for edge in sorted(incident, key=lambda item: item.id):
            neighbour = edge.tail if reverse else edge.head
            if neighbour in seen:
                continue
            seen.add(neighbour)
            via[neighbour] = edge
            queue.append(neighbour)
    return via


def _path_from_root(tree: dict[str, Edge], vertex: str) -> list[Edge]:
    path: list[Edge] = []
    while vertex in tree:
        edge = tree[vertex]
        path.append(edge)
        vertex = edge.tail
    return path[::-1]


def _path_to_root(tree: dict[str, Edge], vertex: str) -> list[Edge]:
    path: list[Edge] = []
    while vertex in tree:
        edge = tree[vertex]
        path.append(edge)
        vertex = edge.head
    return path


def simple_cycles_of_walk(walk: list[Edge]) -> Iterator[list[Edge]]:
    """Split a closed directed walk into vertex-simple cycles, cutting whenever a vertex repeats."""
    if not walk:
        return
    path = [walk[0].tail]
    position = {walk[0].tail: 0}
    pending: list[Edge] = []
    for edge in walk:
        pending.append(edge)
        if edge.head in position:
            cut = position[edge.head]
            yield pending[cut:]
            del pending[cut:]
            for vertex in path[cut + 1 :]:
                del position[vertex]
            del path[cut + 1 :]
        else:
            position[edge.head] = len(path)
            path.append(edge.head)


def _edge_sum(edges: list[Edge], f: Labeling) -> GroupElement:
    return abelian.total([f.on_edges[edge.id] for edge in edges], f.spec)


def _component_witness(component: Digraph, f: Labeling, root: str) -> Witness | None:
    """Check one strongly connected component; a violation yields a simple directed cycle with nonzero sum."""
    spec = f.spec
    out_tree = _bfs_tree(component, root, reverse=False)
    in_tree = _bfs_tree(component, root, reverse=True)
    potential = {root: spec.zero}
    for vertex in component.vertices:
        if vertex != root:
            potential[vertex] = _edge_sum(_path_from_root(out_tree, vertex), f)

    for edge in component.edges:
        reached = abelian.add(potential[edge.tail], f.on_edges[edge.id], spec)
        if reached == potential[edge.head]:
            continue
        back = _path_to_root(in_tree, edge.head)
        through_edge = _path_from_root(out_tree, edge.tail) + [edge] + back
        direct = _path_from_root(out_tree, edge.head) + back
        walk = through_edge if not abelian.is_zero(_edge_sum(through_edge, f)) else direct
        cycle = next(
            cycle for cycle in simple_cycles_of_walk(walk) if not abelian.is_zero(_edge_sum(cycle, f))
        )
        logger.debug("edge %s violates the component potential; directed cycle of length %d", edge.id, len(cycle))
        return Witness(
            steps=tuple(Step(vertex=item.tail, edge=item.id) for item in cycle),
            sum=_edge_sum(cycle, f),
        )
    return None


def hr_check(graph: Digraph, f: Labeling) -> Verdict:
    """Balanced iff every strongly connected component carries a potential; cross edges are free."""
    require_edges(graph, f)
    decomposition = scc(graph)
    for members in decomposition.components:
        witness = _component_witness(induced(graph, members), f, members[0])
        if witness is not None:
            return Verdict(balanced=False, witness=witness)
    return Verdict(balanced=True)


def _require_params_shape(params: HrParams, decomposition: SccDecomposition) -> None:
    expected_roots = {members[0]: members for members in decomposition.components if len(members) > 1}
    if set(params.potentials) != set(expected_roots):
        raise ParameterError(f"potentials must be keyed by the roots {sorted(expected_roots)} of non-trivial components.")
    for root, members in expected_roots.items():
        if set(params.potentials[root]) != set(members):
            raise ParameterError(f"potential of the component rooted at {root!r} must cover exactly {list(members)}.")
    if set(params.cross_values) != set(decomposition.cross_edges):
        raise ParameterError(f"cross_values must cover exactly the cross edges {list(decomposition.cross_edges)}.")


def hr_from_params(graph: Digraph, params: HrParams) -> Labeling:
    """Intra-component edges get potential differences; cross edges take their free value."""
    spec = params.spec
    decomposition = scc(graph)
    _require_params_shape(params, decomposition)
    component_root = {vertex: members[0] for members in decomposition.components for vertex in members}
    on_edges: dict[str, GroupElement] = {}
    for edge in graph.edges:
        if edge.id in params.cross_values:
            on_edges[edge.id] = params.cross_values[edge.id]
            continue
        potential = params.potentials.get(component_root[edge.tail])
        if potential is None:
            # loop on a single-vertex component
            on_edges[edge.id] = spec.zero
        else:
            on_edges[edge.id] = abelian.subtract(potential[edge.head], potential[edge.tail], spec)
    return Labeling(spec=spec, on_edges=on_edges)


def hr_params_of(graph: Digraph, f: Labeling) -> HrParams:
    verdict = hr_check(graph, f)
    if not verdict.balanced:
        raise UnbalancedError("edge labeling is not balanced.", verdict.witness)
    decomposition = scc(graph)
    potentials: dict[str, dict[str, GroupElement]] = {}
    for members in decomposition.components:
        if len(members) == 1:
            continue
        component = induced(graph, members)
        potentials[members[0]] = hf_potential_of(component, restrict(f, component), root=members[0])
    return HrParams(
        spec=f.spec,
        potentials=potentials,
        cross_values={edge_id: f.on_edges[edge_id] for edge_id in decomposition.cross_edges},
    )


def br_balance(graph: Digraph, gv: Labeling) -> Labeling:
    """Every vertex function is balanceable: h(e) = -g(tail) telescopes along directed cycles."""
    require_vertices(graph, gv)
    spec = gv.spec
    return Labeling(
        spec=spec,
        on_vertices=dict(gv.on_vertices),
        on_edges={edge.id: abelian.negate(gv.on_vertices[edge.tail], spec) for edge in graph.edges},
    )


def wr_split(graph: Digraph, h: Labeling) -> tuple[Labeling, Labeling]:
    """h -> (h on vertices, f) with f(e) = h(e) + h(tail(e))."""
    require_total(graph, h)
    spec = h.spec
    gv = Labeling(spec=spec, on_vertices={vertex: h.on_vertices[vertex] for vertex in graph.vertices})
    f = Labeling(
        spec=spec,
        on_edges={
            edge.id: abelian.add(h.on_edges[edge.id], h.on_vertices[edge.tail], spec)
            for edge in graph.edges
        },
    )
    return gv, f


def wr_join(graph: Digraph, gv: Labeling, f: Labeling) -> Labeling:
    """(g, f) -> h with h(v) = g(v), h(e) = f(e) - g(tail(e))."""
    require_vertices(graph, gv)
    require_edges(graph, f)
    if gv.spec != f.spec:
        raise ParameterError("vertex and edge labelings take values in different groups.")
    spec = gv.spec
    return Labeling(
        spec=spec,
        on_vertices={vertex: gv.on_vertices[vertex] for vertex in graph.vertices},
        on_edges={
            edge.id: abelian.subtract(f.on_edges[edge.id], gv.on_vertices[edge.tail], spec)
            for edge in graph.edges
        },
    )


def wr_check(graph: Digraph, h: Labeling) -> Verdict:
    _, f = wr_split(graph, h)
    verdict = hr_check(graph, f)
    if verdict.balanced:
        return verdict
    steps = verdict.witness.steps
    return Verdict(
        balanced=False,
        witness=Witness(steps=steps, sum=walk_sum(steps, h, include_vertices=True, mode=Mode.rigid)),
    )


def rigid_structure(graph: Digraph, family: Family | str) -> StructureDescriptor:
    """HR = A^(|V|-k+r), BR = A^|V|, WR = A^(2|V|-k+r) with k components and r cross edges."""
    family = Family(family)
    decomposition = scc(graph)
    edge_part = len(graph.vertices) - decomposition.component_count + decomposition.r
    if family is Family.HR:
        return StructureDescriptor(a_exponent=edge_part)
    if family is Family.BR:
        return StructureDescriptor(a_exponent=len(graph.vertices))
    if family is Family.WR:
        return StructureDescriptor(a_exponent=len(graph.vertices) + edge_part)
    raise ParameterError(f"family {family.value} is not a rigid family.")


def flexible_as_rigid(graph: Digraph, f: Labeling) -> tuple[Digraph, Labeling]:
    """The flexible problem as a rigid one on (V, 𝔼): arc `e~` carries -f(e)."""
    require_edges(graph, f)
    spec = f.spec
    on_edges: dict[str, GroupElement] = {}
    for edge in graph.edges:
        on_edges[edge.id] = f.on_edges[edge.id]
        on_edges[f"{edge.id}{REVERSED_SUFFIX}"] = abelian.negate(f.on_edges[edge.id], spec)
    return doubled(graph), Labeling(spec=spec, on_edges=on_edges)


def _rng(seed: int | random.Random) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def sample_hr_params(
    graph: Digraph,
    spec: GroupSpec,
    seed: int | random.Random,
    caps: Caps | None = None,
) -> HrParams:
    rng = _rng(seed)
    bound = resolve_caps(caps).sample_bound
    decomposition = scc(graph)
    potentials = {
        members[0]: {
            vertex: spec.zero if vertex == members[0] else abelian.sample_element(spec, rng, bound)
            for vertex in members
        }
        for members in decomposition.components
        if len(members) > 1
    }
    cross_values = {edge_id: abelian.sample_element(spec, rng, bound) for edge_id in decomposition.cross_edges}
    return HrParams(spec=spec, potentials=potentials, cross_values=cross_values)


def sample_hr(graph: Digraph, spec: GroupSpec, seed: int | random.Random, caps: Caps | None = None) -> Labeling:
    return hr_from_params(graph, sample_hr_params(graph, spec, seed, caps))


def sample_wr(graph: Digraph, spec: GroupSpec, seed: int | random.Random, caps: Caps | None = None) -> Labeling:
    rng = _rng(seed)
    bound = resolve_caps(caps).sample_bound
    gv = Labeling(
        spec=spec,
        on_vertices={vertex: abelian.sample_element(spec, rng, bound) for vertex in graph.vertices},
    )
    return wr_join(graph, gv, sample_hr(graph, spec, rng, caps))
