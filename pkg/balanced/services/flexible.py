"""Balance with edges walkable both ways (reverse traversal negates): HF, BF and WF."""

import logging
import random

from balanced.config import Caps, resolve_caps
from balanced.errors import ParameterError, UnbalancedError
from balanced.schemas import (
    BalanceReport,
    Digraph,
    Direction,
    Family,
    GroupElement,
    GroupSpec,
    Labeling,
    StructureDescriptor,
    Step,
    Verdict,
    WfParams,
    Witness,
)
from balanced.services import abelian
from balanced.services.digraph import SpanningForest, flip, odd_cycles_by_component, spanning_forest
from balanced.services.labeling import (
    edge_value,
    require_edges,
    require_total,
    require_vertices,
    vertex_part,
    walk_sum,
)

logger = logging.getLogger(__name__)


def _propagate(graph: Digraph, labeling: Labeling, forest: SpanningForest) -> dict[str, GroupElement]:
    """Potential along the spanning forest: zero on roots, +f(e) along e, -f(e) against it."""
    spec = labeling.spec
    potential: dict[str, GroupElement] = {}
    for vertex in forest.order:
        if vertex in forest.roots:
            potential[vertex] = spec.zero
            continue
        edge, direction = forest.parent[vertex]
        previous = potential[edge.start(direction)]
        potential[vertex] = abelian.add(previous, edge_value(labeling, edge.id, direction), spec)
    return potential


def _fundamental_cycle(forest: SpanningForest, edge_id: str, tail: str, head: str) -> list[Step]:
    """Tree path tail -> head closed by walking the edge back against its direction; a loop alone."""
    if tail == head:
        return [Step(vertex=tail, edge=edge_id)]
    steps = forest.path(tail, head)
    steps.append(Step(vertex=head, edge=edge_id, direction=Direction.reverse))
    return steps


def _there_and_back(witness: Witness) -> list[Step]:
    """The walk followed by its reversal; every edge is used once in each direction."""
    steps = list(witness.steps)
    back: list[Step] = []
    for position in range(len(steps) - 1, -1, -1):
        step = steps[position]
        arrival = steps[(position + 1) % len(steps)].vertex
        back.append(Step(vertex=arrival, edge=step.edge, direction=flip(step.direction)))
    return steps + back


def _two_cycle(tail: str, head: str, edge_id: str) -> list[Step]:
    return [
        Step(vertex=tail, edge=edge_id),
        Step(vertex=head, edge=edge_id, direction=Direction.reverse),
    ]


def _check_with_forest(graph: Digraph, f: Labeling, forest: SpanningForest) -> Verdict:
    potential = _propagate(graph, f, forest)
    spec = f.spec
    for edge in graph.edges:
        if forest.is_tree_edge(edge):
            continue
        expected = abelian.subtract(potential[edge.head], potential[edge.tail], spec)
        if f.on_edges[edge.id] == expected:
            continue
        steps = _fundamental_cycle(forest, edge.id, edge.tail, edge.head)
        witness = Witness(steps=tuple(steps), sum=walk_sum(steps, f, include_vertices=False))
        logger.debug("edge %s violates the potential; fundamental cycle of length %d", edge.id, len(steps))
        return Verdict(balanced=False, witness=witness)
    return Verdict(balanced=True)


def hf_check(graph: Digraph, f: Labeling) -> Verdict:
    """Balanced iff f is the coboundary of a vertex potential on every weak component."""
    require_edges(graph, f)
    return _check_with_forest(graph, f, spanning_forest(graph))


def hf_from_potential(graph: Digraph, potential: dict[str, GroupElement], spec: GroupSpec) -> Labeling:
    missing = [vertex for vertex in graph.vertices if vertex not in potential]
    if missing:
        raise ParameterError(f"potential is missing vertices: {', '.join(missing)}.")
    return Labeling(
        spec=spec,
        on_edges={
            edge.id: abelian.subtract(potential[edge.head], potential[edge.tail], spec)
            for edge in graph.edges
        },
    )


def hf_potential_of(graph: Digraph, f: Labeling, root: str | None = None) -> dict[str, GroupElement]:
    """The unique potential vanishing on `root` (and on the first vertex of every other component)."""
    require_edges(graph, f)
    roots: list[str] = []
    if root is not None:
        if root not in graph.vertices:
            raise ParameterError(f"root {root!r} is not a vertex of the graph.")
        roots.append(root)
    forest = spanning_forest(graph, roots + list(graph.vertices))
    verdict = _check_with_forest(graph, f, forest)
    if not verdict.balanced:
        raise UnbalancedError("edge labeling is not balanced.", verdict.witness)
    return _propagate(graph, f, forest)


def _component_is_bipartite(graph: Digraph, forest: SpanningForest) -> dict[str, bool]:
    return {root: witness is None for root, witness in odd_cycles_by_component(graph, forest).items()}


def _residual(graph: Digraph, h: Labeling, forest: SpanningForest, bipartite: dict[str, bool]) -> Labeling:
    """h on edges, shifted by -a on components that are not bipartite."""
    spec = h.spec
    on_edges: dict[str, GroupElement] = {}
    for edge in graph.edges:
        root = forest.root_of[edge.tail]
        value = h.on_edges[edge.id]
        if not bipartite[root]:
            value = abelian.subtract(value, h.on_vertices[root], spec)
        on_edges[edge.id] = value
    return Labeling(spec=spec, on_edges=on_edges)


def wf_check(graph: Digraph, h: Labeling) -> Verdict:
    """Opposite values across edges, a + a = 0 off bipartite components, then a balanced residual."""
    require_total(graph, h)
    spec = h.spec
    forest = spanning_forest(graph)
    odd = odd_cycles_by_component(graph, forest)

    for edge in graph.edges:
        if edge.is_loop:
            continue
        if abelian.is_zero(abelian.add(h.on_vertices[edge.tail], h.on_vertices[edge.head], spec)):
            continue
        steps = _two_cycle(edge.tail, edge.head, edge.id)
        return Verdict(balanced=False, witness=Witness(steps=tuple(steps), sum=walk_sum(steps, h, include_vertices=True)))

    for root in forest.roots:
        witness = odd[root]
        if witness is None or abelian.is_involution(h.on_vertices[root], spec):
            continue
        steps = _there_and_back(witness)
        return Verdict(balanced=False, witness=Witness(steps=tuple(steps), sum=walk_sum(steps, h, include_vertices=True)))

    bipartite = {root: witness is None for root, witness in odd.items()}
    verdict = _check_with_forest(graph, _residual(graph, h, forest, bipartite), forest)
    if verdict.balanced:
        return verdict
    steps = verdict.witness.steps
    return Verdict(balanced=False, witness=Witness(steps=steps, sum=walk_sum(steps, h, include_vertices=True)))


def wf_from_params(graph: Digraph, params: WfParams) -> Labeling:
    """h(v) = +-a by class (bipartite) or a (otherwise); h(e) = t(head) - t(tail), plus a off bipartite components."""
    spec = params.spec
    forest = spanning_forest(graph)
    if set(params.amplitudes) != set(forest.roots):
        raise ParameterError(f"amplitudes must be keyed by the component roots {list(forest.roots)}.")
    missing = [vertex for vertex in graph.vertices if vertex not in params.potential]
    if missing:
        raise ParameterError(f"potential is missing vertices: {', '.join(missing)}.")
    bipartite = _component_is_bipartite(graph, forest)

    on_vertices: dict[str, GroupElement] = {}
    for vertex in graph.vertices:
        root = forest.root_of[vertex]
        a = params.amplitudes[root]
        if bipartite[root]:
            on_vertices[vertex] = a if forest.depth[vertex] % 2 == 0 else abelian.negate(a, spec)
        elif abelian.is_involution(a, spec):
            on_vertices[vertex] = a
        else:
            raise ParameterError(f"amplitude {a} of the non-bipartite component of {root!r} has a + a != 0.")

    on_edges: dict[str, GroupElement] = {}
    for edge in graph.edges:
        value = abelian.subtract(params.potential[edge.head], params.potential[edge.tail], spec)
        root = forest.root_of[edge.tail]
        if not bipartite[root]:
            value = abelian.add(value, params.amplitudes[root], spec)
        on_edges[edge.id] = value
    return Labeling(spec=spec, on_vertices=on_vertices, on_edges=on_edges)


def wf_params_of(graph: Digraph, h: Labeling) -> WfParams:
    verdict = wf_check(graph, h)
    if not verdict.balanced:
        raise UnbalancedError("labeling is not balanced.", verdict.witness)
    forest = spanning_forest(graph)
    bipartite = _component_is_bipartite(graph, forest)
    residual = _residual(graph, h, forest, bipartite)
    return WfParams(
        spec=h.spec,
        amplitudes={root: h.on_vertices[root] for root in forest.roots},
        potential=_propagate(graph, residual, forest),
    )


def bf_balance(graph: Digraph, gv: Labeling) -> BalanceReport:
    """Decide whether a vertex function is balanceable; on success return f = 0 or f = a per component."""
    require_vertices(graph, gv)
    spec = gv.spec
    forest = spanning_forest(graph)
    odd = odd_cycles_by_component(graph, forest)

    for edge in graph.edges:
        if edge.is_loop:
            continue
        if abelian.is_zero(abelian.add(gv.on_vertices[edge.tail], gv.on_vertices[edge.head], spec)):
            continue
        steps = _two_cycle(edge.tail, edge.head, edge.id)
        return BalanceReport(
            balanceable=False,
            reason="adjacent vertices must carry opposite values",
            pair=(edge.tail, edge.head),
            witness=Witness(
                steps=tuple(steps),
                sum=abelian.add(gv.on_vertices[edge.tail], gv.on_vertices[edge.head], spec),
            ),
        )

    for root in forest.roots:
        witness = odd[root]
        if witness is None or abelian.is_involution(gv.on_vertices[root], spec):
            continue
        steps = _there_and_back(witness)
        doubled = abelian.total([gv.on_vertices[step.vertex] for step in steps], spec)
        return BalanceReport(
            balanceable=False,
            reason="an odd cycle forces a + a = 0",
            witness=Witness(steps=tuple(steps), sum=doubled),
        )

    on_edges = {}
    for edge in graph.edges:
        root = forest.root_of[edge.tail]
        on_edges[edge.id] = spec.zero if odd[root] is None else gv.on_vertices[root]
    return BalanceReport(balanceable=True, balancer=Labeling(spec=spec, on_edges=on_edges))


def wf_to_bf(h: Labeling) -> Labeling:
    """Forget the edge values; the quotient map onto the balanceable vertex functions."""
    return vertex_part(h)


def hf_embed(graph: Digraph, f: Labeling) -> Labeling:
    """View an edge labeling as a whole-graph labeling that vanishes on vertices."""
    require_edges(graph, f)
    return Labeling(
        spec=f.spec,
        on_vertices={vertex: f.spec.zero for vertex in graph.vertices},
        on_edges=dict(f.on_edges),
    )


def flexible_structure(graph: Digraph, family: Family | str) -> StructureDescriptor:
    """HF = A^(|V|-1); WF = A^|V| or A_2 x A^(|V|-1); BF = A or A_2; summed over weak components."""
    family = Family(family)
    if family not in (Family.HF, Family.BF, Family.WF):
        raise ParameterError(f"family {family.value} is not a flexible family.")
    forest = spanning_forest(graph)
    bipartite = _component_is_bipartite(graph, forest)
    sizes = {root: 0 for root in forest.roots}
    for vertex in graph.vertices:
        sizes[forest.root_of[vertex]] += 1

    descriptor = StructureDescriptor()
    for root, size in sizes.items():
        if family is Family.HF:
            part = StructureDescriptor(a_exponent=size - 1)
        elif family is Family.WF:
            part = StructureDescriptor(a_exponent=size) if bipartite[root] else StructureDescriptor(a_exponent=size - 1, a2_exponent=1)
        else:
            part = StructureDescriptor(a_exponent=1) if bipartite[root] else StructureDescriptor(a2_exponent=1)
        descriptor = descriptor + part
    return descriptor


def _rng(seed: int | random.Random) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def sample_potential(
    graph: Digraph,
    spec: GroupSpec,
    seed: int | random.Random,
    caps: Caps | None = None,
) -> dict[str, GroupElement]:
    """Random potential vanishing on the first vertex of every weak component."""
    rng = _rng(seed)
    bound = resolve_caps(caps).sample_bound
    roots = set(spanning_forest(graph).roots)
    return {
        vertex: spec.zero if vertex in roots else abelian.sample_element(spec, rng, bound)
        for vertex in graph.vertices
    }


def sample_wf_params(
    graph: Digraph,
    spec: GroupSpec,
    seed: int | random.Random,
    caps: Caps | None = None,
) -> WfParams:
    rng = _rng(seed)
    bound = resolve_caps(caps).sample_bound
    forest = spanning_forest(graph)
    bipartite = _component_is_bipartite(graph, forest)
    involutions = abelian.involution_elements(abelian.involution_subgroup(spec), spec)
    amplitudes = {
        root: abelian.sample_element(spec, rng, bound) if bipartite[root] else rng.choice(involutions)
        for root in forest.roots
    }
    return WfParams(spec=spec, amplitudes=amplitudes, potential=sample_potential(graph, spec, rng, caps))


def sample_hf(graph: Digraph, spec: GroupSpec, seed: int | random.Random, caps: Caps | None = None) -> Labeling:
    return hf_from_potential(graph, sample_potential(graph, spec, seed, caps), spec)


def sample_wf(graph: Digraph, spec: GroupSpec, seed: int | random.Random, caps: Caps | None = None) -> Labeling:
    return wf_from_params(graph, sample_wf_params(graph, spec, seed, caps))
