"""Brute-force ground truth: literal cycle enumeration, exhaustive counting, orientation sweeps."""

import logging
import random
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

from balanced.config import Caps, resolve_caps
from balanced.errors import CapExceededError, InfiniteGroupError, ParameterError
from balanced.schemas import (
    CycleSet,
    Digraph,
    Direction,
    Edge,
    Family,
    GroupElement,
    GroupSpec,
    Labeling,
    Mode,
    OrientationReport,
    Step,
    Verdict,
    Witness,
)
from balanced.services import abelian
from balanced.services.digraph import orientations, validate_walk, weak_components
from balanced.services.flexible import bf_balance
from balanced.services.labeling import require_edges, require_vertices, walk_sum
from balanced.services.rigid import br_balance, hr_check, wr_check

logger = logging.getLogger(__name__)

_RawStep = tuple[str, Direction, str]
Constraint = tuple[tuple[int, int], ...]


def _arcs(graph: Digraph, vertex: str, mode: Mode) -> list[tuple[Edge, Direction]]:
    if mode is Mode.rigid:
        return [(edge, Direction.forward) for edge in graph.out_edges(vertex)]
    return graph.arcs(vertex)


def _key(edge: Edge, direction: Direction, mode: Mode) -> object:
    """What a trail may use once: a direction of an edge (flexible) or the edge itself."""
    return (edge.id, direction) if mode is Mode.flexible else edge.id


def _key_ordinals(graph: Digraph, mode: Mode) -> dict[object, int]:
    if mode is Mode.flexible:
        return {
            (edge.id, direction): 2 * number + (direction is Direction.reverse)
            for number, edge in enumerate(graph.edges)
            for direction in Direction
        }
    return {edge.id: number for number, edge in enumerate(graph.edges)}


def _require_cycle_cap(graph: Digraph, caps: Caps | None, max_edges: int | None = None) -> None:
    limit = resolve_caps(caps).max_cycle_edges if max_edges is None else max_edges
    if len(graph.edges) > limit:
        raise CapExceededError("max_cycle_edges", limit, len(graph.edges))


def _witness(raw: Sequence[_RawStep]) -> Witness:
    return Witness(steps=tuple(Step(vertex=vertex, edge=edge_id, direction=direction) for edge_id, direction, vertex in raw))


def enumerate_cycles(
    graph: Digraph,
    mode: Mode | str,
    max_edges: int | None = None,
    *,
    caps: Caps | None = None,
) -> CycleSet:
    """Every edge-distinct closed walk for `mode`, once per rotation class (reversals kept).

    A class is produced only from the rotation that starts with its smallest key, so a trail
    grows only through keys larger than its first one.
    """
    mode = Mode(mode)
    _require_cycle_cap(graph, caps, max_edges)
    ordinal = _key_ordinals(graph, mode)

    found: list[tuple[_RawStep, ...]] = []
    trail: list[_RawStep] = []
    used: set[object] = set()

    def extend(start: str, vertex: str, floor: int) -> None:
        for edge, direction in _arcs(graph, vertex, mode):
            key = _key(edge, direction, mode)
            if key in used or ordinal[key] <= floor:
                continue
            used.add(key)
            trail.append((edge.id, direction, vertex))
            following = edge.end(direction)
            if following == start:
                found.append(tuple(trail))
            extend(start, following, floor)
            trail.pop()
            used.discard(key)

    for start in graph.vertices:
        for edge, direction in _arcs(graph, start, mode):
            key = _key(edge, direction, mode)
            used.add(key)
            trail.append((edge.id, direction, start))
            if edge.end(direction) == start:
                found.append(tuple(trail))
            extend(start, edge.end(direction), ordinal[key])
            trail.pop()
            used.discard(key)

    found.sort(key=lambda raw: tuple((edge_id, direction.value) for edge_id, direction, _ in raw))
    cycles = tuple(_witness(raw) for raw in found)
    logger.debug("enumerated %d %s cycles on %d edges", len(cycles), mode.value, len(graph.edges))
    return CycleSet(mode=mode, cycles=cycles)


def _trail_sets_from(
    graph: Digraph,
    mode: Mode,
    start: str,
    ordinal: dict[object, int],
    position: dict[str, int],
    found: dict[int, tuple[_RawStep, ...]],
) -> None:
    lowest = position[start]
    expanded: set[tuple[str, int]] = set()
    trail: list[_RawStep] = []

    def extend(vertex: str, mask: int) -> None:
        if (vertex, mask) in expanded:
            return
        expanded.add((vertex, mask))
        for edge, direction in _arcs(graph, vertex, mode):
            bit = 1 << ordinal[_key(edge, direction, mode)]
            following = edge.end(direction)
            if mask & bit or position[following] < lowest:
                continue
            trail.append((edge.id, direction, vertex))
            if following == start:
                found.setdefault(mask | bit, tuple(trail))
            extend(following, mask | bit)
            trail.pop()

    extend(start, 0)


def _closed_trail_sets(graph: Digraph, mode: Mode) -> dict[int, tuple[_RawStep, ...]]:
    """One closed trail for every set of keys some closed trail uses, keyed by the set as a bitmask.

    The edge and vertex coefficients of a closed trail depend only on that set, so each
    (vertex, keys used) state is expanded once. A start vertex only reaches vertices listed after it.
    """
    ordinal = _key_ordinals(graph, mode)
    position = {vertex: number for number, vertex in enumerate(graph.vertices)}
    found: dict[int, tuple[_RawStep, ...]] = {}
    for start in graph.vertices:
        _trail_sets_from(graph, mode, start, ordinal, position, found)
    return found


def _slots(graph: Digraph, family: Family) -> list[tuple[str, str]]:
    slots: list[tuple[str, str]] = []
    if family.labels_vertices:
        slots.extend(("v", vertex) for vertex in graph.vertices)
    if family.labels_edges:
        slots.extend(("e", edge.id) for edge in graph.edges)
    return slots


def constraint_sum(constraint: Constraint, values: Sequence[GroupElement], spec: GroupSpec) -> GroupElement:
    """The sum of coefficient * value over one compiled constraint."""
    totals = [0] * spec.rank
    for slot, coefficient in constraint:
        for coordinate, value in enumerate(values[slot]):
            totals[coordinate] += coefficient * value
    return abelian.reduce_element(tuple(totals), spec)


@dataclass(frozen=True)
class DefinitionOracle:
    """Cycle constraints of one graph and family, compiled once for repeated evaluation."""

    family: Family
    slots: tuple[tuple[str, str], ...]
    constraints: tuple[Constraint, ...]
    witnesses: tuple[Witness, ...]

    def violation(self, values: Sequence[GroupElement], spec: GroupSpec) -> tuple[int, GroupElement] | None:
        for number, constraint in enumerate(self.constraints):
            accumulated = constraint_sum(constraint, values, spec)
            if not abelian.is_zero(accumulated):
                return number, accumulated
        return None

    def holds(self, values: Sequence[GroupElement], spec: GroupSpec) -> bool:
        return self.violation(values, spec) is None

    def values_of(self, labeling: Labeling) -> list[GroupElement]:
        return [
            labeling.on_vertices[key] if kind == "v" else labeling.on_edges[key]
            for kind, key in self.slots
        ]


_CHECKABLE = (Family.HF, Family.WF, Family.HR, Family.WR, Family.H, Family.W)


def compile_oracle(graph: Digraph, family: Family | str, *, caps: Caps | None = None) -> DefinitionOracle:
    """One constraint per distinct nonzero coefficient vector of the family's closed trails; cached per graph."""
    family = Family(family)
    if family not in _CHECKABLE:
        raise ParameterError(f"family {family.value} has no cycle-sum definition; count it instead.")
    _require_cycle_cap(graph, caps)
    return _compiled(graph, family)


@lru_cache(maxsize=1024)
def _compiled(graph: Digraph, family: Family) -> DefinitionOracle:
    slots = _slots(graph, family)
    index = {slot: number for number, slot in enumerate(slots)}
    trails = _closed_trail_sets(graph, family.mode)

    constraints: list[Constraint] = []
    witnesses: list[Witness] = []
    seen: set[Constraint] = set()
    for raw in trails.values():
        coefficients: dict[int, int] = {}
        for edge_id, direction, vertex in raw:
            if family.labels_vertices:
                position = index[("v", vertex)]
                coefficients[position] = coefficients.get(position, 0) + 1
            sign = 1 if family.mode is Mode.undirected else direction.sign
            position = index[("e", edge_id)]
            coefficients[position] = coefficients.get(position, 0) + sign
        constraint = tuple(sorted((slot, value) for slot, value in coefficients.items() if value))
        # an all-zero constraint sums to 0 on every labeling
        if not constraint or constraint in seen:
            continue
        seen.add(constraint)
        constraints.append(constraint)
        witnesses.append(_witness(raw))
    logger.debug("%s: %d trail sets, %d distinct constraints", family.value, len(trails), len(constraints))
    return DefinitionOracle(
        family=family,
        slots=tuple(slots),
        constraints=tuple(constraints),
        witnesses=tuple(witnesses),
    )


def _require_labels(graph: Digraph, labeling: Labeling, family: Family) -> None:
    if family.labels_vertices:
        require_vertices(graph, labeling)
    if family.labels_edges:
        require_edges(graph, labeling)


def check_by_definition(
    graph: Digraph,
    labeling: Labeling,
    family: Family | str,
    *,
    caps: Caps | None = None,
) -> Verdict:
    """Balanced iff the labeling sums to zero along every closed trail of the family's kind."""
    family = Family(family)
    oracle = compile_oracle(graph, family, caps=caps)
    _require_labels(graph, labeling, family)
    violation = oracle.violation(oracle.values_of(labeling), labeling.spec)
    if violation is None:
        return Verdict(balanced=True)
    number, value = violation
    return Verdict(balanced=False, witness=oracle.witnesses[number].model_copy(update={"sum": value}))


def check_walk(graph: Digraph, witness: Witness, labeling: Labeling, family: Family | str) -> GroupElement:
    """Validate a witness as a walk of the family's kind and return its labeling sum."""
    family = Family(family)
    validate_walk(graph, witness, family.mode)
    return walk_sum(witness.steps, labeling, include_vertices=family.labels_vertices, mode=family.mode)


def _require_budget(spec: GroupSpec, labels: int, caps: Caps | None) -> int:
    size = spec.cardinality
    if size is None:
        raise InfiniteGroupError(f"{spec} is infinite; exhaustive counts need a finite group.")
    limit = resolve_caps(caps).max_enumeration
    requested = size**labels
    if requested > limit:
        raise CapExceededError("max_enumeration", limit, requested)
    return requested


def _balancer(graph: Digraph, gv: Labeling, family: Family) -> Labeling | None:
    """gv completed to a whole-graph labeling by the structured balancer, or None when refused."""
    if family is Family.BR:
        return br_balance(graph, gv)
    report = bf_balance(graph, gv)
    if not report.balanceable:
        return None
    return Labeling(spec=gv.spec, on_vertices=dict(gv.on_vertices), on_edges=dict(report.balancer.on_edges))


def exhaustive_count(
    graph: Digraph,
    family: Family | str,
    spec: GroupSpec,
    *,
    caps: Caps | None = None,
) -> int:
    """Count the labelings of the family over a finite group by testing every one against the definition.

    BF / BR count the vertex functions whose `bf_balance` / `br_balance` completion passes the
    WF / WR definition.
    """
    family = Family(family)
    if family in (Family.BF, Family.BR):
        whole = compile_oracle(graph, Family.WF if family is Family.BF else Family.WR, caps=caps)
        requested = _require_budget(spec, len(graph.vertices), caps)
        elements = list(abelian.enumerate_elements(spec))
        count = 0
        for vertex_values in product(elements, repeat=len(graph.vertices)):
            gv = Labeling(spec=spec, on_vertices=dict(zip(graph.vertices, vertex_values)))
            completed = _balancer(graph, gv, family)
            if completed is None:
                continue
            if whole.holds(whole.values_of(completed), spec):
                count += 1
            else:
                logger.warning("%s balancer for %s fails the cycle definition", family.value, vertex_values)
        logger.info("%s count over %s: %d of %d vertex functions", family.value, spec, count, requested)
        return count

    oracle = compile_oracle(graph, family, caps=caps)
    requested = _require_budget(spec, len(oracle.slots), caps)
    elements = list(abelian.enumerate_elements(spec))
    count = sum(1 for values in product(elements, repeat=len(oracle.slots)) if oracle.holds(values, spec))
    logger.info("%s count over %s: %d of %d labelings", family.value, spec, count, requested)
    return count


def definitional_balanceable_count(
    graph: Digraph,
    family: Family | str,
    spec: GroupSpec,
    *,
    caps: Caps | None = None,
) -> int:
    """Vertex functions for which some edge labeling satisfies the WF (BF) or WR (BR) definition."""
    family = Family(family)
    if family not in (Family.BF, Family.BR):
        raise ParameterError("balanceable counts are defined for BF and BR.")
    oracle = compile_oracle(graph, Family.WF if family is Family.BF else Family.WR, caps=caps)
    _require_budget(spec, len(graph.vertices) + len(graph.edges), caps)
    elements = list(abelian.enumerate_elements(spec))
    edge_choices = list(product(elements, repeat=len(graph.edges)))
    return sum(
        1
        for vertex_values in product(elements, repeat=len(graph.vertices))
        if any(oracle.holds(vertex_values + edge_values, spec) for edge_values in edge_choices)
    )


def orientation_intersection_check(
    graph: Digraph,
    labeling: Labeling,
    *,
    family: Family | str = Family.H,
    caps: Caps | None = None,
) -> OrientationReport:
    """Compare undirected balance with balance under every orientation (HR for H, WR for W)."""
    family = Family(family)
    if family not in (Family.H, Family.W):
        raise ParameterError("orientation sweeps compare the undirected families H and W.")
    if len(weak_components(graph)) > 1:
        raise ParameterError("orientation sweeps need a connected graph.")
    undirected = check_by_definition(graph, labeling, family, caps=caps).balanced
    checker = hr_check if family is Family.H else wr_check

    checked = 0
    failing: int | None = None
    for number, oriented in enumerate(orientations(graph, caps=caps)):
        checked += 1
        if not checker(oriented, labeling).balanced:
            failing = number
            break
    return OrientationReport(
        undirected_balanced=undirected,
        intersection_balanced=failing is None,
        orientations_checked=checked,
        failing_orientation=failing,
    )


def reachability_matrix(graph: Digraph) -> list[list[bool]]:
    """Reflexive-transitive closure of the edge relation (Floyd-Warshall on booleans)."""
    position = {vertex: number for number, vertex in enumerate(graph.vertices)}
    size = len(graph.vertices)
    reach = [[row == column for column in range(size)] for row in range(size)]
    for edge in graph.edges:
        reach[position[edge.tail]][position[edge.head]] = True
    for middle in range(size):
        for row in range(size):
            if reach[row][middle]:
                for column in range(size):
                    if reach[middle][column]:
                        reach[row][column] = True
    return reach


def brute_force_scc(graph: Digraph) -> list[tuple[str, ...]]:
    """Mutual-reachability classes in vertex order, ordered by first vertex."""
    reach = reachability_matrix(graph)
    classes: list[tuple[str, ...]] = []
    assigned: set[int] = set()
    for row in range(len(graph.vertices)):
        if row in assigned:
            continue
        members = [column for column in range(len(graph.vertices)) if reach[row][column] and reach[column][row]]
        assigned.update(members)
        classes.append(tuple(graph.vertices[column] for column in members))
    return classes


def brute_force_two_coloring(graph: Digraph) -> dict[str, int] | None:
    """First proper 2-colouring found by trying all 2^|V| assignments, or None."""
    for colours in product((0, 1), repeat=len(graph.vertices)):
        colouring = dict(zip(graph.vertices, colours))
        if all(colouring[edge.tail] != colouring[edge.head] for edge in graph.edges):
            return colouring
    return None


def _canonical_shape(vertex_count: int, pairs: Sequence[tuple[int, int]]) -> tuple[int, tuple[tuple[int, int], ...]]:
    best: tuple[tuple[int, int], ...] | None = None
    for perm in permutations(range(vertex_count)):
        relabelled = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in pairs))
        if best is None or relabelled < best:
            best = relabelled
    return vertex_count, best or ()


def _shape_graph(vertex_count: int, pairs: Sequence[tuple[int, int]]) -> Digraph:
    names = [chr(ord("a") + number) for number in range(vertex_count)]
    return Digraph(
        vertices=tuple(names),
        edges=tuple(
            Edge(id=f"e{number}", tail=names[a], head=names[b]) for number, (a, b) in enumerate(pairs, start=1)
        ),
    )


def multigraph_shapes(max_edges: int) -> list[Digraph]:
    """Connected undirected multigraphs (loops and parallel edges allowed) with at most `max_edges` edges, one per isomorphism class."""
    layer = {_canonical_shape(1, ())}
    shapes = sorted(layer)
    for _ in range(max_edges):
        grown: set[tuple[int, tuple[tuple[int, int], ...]]] = set()
        for vertex_count, pairs in layer:
            for a in range(vertex_count):
                for b in range(a, vertex_count + 1):
                    count = max(vertex_count, b + 1)
                    grown.add(_canonical_shape(count, (*pairs, (a, b))))
        layer = grown
        shapes.extend(sorted(layer))
    return [_shape_graph(vertex_count, pairs) for vertex_count, pairs in shapes]


def random_digraph(vertex_count: int, edge_count: int, seed: int | random.Random) -> Digraph:
    """Uniform random multigraph on v0..v{n-1}; loops and parallel edges allowed."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    vertices = tuple(f"v{number}" for number in range(vertex_count))
    edges = tuple(
        Edge(id=f"e{number}", tail=rng.choice(vertices), head=rng.choice(vertices)) for number in range(edge_count)
    )
    return Digraph(vertices=vertices, edges=edges)
