# Test type: Matrix tests (exact counts, checker/oracle equivalence, orientation sweeps, stress, fuzz).
# Validation: Exhaustive counts match the structure formulas; structured checkers agree with the literal cycle definition.
# Command: pytest -q test/test_acceptance_matrix.py

import random
from collections import Counter
from itertools import product

import pytest

from balanced.schemas import Family, GroupSpec, HrParams, Labeling, WfParams
from balanced.services import abelian
from balanced.services.digraph import bipartition, orientations, parse_graph, scc
from balanced.services.flexible import (
    flexible_structure,
    hf_check,
    hf_from_potential,
    hf_potential_of,
    sample_potential,
    sample_wf_params,
    wf_check,
    wf_from_params,
    wf_params_of,
)
from balanced.services.labeling import add_labelings
from balanced.services.oracle import (
    compile_oracle,
    constraint_sum,
    exhaustive_count,
    multigraph_shapes,
    orientation_intersection_check,
    random_digraph,
)
from balanced.services.rigid import (
    hr_check,
    hr_from_params,
    hr_params_of,
    rigid_structure,
    sample_hr_params,
    wr_check,
    wr_join,
    wr_split,
)

RUN_STRESS = True
RUN_FUZZ = True
GROUPS = ("Z/2", "Z/3", "Z/4", "Z/2 x Z/2")

# name -> (|V|, bipartite, strongly connected components, cross edges)
FIXTURE_FACTS = {
    "triangle.g": (3, False, 3, 3),
    "cycle2.g": (2, True, 1, 0),
    "cycle3.g": (3, False, 1, 0),
    "cycle4.g": (4, True, 1, 0),
    "ex3.g": (4, False, 1, 0),
    "loop.g": (1, False, 1, 0),
    "parallel.g": (2, True, 2, 2),
    "path3.g": (3, True, 3, 2),
    "single.g": (1, True, 1, 0),
}
FLEXIBLE_FIXTURES = ("triangle.g", "cycle3.g", "ex3.g", "path3.g", "loop.g", "parallel.g", "cycle4.g", "cycle2.g")
RIGID_FIXTURES = ("ex3.g", "triangle.g", "cycle2.g", "loop.g", "parallel.g", "path3.g")


def _spec(text: str) -> GroupSpec:
    return abelian.parse_group_spec(text)


def _a2(spec: GroupSpec) -> int:
    return abelian.involution_subgroup(spec).cardinality


def test_fixture_facts_match_structural_algorithms(load_graph):
    for name, (vertices, bipartite, components, cross) in FIXTURE_FACTS.items():
        graph = load_graph(name)
        decomposition = scc(graph)
        assert len(graph.vertices) == vertices
        assert bipartition(graph).bipartite == bipartite
        assert decomposition.component_count == components
        assert decomposition.r == cross


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("name", FLEXIBLE_FIXTURES)
def test_hf_count_is_a_to_the_vertices_minus_one(load_graph, name, group):
    spec = _spec(group)
    vertices = FIXTURE_FACTS[name][0]
    expected = spec.cardinality ** (vertices - 1)
    assert exhaustive_count(load_graph(name), Family.HF, spec) == expected
    assert flexible_structure(load_graph(name), Family.HF).cardinality(spec) == expected


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("name", FLEXIBLE_FIXTURES)
def test_wf_count_depends_on_bipartiteness(load_graph, name, group):
    spec = _spec(group)
    graph = load_graph(name)
    vertices, bipartite = FIXTURE_FACTS[name][:2]
    size = spec.cardinality
    expected = size**vertices if bipartite else _a2(spec) * size ** (vertices - 1)
    assert exhaustive_count(graph, Family.WF, spec) == expected
    assert flexible_structure(graph, Family.WF).cardinality(spec) == expected


def test_wf_counts_named_in_the_matrix(load_graph):
    z4 = _spec("Z/4")
    assert exhaustive_count(load_graph("cycle4.g"), Family.WF, z4) == 256
    assert exhaustive_count(load_graph("cycle3.g"), Family.WF, z4) == 32
    assert exhaustive_count(load_graph("loop.g"), Family.WF, z4) == 2


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("name", FLEXIBLE_FIXTURES)
def test_bf_count_is_a_or_a2(load_graph, name, group):
    spec = _spec(group)
    graph = load_graph(name)
    expected = spec.cardinality if FIXTURE_FACTS[name][1] else _a2(spec)
    assert exhaustive_count(graph, Family.BF, spec) == expected
    assert flexible_structure(graph, Family.BF).cardinality(spec) == expected


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("name", RIGID_FIXTURES)
def test_hr_count(load_graph, name, group):
    spec = _spec(group)
    vertices, _, components, cross = FIXTURE_FACTS[name]
    expected = spec.cardinality ** (vertices - components + cross)
    graph = load_graph(name)
    assert exhaustive_count(graph, Family.HR, spec) == expected
    assert rigid_structure(graph, Family.HR).cardinality(spec) == expected


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("name", RIGID_FIXTURES)
def test_wr_count(load_graph, name, group):
    spec = _spec(group)
    vertices, _, components, cross = FIXTURE_FACTS[name]
    graph = load_graph(name)
    expected = spec.cardinality ** (2 * vertices - components + cross)
    assert exhaustive_count(graph, Family.WR, spec) == expected
    assert rigid_structure(graph, Family.WR).cardinality(spec) == expected


@pytest.mark.parametrize("group", GROUPS)
@pytest.mark.parametrize("name", RIGID_FIXTURES)
def test_br_count_is_a_to_the_vertices(load_graph, name, group):
    spec = _spec(group)
    graph = load_graph(name)
    expected = spec.cardinality ** FIXTURE_FACTS[name][0]
    assert exhaustive_count(graph, Family.BR, spec) == expected
    assert rigid_structure(graph, Family.BR).cardinality(spec) == expected


def _edge_labelings(graph, spec):
    elements = list(abelian.enumerate_elements(spec))
    for values in product(elements, repeat=len(graph.edges)):
        yield Labeling(spec=spec, on_edges={edge.id: value for edge, value in zip(graph.edges, values)})


def _total_labelings(graph, spec):
    elements = list(abelian.enumerate_elements(spec))
    for values in product(elements, repeat=len(graph.vertices) + len(graph.edges)):
        yield Labeling(
            spec=spec,
            on_vertices=dict(zip(graph.vertices, values)),
            on_edges={edge.id: value for edge, value in zip(graph.edges, values[len(graph.vertices) :])},
        )


def test_undirected_balance_is_the_intersection_over_orientations():
    for shape in multigraph_shapes(2):
        for group in ("Z/2", "Z/3"):
            spec = _spec(group)
            for f in _edge_labelings(shape, spec):
                assert orientation_intersection_check(shape, f, family=Family.H).agree
            for h in _total_labelings(shape, spec):
                assert orientation_intersection_check(shape, h, family=Family.W).agree


def _disagreements_by_partial_sums(distinct, undirected, oriented, slot_count, spec):
    rows_u = [distinct.index(item) for item in set(undirected)]
    rows_o = [distinct.index(item) for item in set(oriented)]
    columns = [[dict(item).get(slot, 0) for item in distinct] for slot in range(slot_count)]
    elements = list(abelian.enumerate_elements(spec))
    # labelings of each prefix of the slots, grouped by their partial constraint sums
    states = Counter({(spec.zero,) * len(distinct): 1})
    for column in columns:
        grown = Counter()
        for sums, count in states.items():
            for value in elements:
                key = tuple(
                    abelian.add(total, abelian.multiply(value, coefficient, spec), spec) if coefficient else total
                    for total, coefficient in zip(sums, column)
                )
                grown[key] += count
        states = grown
    seen = wrong = 0
    for sums, count in states.items():
        seen += count
        if all(abelian.is_zero(sums[row]) for row in rows_u) != all(abelian.is_zero(sums[row]) for row in rows_o):
            wrong += count
    return seen, wrong


def _disagreements(undirected, oriented, slot_count, spec):
    """(labelings seen, labelings on which the two constraint lists disagree) over every labeling of the slots."""
    distinct = sorted(set(undirected) | set(oriented))
    if len(distinct) + 2 < slot_count:
        return _disagreements_by_partial_sums(distinct, undirected, oriented, slot_count, spec)
    seen = wrong = 0
    for values in product(list(abelian.enumerate_elements(spec)), repeat=slot_count):
        seen += 1
        balanced_u = all(abelian.is_zero(constraint_sum(item, values, spec)) for item in undirected)
        balanced_o = all(abelian.is_zero(constraint_sum(item, values, spec)) for item in oriented)
        wrong += balanced_u != balanced_o
    return seen, wrong


def _compiled_orientation_agreement(max_edges, groups):
    # slots outside every constraint never change a verdict, so only the constrained ones are enumerated
    for shape in multigraph_shapes(max_edges):
        for undirected_family, oriented_family in ((Family.H, Family.HR), (Family.W, Family.WR)):
            undirected = compile_oracle(shape, undirected_family).constraints
            oriented = sorted({item for graph in orientations(shape) for item in compile_oracle(graph, oriented_family).constraints})
            constrained = sorted({slot for item in (*undirected, *oriented) for slot, _ in item})
            position = {slot: number for number, slot in enumerate(constrained)}
            undirected = [tuple((position[slot], value) for slot, value in item) for item in undirected]
            oriented = [tuple((position[slot], value) for slot, value in item) for item in oriented]
            for group in groups:
                spec = _spec(group)
                seen, wrong = _disagreements(undirected, oriented, len(constrained), spec)
                assert seen == spec.cardinality ** len(constrained)
                assert wrong == 0, (undirected_family, shape, group)


def test_orientation_intersection_by_compiled_constraints():
    _compiled_orientation_agreement(max_edges=3, groups=("Z/2", "Z/3"))


def _agreement_sweep(shapes, groups, rng, limit=None):
    """Structured checkers against the compiled definition; every labeling unless `limit` asks for samples."""
    checkers = ((Family.HF, hf_check), (Family.WF, wf_check), (Family.HR, hr_check), (Family.WR, wr_check))
    for graph in shapes:
        for group in groups:
            spec = _spec(group)
            elements = list(abelian.enumerate_elements(spec))
            for family, checker in checkers:
                compiled = compile_oracle(graph, family)
                slots = compiled.slots
                if limit is None or spec.cardinality ** len(slots) <= limit:
                    draws = product(elements, repeat=len(slots))
                else:
                    draws = (tuple(rng.choice(elements) for _ in slots) for _ in range(limit))
                for values in draws:
                    labeling = Labeling(
                        spec=spec,
                        on_vertices={key: value for (kind, key), value in zip(slots, values) if kind == "v"},
                        on_edges={key: value for (kind, key), value in zip(slots, values) if kind == "e"},
                    )
                    assert checker(graph, labeling).balanced == compiled.holds(values, spec), (family, graph, values)


def _random_shapes(count, seed, max_vertices=4, max_edges=5):
    rng = random.Random(seed)
    return [random_digraph(rng.randint(1, max_vertices), rng.randint(0, max_edges), rng) for _ in range(count)]


def test_random_shapes_stay_within_the_sweep_bounds():
    shapes = _random_shapes(200, 29)
    assert len(shapes) == 200
    assert all(len(shape.vertices) <= 4 and len(shape.edges) <= 5 for shape in shapes)
    assert any(edge.is_loop for shape in shapes for edge in shape.edges)


def test_checkers_agree_with_definition_on_random_shapes():
    _agreement_sweep(_random_shapes(40, 11), ("Z/2", "Z/3"), random.Random(12), limit=256)


def test_checkers_agree_with_definition_on_fixtures(load_graph):
    shapes = [load_graph(name) for name in FIXTURE_FACTS]
    _agreement_sweep(shapes, ("Z/2", "Z/3", "Z/4"), random.Random(13), limit=600)


def test_checkers_agree_with_definition_on_stacked_loops():
    stacked = parse_graph("v v\n" + "".join(f"e l{number} v v\n" for number in range(5)))
    _agreement_sweep([stacked], ("Z/2", "Z/3"), random.Random(14))


@pytest.mark.stress
def test_stress_orientation_agreement_up_to_five_edges():
    if not RUN_STRESS:
        pytest.skip("Enable RUN_STRESS in test_acceptance_matrix.py to run stress tests.")
    _compiled_orientation_agreement(max_edges=5, groups=GROUPS)


@pytest.mark.stress
def test_stress_checker_agreement_on_two_hundred_shapes():
    if not RUN_STRESS:
        pytest.skip("Enable RUN_STRESS in test_acceptance_matrix.py to run stress tests.")
    _agreement_sweep(_random_shapes(200, 29), ("Z/2", "Z/3"), random.Random(30))


@pytest.mark.fuzz
def test_fuzz_hf_round_trip_and_additivity():
    if not RUN_FUZZ:
        pytest.skip("Enable RUN_FUZZ in test_acceptance_matrix.py to run fuzz tests.")
    rng = random.Random(101)
    spec = _spec("Z x Z/6")
    for draw in range(1000):
        graph = random_digraph(rng.randint(1, 5), rng.randint(0, 6), draw)
        first = sample_potential(graph, spec, rng)
        second = sample_potential(graph, spec, rng)
        f = hf_from_potential(graph, first, spec)
        assert hf_potential_of(graph, f) == first
        summed = {vertex: abelian.add(first[vertex], second[vertex], spec) for vertex in graph.vertices}
        assert hf_from_potential(graph, summed, spec) == add_labelings(f, hf_from_potential(graph, second, spec))


@pytest.mark.fuzz
def test_fuzz_wf_round_trip_and_additivity():
    if not RUN_FUZZ:
        pytest.skip("Enable RUN_FUZZ in test_acceptance_matrix.py to run fuzz tests.")
    rng = random.Random(202)
    spec = _spec("Z x Z/4 x Z/2")
    for draw in range(1000):
        graph = random_digraph(rng.randint(1, 5), rng.randint(0, 6), draw)
        first = sample_wf_params(graph, spec, rng)
        second = sample_wf_params(graph, spec, rng)
        h = wf_from_params(graph, first)
        assert wf_check(graph, h).balanced
        assert wf_params_of(graph, h) == first
        summed = WfParams(
            spec=spec,
            amplitudes={root: abelian.add(value, second.amplitudes[root], spec) for root, value in first.amplitudes.items()},
            potential={vertex: abelian.add(value, second.potential[vertex], spec) for vertex, value in first.potential.items()},
        )
        assert wf_from_params(graph, summed) == add_labelings(h, wf_from_params(graph, second))


@pytest.mark.fuzz
def test_fuzz_hr_round_trip_and_additivity():
    if not RUN_FUZZ:
        pytest.skip("Enable RUN_FUZZ in test_acceptance_matrix.py to run fuzz tests.")
    rng = random.Random(303)
    spec = _spec("Z x Z/3")
    for draw in range(1000):
        graph = random_digraph(rng.randint(1, 5), rng.randint(0, 7), draw)
        first = sample_hr_params(graph, spec, rng)
        second = sample_hr_params(graph, spec, rng)
        f = hr_from_params(graph, first)
        assert hr_params_of(graph, f) == first
        summed = HrParams(
            spec=spec,
            potentials={
                root: {vertex: abelian.add(value, second.potentials[root][vertex], spec) for vertex, value in potential.items()}
                for root, potential in first.potentials.items()
            },
            cross_values={key: abelian.add(value, second.cross_values[key], spec) for key, value in first.cross_values.items()},
        )
        assert hr_from_params(graph, summed) == add_labelings(f, hr_from_params(graph, second))


@pytest.mark.fuzz
def test_fuzz_wr_split_join_and_additivity():
    if not RUN_FUZZ:
        pytest.skip("Enable RUN_FUZZ in test_acceptance_matrix.py to run fuzz tests.")
    rng = random.Random(404)
    spec = _spec("Z/5 x Z/2")
    for draw in range(1000):
        graph = random_digraph(rng.randint(1, 5), rng.randint(0, 7), draw)
        gv = Labeling(spec=spec, on_vertices={vertex: abelian.sample_element(spec, rng) for vertex in graph.vertices})
        f = hr_from_params(graph, sample_hr_params(graph, spec, rng))
        h = wr_join(graph, gv, f)
        assert wr_check(graph, h).balanced
        assert wr_split(graph, h) == (gv, f)
        other_gv = Labeling(spec=spec, on_vertices={vertex: abelian.sample_element(spec, rng) for vertex in graph.vertices})
        other_f = hr_from_params(graph, sample_hr_params(graph, spec, rng))
        assert wr_join(graph, add_labelings(gv, other_gv), add_labelings(f, other_f)) == add_labelings(
            h, wr_join(graph, other_gv, other_f)
        )
