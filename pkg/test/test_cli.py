# Test type: CLI integration tests.
# Validation: Runs each command against fixture graphs and checks exit codes, text lines and machine output.
# Command: pytest -q test/test_cli.py

import json

import pytest

from balanced.cli import main
from balanced.schemas import Direction, Family, Step, Witness
from balanced.services import abelian
from balanced.services.labeling import parse_labeling
from balanced.services.oracle import check_by_definition, check_walk


def _invoke(runner, fixture_path, command, graph, *args, labels=None):
    argv = [command, "--graph", str(fixture_path(graph)), *args]
    if labels is not None:
        argv += ["--labels", str(labels)]
    return runner.invoke(main, argv)


def _lines(result):
    return result.output.splitlines()


def test_structure_rigid(runner, fixture_path):
    result = _invoke(runner, fixture_path, "structure", "ex3.g", "--mode", "rigid", "--family", "HR", "--group", "Z/2")
    assert result.exit_code == 0
    lines = _lines(result)
    assert "structure: A^3" in lines
    assert "a_exponent: 3" in lines
    assert "cardinality: 8" in lines
    assert "parameters.evaluated: Z/2 x Z/2 x Z/2" in lines


def test_structure_of_single_vertex_is_trivial(runner, fixture_path):
    result = _invoke(runner, fixture_path, "structure", "single.g", "--family", "HF")
    assert result.exit_code == 0
    assert "structure: 0" in _lines(result)
    assert "cardinality: 1" in _lines(result)


def test_check_unbalanced_loop(runner, fixture_path):
    result = _invoke(
        runner, fixture_path, "check", "loop.g", "--mode", "flexible", "--family", "HF", "--group", "Z/2",
        labels=fixture_path("one.tsv"),
    )
    assert result.exit_code == 1
    lines = _lines(result)
    assert "verdict: unbalanced" in lines
    assert "witness: v e+ v" in lines
    assert "witness_sum: 1" in lines


def test_check_balanced_machine_output(runner, fixture_path):
    result = _invoke(
        runner, fixture_path, "check", "ex3.g", "--family", "HR", "--emit", "machine", labels=fixture_path("ex3-hr.tsv")
    )
    assert result.exit_code == 0
    body = json.loads(result.output)
    assert body["status"] == 0
    assert body["verdict"] == "balanced"
    assert body["mode"] == "rigid"
    assert "witness" not in body


def test_potential_reads_vertex_values(runner, fixture_path):
    result = _invoke(runner, fixture_path, "potential", "ex3.g", "--family", "HF", labels=fixture_path("ex3-hr.tsv"))
    assert result.exit_code == 0
    lines = _lines(result)
    for expected in ("parameters.x: 0", "parameters.v: 1", "parameters.w: 2", "parameters.y: 3"):
        assert expected in lines


def test_potential_of_unbalanced_labeling_exits_one(runner, fixture_path):
    result = _invoke(
        runner, fixture_path, "potential", "loop.g", "--family", "HF", "--group", "Z/2", labels=fixture_path("one.tsv")
    )
    assert result.exit_code == 1
    assert "witness: v e+ v" in _lines(result)


def test_params_rigid_cross_edges(runner, fixture_path, tmp_path):
    labels = tmp_path / "triangle.tsv"
    labels.write_text("a\t5\nb\t-1\nc\t7\n", encoding="utf-8")
    result = _invoke(runner, fixture_path, "params", "triangle.g", "--family", "HR", labels=labels)
    assert result.exit_code == 0
    lines = _lines(result)
    assert "parameters.cross.a: 5" in lines
    assert "parameters.cross.b: -1" in lines
    assert "parameters.cross.c: 7" in lines


def test_complete_bipartite_and_odd(runner, fixture_path, tmp_path):
    twos = tmp_path / "twos.tsv"
    twos.write_text("1\t2\n2\t2\n3\t2\n", encoding="utf-8")
    result = _invoke(runner, fixture_path, "complete", "cycle3.g", "--family", "BF", "--group", "Z/4", labels=twos)
    assert result.exit_code == 0
    assert "verdict: balanceable" in _lines(result)
    assert "labels.a: 2" in _lines(result)

    ones = tmp_path / "ones.tsv"
    ones.write_text("1\t1\n2\t1\n3\t1\n", encoding="utf-8")
    result = _invoke(runner, fixture_path, "complete", "cycle3.g", "--family", "BF", "--group", "Z/4", labels=ones)
    assert result.exit_code == 1
    assert "verdict: not_balanceable" in _lines(result)


def test_split_and_join(runner, fixture_path, tmp_path):
    labels = tmp_path / "wr.tsv"
    labels.write_text("1\t1\n2\t2\n3\t3\na\t0\nb\t1\nc\t2\n", encoding="utf-8")
    result = _invoke(runner, fixture_path, "split", "cycle3.g", "--family", "WR", "--group", "Z/4", labels=labels)
    assert result.exit_code == 0
    lines = _lines(result)
    assert {"labels.1: 1", "labels.a: 1", "labels.b: 3", "labels.c: 1"} <= set(lines)

    split = tmp_path / "split.tsv"
    split.write_text("1\t1\n2\t2\n3\t3\na\t1\nb\t3\nc\t1\n", encoding="utf-8")
    result = _invoke(runner, fixture_path, "join", "cycle3.g", "--family", "WR", "--group", "Z/4", labels=split)
    assert result.exit_code == 0
    assert {"labels.a: 0", "labels.b: 1", "labels.c: 2"} <= set(_lines(result))


def test_count_matches_structure(runner, fixture_path):
    result = _invoke(runner, fixture_path, "count", "triangle.g", "--family", "HF", "--group", "Z/2")
    assert result.exit_code == 0
    lines = _lines(result)
    assert "count: 4" in lines
    assert "expected_count: 4" in lines
    assert "agree: true" in lines


def test_count_cap_is_a_usage_error(runner, fixture_path):
    result = _invoke(
        runner, fixture_path, "count", "ex3.g", "--family", "WF", "--group", "Z/4", "--max-enumeration", "1000"
    )
    assert result.exit_code == 2
    assert any(line.startswith("error: max_enumeration exceeded") for line in _lines(result))


def test_cycles_rigid(runner, fixture_path):
    result = _invoke(runner, fixture_path, "cycles", "cycle3.g", "--mode", "rigid")
    assert result.exit_code == 0
    assert "count: 1" in _lines(result)
    assert "cycle: 1 a+ 2 b+ 3 c+ 1" in _lines(result)


def test_orientations_on_unbalanced_triangle(runner, fixture_path, tmp_path):
    labels = tmp_path / "odd.tsv"
    labels.write_text("a\t1\nb\t0\nc\t0\n", encoding="utf-8")
    result = _invoke(runner, fixture_path, "orientations", "triangle.g", "--group", "Z/2", labels=labels)
    assert result.exit_code == 1
    lines = _lines(result)
    assert "undirected_balanced: false" in lines
    assert "intersection_balanced: false" in lines
    assert "agree: true" in lines


def test_sample_is_seeded(runner, fixture_path):
    args = ("--family", "WR", "--group", "Z/4", "--seed", "3", "--emit", "machine")
    first = _invoke(runner, fixture_path, "sample", "cycle3.g", *args)
    second = _invoke(runner, fixture_path, "sample", "cycle3.g", *args)
    assert first.exit_code == 0
    assert first.output == second.output
    assert set(json.loads(first.output)["labels"]) == {"1", "2", "3", "a", "b", "c"}


@pytest.mark.parametrize(
    "args",
    [
        ("check", "ex3.g", "--mode", "rigid", "--family", "HF"),
        ("check", "ex3.g", "--family", "HF"),
        ("potential", "ex3.g", "--family", "WF"),
        ("structure", "ex3.g", "--family", "HF", "--group", "Q"),
        ("structure", "missing.g", "--family", "HF"),
    ],
)
def test_usage_errors_exit_two(runner, fixture_path, args):
    command, graph, *rest = args
    result = _invoke(runner, fixture_path, command, graph, *rest)
    assert result.exit_code == 2
    assert "status: 2" in _lines(result)
    assert any(line.startswith("error: ") for line in _lines(result))


def _witness_from_tokens(tokens):
    steps = []
    for position in range(0, len(tokens) - 1, 2):
        edge = tokens[position + 1]
        direction = Direction.forward if edge.endswith("+") else Direction.reverse
        steps.append(Step(vertex=tokens[position], edge=edge[:-1], direction=direction))
    return Witness(steps=tuple(steps))


@pytest.mark.parametrize(
    ("family", "group", "labels"),
    [
        ("HF", "Z", "a\t1\nb\t1\nc\t1\n"),
        ("WF", "Z/4", "1\t1\n2\t1\n3\t1\na\t0\nb\t0\nc\t0\n"),
        ("HR", "Z/3", "a\t1\nb\t0\nc\t0\n"),
        ("WR", "Z/4", "1\t1\n2\t0\n3\t0\na\t0\nb\t0\nc\t0\n"),
    ],
)
def test_printed_witness_revalidates(runner, fixture_path, load_graph, tmp_path, family, group, labels):
    path = tmp_path / "labels.tsv"
    path.write_text(labels, encoding="utf-8")
    result = _invoke(
        runner, fixture_path, "check", "cycle3.g", "--family", family, "--group", group, "--emit", "machine", labels=path
    )
    assert result.exit_code == 1
    body = json.loads(result.output)
    graph = load_graph("cycle3.g")
    spec = abelian.parse_group_spec(group)
    labeling = parse_labeling(labels, graph, spec)
    witness = _witness_from_tokens(body["witness"])
    total = check_walk(graph, witness, labeling, Family(family))
    assert abelian.format_element(total) == body["witness_sum"]
    assert not abelian.is_zero(total)
    assert not check_by_definition(graph, labeling, Family(family)).balanced
