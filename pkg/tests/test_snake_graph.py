from collections import Counter
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_matchings, named_snake_graphs
from errors import PreconditionError, StructuralError
from scenarios import generate_polygon
from snake_graph import (
    CrossingSequence,
    PerfectMatching,
    build_snake_graph,
    can_twist,
    count_matchings,
    decompose_matching,
    enumerate_matchings,
    is_boundary_only,
    maximal_matching,
    minimal_matching,
    nu_signature,
    recombine_matching,
    split_snake_graph,
    tau_equivalence,
    to_dot,
    twist,
    twist_graph,
)


def _fib(k):
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


@pytest.fixture(scope="module")
def gamma_graph(example):
    return build_snake_graph(example.triangulation, example.crossing_sequence("gamma"))


def test_gamma_graph_shape(gamma_graph):
    g = gamma_graph
    assert g.d == 7
    assert len(g.edges) == 22
    assert len(g.vertices) == 16
    assert g.diagonals == ("3", "1", "2", "1", "2", "1", "3")
    assert g.glue == (0, 5, 8, 11, 14, 16)
    first = g.tile(1)
    assert first.labels == ("2", "1", "alpha", "beta")
    assert first.edges == (0, 1, 2, 3)


def test_gamma_matching_count(gamma_graph):
    matchings = enumerate_matchings(gamma_graph)
    assert count_matchings(gamma_graph) == 25
    assert len(matchings) == 25
    assert {p.key() for p in matchings} == brute_force_matchings(gamma_graph)
    assert [p.key() for p in matchings] == sorted(p.key() for p in matchings)


def test_enumeration_limit(gamma_graph):
    with pytest.raises(PreconditionError, match="上限"):
        enumerate_matchings(gamma_graph, limit=10)


def test_minimal_and_maximal_matchings(gamma_graph):
    g = gamma_graph
    assert minimal_matching(g).key() == (1, 3, 4, 10, 12, 18, 20, 21)
    assert maximal_matching(g).key() == (2, 6, 7, 9, 13, 15, 17, 19)
    boundary_only = [p for p in enumerate_matchings(g) if is_boundary_only(g, p)]
    assert {p.key() for p in boundary_only} == {minimal_matching(g).key(), maximal_matching(g).key()}


def test_twist_graph_connected_and_involutive(gamma_graph):
    g = gamma_graph
    graph = twist_graph(g)
    assert graph.number_of_nodes() == 25
    assert nx.is_connected(graph)
    for p in graph.nodes:
        for tile in g.tiles:
            if can_twist(g, p, tile.index):
                assert twist(g, twist(g, p, tile.index), tile.index) == p


def test_twist_requires_pair(gamma_graph):
    g = gamma_graph
    p = minimal_matching(g)
    blocked = [tile.index for tile in g.tiles if not can_twist(g, p, tile.index)]
    assert blocked
    with pytest.raises(PreconditionError):
        twist(g, p, blocked[0])


def test_tau_classes(gamma_graph):
    classes = tau_equivalence(gamma_graph, "1")
    assert sorted((c.edges, c.kind) for c in classes) == [((1, 9), "II"), ((7, 15), "I"), ((13, 21), "II")]
    kinds = Counter(c.kind for c in tau_equivalence(gamma_graph, "3"))
    assert kinds == Counter({"III": 2, "IV": 4})


# 各类 τ 等价类的 ν 取值范围
NU_RANGES = {"I": {-1, 0, 1}, "II": {-1, 0}, "III": {-1, 0}, "IV": {0, 1}}


def _assert_nu_partition(g, arcs):
    total = len(enumerate_matchings(g))
    for tau in arcs:
        classes = tau_equivalence(g, tau)
        blocks = Counter(nu_signature(g, tau, p, classes) for p in enumerate_matchings(g))
        assert sum(blocks.values()) == total
        for signature in blocks:
            assert len(signature) == len(classes)
            for value, cls in zip(signature, classes):
                assert value in NU_RANGES[cls.kind]


def _assert_decompose_bijection(g, max_cut=3):
    matchings = enumerate_matchings(g)
    for r in range(1, min(max_cut, len(g.glue)) + 1):
        for cut in combinations(g.glue, r):
            pieces = split_snake_graph(g, list(cut))
            assert sum(piece.d for piece in pieces) == g.d
            images = set()
            for p in matchings:
                parts = decompose_matching(g, list(cut), p)
                for u, left, right in zip(cut, parts, parts[1:]):
                    assert u in left.edges or u in right.edges
                assert recombine_matching(g, list(cut), parts) == p
                images.add(tuple(part.key() for part in parts))
            assert len(images) == len(matchings)


def _assert_distant_twists_commute(g):
    squares = 0
    for p in enumerate_matchings(g):
        for s, u in combinations(range(1, g.d + 1), 2):
            if u - s > 1 and can_twist(g, p, s) and can_twist(g, p, u):
                assert twist(g, twist(g, p, u), s) == twist(g, twist(g, p, s), u)
                squares += 1
    return squares


def test_nu_signatures_partition(gamma_graph):
    _assert_nu_partition(gamma_graph, ("1", "2", "3"))


def test_decompose_recombine_bijection(gamma_graph):
    _assert_decompose_bijection(gamma_graph)


def test_distant_twists_commute(gamma_graph):
    assert _assert_distant_twists_commute(gamma_graph) > 0


def test_polygon_boundary_only_matchings(polygon_shape):
    for _, g in named_snake_graphs(polygon_shape):
        boundary_only = {p.key() for p in enumerate_matchings(g) if is_boundary_only(g, p)}
        assert boundary_only == {minimal_matching(g).key(), maximal_matching(g).key()}


def test_polygon_nu_signatures_partition(polygon_shape):
    for c, g in named_snake_graphs(polygon_shape):
        _assert_nu_partition(g, sorted(set(c.crossings)))


def test_polygon_decompose_recombine_bijection(polygon_shape):
    for _, g in named_snake_graphs(polygon_shape):
        _assert_decompose_bijection(g)


def test_polygon_distant_twists_commute(polygon_shape):
    for _, g in named_snake_graphs(polygon_shape):
        _assert_distant_twists_commute(g)


def test_cut_must_be_glue_edge(gamma_graph):
    with pytest.raises(PreconditionError):
        split_snake_graph(gamma_graph, [1])
    with pytest.raises(PreconditionError):
        split_snake_graph(gamma_graph, [8, 5])


def test_arc_in_triangulation_is_single_edge(example):
    g = build_snake_graph(example.triangulation, example.crossing_sequence("3"))
    assert g.d == 0
    assert enumerate_matchings(g) == [PerfectMatching(frozenset({0}))]
    assert count_matchings(g) == 1


def test_crossing_sequence_errors(example):
    t = example.triangulation
    with pytest.raises(StructuralError, match="start_triangle"):
        build_snake_graph(t, CrossingSequence("x", ("3",)))
    with pytest.raises(StructuralError, match="边界弧"):
        build_snake_graph(t, CrossingSequence("x", ("3", "alpha")))
    with pytest.raises(StructuralError):
        build_snake_graph(t, CrossingSequence("x", ("3", "1"), start_triangle="T0"))


def test_dot_export(gamma_graph):
    p = minimal_matching(gamma_graph)
    text = to_dot(gamma_graph, p)
    assert text.startswith('graph "snake_gamma" {')
    assert text.count('id="e') == 22
    assert text.count("style=bold") == len(p)
    assert text.count("subgraph cluster_tile") == 7
    assert to_dot(gamma_graph) == to_dot(gamma_graph)


@given(st.integers(1, 8))
@settings(max_examples=8, deadline=None)
def test_zigzag_long_diagonal_is_fibonacci(d):
    s = generate_polygon(d + 3, kind="zigzag", depth=0)
    longest = max(s.named_arcs.values(), key=lambda c: c.d)
    assert longest.d == d
    g = build_snake_graph(s.triangulation, longest)
    assert count_matchings(g) == _fib(d + 2)


@given(st.integers(4, 11))
@settings(max_examples=8, deadline=None)
def test_fan_diagonal_crossing_everything(n):
    s = generate_polygon(n, depth=0)
    c = s.named_arcs[f"d1_{n - 1}"]
    assert c.d == n - 3
    assert count_matchings(build_snake_graph(s.triangulation, c)) == n - 2


@given(st.integers(4, 8), st.sampled_from(["fan", "zigzag"]))
@settings(max_examples=12, deadline=None)
def test_enumeration_agrees_with_brute_force(n, kind):
    s = generate_polygon(n, kind=kind, depth=0)
    for c in s.named_arcs.values():
        g = build_snake_graph(s.triangulation, c)
        found = {p.key() for p in enumerate_matchings(g)}
        assert found == brute_force_matchings(g)
        assert count_matchings(g) == len(found)
        assert nx.is_connected(twist_graph(g))
