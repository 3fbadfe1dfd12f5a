import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import named_snake_graphs
from errors import PreconditionError
from expansion import (
    commutative_expansion,
    expand_arc,
    height_vector,
    height_vector_by_twists,
    heights_by_twists,
    matching_statistics,
    omega,
    quantum_expansion,
    valuation_from,
)
from quantum_torus import monomial, specialize_q1
from scenarios import generate_polygon
from snake_graph import can_twist, enumerate_matchings, maximal_matching, minimal_matching, twist
from verification import check_positivity_and_bar


@pytest.fixture(scope="module")
def gamma(example):
    return expand_arc(example.triangulation, example.crossing_sequence("gamma"), example.seed)


def test_gamma_quantum_expansion(example, gamma, gamma_expected):
    assert len(gamma.matchings) == 25
    assert gamma.quantum() == gamma_expected
    assert quantum_expansion(example.triangulation, example.crossing_sequence("gamma"), example.seed) == gamma_expected


def test_gamma_text_is_canonical(gamma, gamma_expected):
    text = gamma.quantum().render()
    assert text == gamma_expected.render()
    assert "(q^{-3/2} + q^{-1/2} + q^{1/2} + q^{3/2}) x^{(-2,1,0,1,0,1)}" in text
    assert "(q^{-4/2} + 1 + q^{4/2}) x^{(-3,0,2,2,0,2)}" in text
    assert text.startswith("x^{(-3,-2,4,3,0,2)}")


def test_gamma_commutative_expansion(example, gamma, gamma_expected):
    expected = specialize_q1(gamma_expected)
    assert gamma.commutative() == expected
    assert commutative_expansion(example.triangulation, example.crossing_sequence("gamma"), example.seed) == expected


def test_extreme_matchings(gamma):
    g = gamma.graph
    low, high = minimal_matching(g), maximal_matching(g)
    assert gamma.exponents[low] == (-1, 2, -2, 0, 0, 0)
    assert gamma.exponents[high] == (1, -2, 0, 3, 2, 2)
    assert gamma.valuation[low] == 0
    assert gamma.valuation[high] == 0
    assert gamma.heights[low] == (0, 0, 0)
    assert gamma.heights[high] == (3, 2, 2)
    assert gamma.shift == (0, 0, 0)


def test_heights_agree_with_twist_integration(example, gamma):
    t = example.triangulation
    by_twists = heights_by_twists(t, gamma.graph)
    for p in gamma.matchings:
        assert height_vector(t, gamma.graph, p) == by_twists[p]
    assert height_vector_by_twists(t, gamma.graph, gamma.matchings[0]) == gamma.heights[gamma.matchings[0]]


def test_omega_changes_sign_under_twist(example, gamma):
    t, c, g = example.triangulation, example.crossing_sequence("gamma"), gamma.graph
    for p in gamma.matchings:
        for tile in g.tiles:
            if can_twist(g, p, tile.index):
                q = twist(g, p, tile.index)
                assert omega(t, c, g, q, tile.index, example.seed) == -omega(t, c, g, p, tile.index, example.seed)


def test_omega_needs_twistable_tile(example, gamma):
    t, c, g = example.triangulation, example.crossing_sequence("gamma"), gamma.graph
    p = minimal_matching(g)
    blocked = next(tile.index for tile in g.tiles if not can_twist(g, p, tile.index))
    with pytest.raises(PreconditionError):
        omega(t, c, g, p, blocked, example.seed)


def test_minimal_and_maximal_valuations_agree(example, gamma):
    t, c, g = example.triangulation, example.crossing_sequence("gamma"), gamma.graph
    lower = valuation_from(t, c, g, example.seed, "minus")
    upper = valuation_from(t, c, g, example.seed, "plus")
    assert lower == upper
    with pytest.raises(PreconditionError):
        valuation_from(t, c, g, example.seed, "middle")


def test_matching_statistics(example, gamma):
    t, c, g = example.triangulation, example.crossing_sequence("gamma"), gamma.graph
    for p in gamma.matchings:
        stats = matching_statistics(t, c, g, p, example.seed.btilde, gamma.shift)
        mutable = tuple(w - x for w, x in zip(stats.weight, stats.crossing))
        assert stats.exponent[:3] == mutable
        assert stats.exponent == gamma.exponents[p]
        assert stats.crossing == (3, 2, 2)


def test_arc_of_triangulation_is_its_variable(example):
    for row, arc in enumerate(example.triangulation.mutable_arcs):
        unit = [0] * 6
        unit[row] = 1
        x = quantum_expansion(example.triangulation, example.crossing_sequence(arc), example.seed)
        assert x == monomial(unit)


def test_every_example_arc_is_positive_and_bar_invariant(example):
    for name, c in example.named_arcs.items():
        x = quantum_expansion(example.triangulation, c, example.seed)
        assert check_positivity_and_bar(x, name, example.name).passed
        assert specialize_q1(x) == commutative_expansion(example.triangulation, c, example.seed)


def test_flipped_arc_three(example):
    x = quantum_expansion(example.triangulation, example.crossing_sequence("3p"), example.seed)
    assert x == monomial((0, 1, -1, 0, 0, 1)) + monomial((1, 0, -1, 0, 0, 0))


@given(st.integers(4, 8), st.sampled_from(["fan", "zigzag"]))
@settings(max_examples=10, deadline=None)
def test_polygon_expansions_are_coherent(n, kind):
    s = generate_polygon(n, kind=kind, depth=0)
    for c in s.named_arcs.values():
        result = expand_arc(s.triangulation, c, s.seed)
        x = result.quantum()
        assert specialize_q1(x) == result.commutative()
        assert check_positivity_and_bar(x).passed
        assert result.valuation[minimal_matching(result.graph)] == 0
        assert result.valuation[maximal_matching(result.graph)] == 0


def _assert_omega_commutes(s, c, g):
    """相距大于 1 的两块瓦片先后扭转，Ω 之和与顺序无关"""
    t, seed = s.triangulation, s.seed
    squares = 0
    for p in enumerate_matchings(g):
        for a in range(1, g.d + 1):
            for b in range(a + 2, g.d + 1):
                if not (can_twist(g, p, a) and can_twist(g, p, b)):
                    continue
                via_a = omega(t, c, g, p, a, seed) + omega(t, c, g, twist(g, p, a), b, seed)
                via_b = omega(t, c, g, p, b, seed) + omega(t, c, g, twist(g, p, b), a, seed)
                assert via_a == via_b
                squares += 1
    return squares


def test_gamma_omega_commutes_for_distant_tiles(example):
    total = 0
    for c, g in named_snake_graphs(example):
        total += _assert_omega_commutes(example, c, g)
    assert total > 0


def test_polygon_omega_commutes_for_distant_tiles(polygon_shape):
    for c, g in named_snake_graphs(polygon_shape):
        _assert_omega_commutes(polygon_shape, c, g)


def test_polygon_heights_agree_with_twist_integration(polygon_shape):
    t = polygon_shape.triangulation
    for _, g in named_snake_graphs(polygon_shape):
        by_twists = heights_by_twists(t, g)
        matchings = enumerate_matchings(g)
        assert set(by_twists) == set(matchings)
        for p in matchings:
            assert height_vector(t, g, p) == by_twists[p]
