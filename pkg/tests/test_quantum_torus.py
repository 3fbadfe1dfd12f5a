from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import DimensionError, PreconditionError
from quantum_torus import (
    QHalfLaurent,
    TorusElement,
    bar,
    exchange_binomial,
    exchange_power,
    identity,
    monomial,
    multiply,
    multiply_all,
    product_sequence_q_exponent,
    specialize_q1,
)
from seed_core import LambdaForm

LAMBDA2 = LambdaForm([[0, 1], [-1, 0]])
LAMBDA3 = LambdaForm([[0, 2, -1], [-2, 0, 3], [1, -3, 0]])

vectors3 = st.tuples(*[st.integers(-3, 3)] * 3)


@st.composite
def sparse_elements(draw):
    terms = draw(st.dictionaries(vectors3, st.dictionaries(st.integers(-4, 4), st.integers(-3, 3), max_size=2),
                                 max_size=3))
    return TorusElement(3, {a: QHalfLaurent(c) for a, c in terms.items()})


def test_qhalf_laurent_render():
    assert QHalfLaurent({-1: 1, 1: 1}).render() == "q^{-1/2} + q^{1/2}"
    assert QHalfLaurent({-2: 1, 2: 1}).render() == "q^{-2/2} + q^{2/2}"
    assert QHalfLaurent({-4: 1, 0: 1, 4: 1}).render() == "q^{-4/2} + 1 + q^{4/2}"
    assert QHalfLaurent({3: -2}).render() == "-2q^{3/2}"
    assert QHalfLaurent().render() == "0"


def test_monomial_product_is_twisted():
    e1, e2 = monomial((1, 0)), monomial((0, 1))
    assert multiply(e1, e2, LAMBDA2) == monomial((1, 1)).scale(1)
    assert multiply(e2, e1, LAMBDA2) == monomial((1, 1)).scale(-1)
    assert multiply(monomial((1, 1)), identity(2), LAMBDA2) == monomial((1, 1))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        multiply(monomial((1, 0)), monomial((1, 0, 0)), LAMBDA2)
    with pytest.raises(DimensionError):
        TorusElement(2, {(1, 2, 3): QHalfLaurent.one()})


@given(vectors3, vectors3)
@settings(max_examples=60, deadline=None)
def test_quasi_commutation_of_monomials(a, b):
    lhs = multiply(monomial(a), monomial(b), LAMBDA3)
    rhs = multiply(monomial(b), monomial(a), LAMBDA3).scale(2 * LAMBDA3.form(a, b))
    assert lhs == rhs


@given(sparse_elements(), sparse_elements(), sparse_elements())
@settings(max_examples=40, deadline=None)
def test_multiplication_is_associative(x, y, z):
    left = multiply(multiply(x, y, LAMBDA3), z, LAMBDA3)
    right = multiply(x, multiply(y, z, LAMBDA3), LAMBDA3)
    assert left == right


@given(vectors3, vectors3)
@settings(max_examples=40, deadline=None)
def test_bar_reverses_products_of_monomials(a, b):
    xa, xb = monomial(a), monomial(b)
    assert bar(multiply(xa, xb, LAMBDA3)) == multiply(bar(xb), bar(xa), LAMBDA3)


def test_specialize_q1():
    x = TorusElement(2, {(1, 0): QHalfLaurent({1: 1, -1: 1}), (0, 1): QHalfLaurent({1: 1, -1: -1})})
    assert specialize_q1(x) == {(1, 0): 2}
    assert specialize_q1(monomial((3, -1))) == {(3, -1): 1}


def test_example_expansion_specializes_to_25(gamma_expected):
    values = specialize_q1(gamma_expected)
    assert len(values) == 13
    assert sum(values.values()) == 25


def test_all_plus_or_minus_has_zero_exponent(example):
    for tau in (1, 2, 3):
        for d in range(1, 5):
            assert product_sequence_q_exponent(["+"] * d, example.seed, tau) == 0
            assert product_sequence_q_exponent(["-"] * d, example.seed, tau) == 0


def test_product_sequence_flip_recurrence(example):
    """第 i 位由 + 改为 - 时 n 增加 (d-2i+1)·D_τ"""
    seed = example.seed
    for tau in (1, 2, 3):
        weight = seed.symmetrizer[tau - 1]
        for d in range(1, 7):
            for signs in product("+-", repeat=d):
                for i in range(1, d + 1):
                    minus = list(signs)
                    plus = list(signs)
                    minus[i - 1], plus[i - 1] = "-", "+"
                    diff = (product_sequence_q_exponent(minus, seed, tau)
                            - product_sequence_q_exponent(plus, seed, tau))
                    assert diff == (d - 2 * i + 1) * weight


def test_two_step_difference(example):
    seed = example.seed
    for tau in (1, 2, 3):
        diff = (product_sequence_q_exponent(["-", "+"], seed, tau)
                - product_sequence_q_exponent(["+", "-"], seed, tau))
        assert diff == 2 * seed.symmetrizer[tau - 1]


def test_bad_sign_rejected(example):
    with pytest.raises(PreconditionError):
        product_sequence_q_exponent(["+", "x"], example.seed, 1)
    with pytest.raises(PreconditionError):
        exchange_power(example.seed, 1, -1)


def test_exchange_power_matches_repeated_product(example):
    seed = example.seed
    for tau in (1, 2, 3):
        binomial = exchange_binomial(seed, tau)
        assert exchange_power(seed, tau, 0) == identity(seed.m)
        assert exchange_power(seed, tau, 1) == binomial
        for d in range(2, 5):
            assert exchange_power(seed, tau, d) == multiply_all([binomial] * d, seed.lambda_, seed.m)
