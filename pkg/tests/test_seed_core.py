import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import seed_checks_mode
from errors import DimensionError, PreconditionError, StructuralError
from seed_core import (
    Arc,
    ExtendedExchangeMatrix,
    LambdaForm,
    Triangle,
    Triangulation,
    build_principal_quantization,
    check_compatibility,
    mutate_matrix,
    mutate_seed,
    quantum_seed,
    signed_adjacency,
    weight_symmetrizer,
)

EXAMPLE_B = [[0, 2, -1], [-2, 0, 1], [2, -2, 0]]


@st.composite
def skew_matrices(draw, n=3, bound=2):
    b = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            v = draw(st.integers(-bound, bound))
            b[i, j], b[j, i] = v, -v
    return b


def test_example_signed_adjacency(example):
    t = example.triangulation
    assert signed_adjacency(t).tolist() == EXAMPLE_B
    assert weight_symmetrizer(t) == (2, 2, 1)
    assert t.mutable_arcs == ("1", "2", "3")


def test_principal_quantization_is_compatible():
    seed = build_principal_quantization(EXAMPLE_B, [2, 2, 1])
    report = check_compatibility(seed.btilde, seed.lambda_)
    assert report.ok
    assert report.symmetrizer == (2, 2, 1)
    assert seed.m == 6 and seed.n == 3
    assert seed.btilde.to_list()[3:] == np.eye(3, dtype=int).tolist()


def test_compatibility_failure_locates_entry():
    btilde = ExtendedExchangeMatrix([[0, 1], [-1, 0]])
    report = check_compatibility(btilde, LambdaForm([[0, 0], [0, 0]]))
    assert not report.ok
    assert report.entry == (1, 1)
    assert report.value == 0


def test_quantum_seed_rejects_incompatible_pair(example):
    seed = example.seed
    assert quantum_seed(seed.btilde, seed.lambda_).symmetrizer == (2, 2, 1)

    # 冻结行 4、5 之间的一对元素同时扰动，Λ 仍反对称
    entries = np.array(seed.lambda_.to_list())
    entries[3, 4] += 1
    entries[4, 3] -= 1
    perturbed = LambdaForm(entries)
    report = check_compatibility(seed.btilde, perturbed)
    assert not report.ok
    assert report.entry == (1, 5)
    assert report.value == 1
    with pytest.raises(PreconditionError, match="不相容"):
        quantum_seed(seed.btilde, perturbed)


def test_lambda_must_be_skew():
    with pytest.raises(PreconditionError):
        LambdaForm([[0, 1], [1, 0]])
    with pytest.raises(DimensionError):
        LambdaForm([[0, 1, 2], [-1, 0, 3]])


def test_principal_quantization_requires_skew_symmetrizable():
    with pytest.raises(PreconditionError):
        build_principal_quantization([[0, 1], [-1, 0]], [1, 2])
    with pytest.raises(DimensionError):
        build_principal_quantization([[0, 1], [-1, 0]], [1])


def test_mutation_direction_out_of_range(example):
    with pytest.raises(PreconditionError):
        mutate_matrix(example.seed.btilde, 0)
    with pytest.raises(PreconditionError):
        mutate_seed(example.seed, 4)


def test_matrix_mutation_example():
    mutated = mutate_matrix(ExtendedExchangeMatrix(EXAMPLE_B), 3)
    assert mutated.to_list() == [[0, 0, 1], [0, 0, -1], [-2, 2, 0]]


@given(skew_matrices(), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_seed_mutation_is_involution(b, k):
    seed = build_principal_quantization(b, [1, 1, 1])
    twice = mutate_seed(mutate_seed(seed, k), k)
    assert twice.btilde == seed.btilde
    assert twice.lambda_ == seed.lambda_


@given(st.lists(st.integers(1, 3), min_size=1, max_size=6))
@settings(max_examples=30, deadline=None)
def test_mutation_keeps_symmetrizer(example, directions):
    seed = example.seed
    for k in directions:
        seed = mutate_seed(seed, k)
    report = check_compatibility(seed.btilde, seed.lambda_)
    assert report.ok
    assert report.symmetrizer == (2, 2, 1)


def _square(**overrides):
    arcs = [Arc("d", "d"), Arc("a", "a", boundary=True), Arc("b", "b", boundary=True),
            Arc("c", "c", boundary=True), Arc("e", "e", boundary=True)]
    triangles = [Triangle("t1", ("d", "a", "b")), Triangle("t2", ("d", "c", "e"))]
    arcs = overrides.get("arcs", arcs)
    triangles = overrides.get("triangles", triangles)
    return Triangulation(arcs=tuple(arcs), triangles=tuple(triangles))


def test_triangulation_validation():
    t = _square()
    assert t.n == 1
    assert t.occurrences("d") == (("t1", 0), ("t2", 0))

    with pytest.raises(StructuralError, match="三角形列表为空"):
        _square(triangles=[])
    with pytest.raises(StructuralError, match="自折"):
        _square(triangles=[Triangle("t1", ("d", "d", "b")), Triangle("t2", ("a", "c", "e"))])
    with pytest.raises(StructuralError, match="权重必须为 2"):
        _square(arcs=[Arc("d", "d", pending=True)])
    with pytest.raises(StructuralError, match="未知弧"):
        _square(triangles=[Triangle("t1", ("d", "a", "x")), Triangle("t2", ("d", "c", "e"))])
    with pytest.raises(StructuralError, match="出现 1 次"):
        _square(triangles=[Triangle("t1", ("d", "a", "b")), Triangle("t2", ("c", "e", "b"))])


def test_seed_checks_mode_reads_environment(monkeypatch):
    monkeypatch.setenv("QCL_SEED_CHECKS", "warn")
    assert seed_checks_mode() == "warn"
    monkeypatch.setenv("QCL_SEED_CHECKS", "loose")
    assert seed_checks_mode() == "strict"
    monkeypatch.delenv("QCL_SEED_CHECKS")
    assert seed_checks_mode() == "strict"
