"""
量子环面上的精确运算

系数属于 Z[q^{±1/2}]，一律以 q^{1/2} 的整数指数表示；
单项式 X^a 为规范化单项式，满足 X^a X^b = q^{Λ(a,b)/2} X^{a+b}。
"""
from collections import defaultdict
from itertools import product as cartesian
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from errors import DimensionError, PreconditionError
from seed_core import LambdaForm, QuantumSeed

ExponentVector = Tuple[int, ...]


class QHalfLaurent:
    """Z[q^{±1/2}] 中的元素: q^{1/2} 指数 -> 非零整数系数"""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[int, int]] = None):
        clean = {int(k): int(c) for k, c in (terms or {}).items() if int(c) != 0}
        self._terms: Dict[int, int] = dict(sorted(clean.items()))

    @classmethod
    def q_power(cls, exponent: int, coefficient: int = 1) -> "QHalfLaurent":
        return cls({exponent: coefficient})

    @classmethod
    def one(cls) -> "QHalfLaurent":
        return cls({0: 1})

    def items(self) -> List[Tuple[int, int]]:
        return list(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def shift(self, exponent: int) -> "QHalfLaurent":
        """乘以 q^{exponent/2}"""
        return QHalfLaurent({k + exponent: c for k, c in self._terms.items()})

    def bar(self) -> "QHalfLaurent":
        return QHalfLaurent({-k: c for k, c in self._terms.items()})

    def at_one(self) -> int:
        return sum(self._terms.values())

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def __add__(self, other: "QHalfLaurent") -> "QHalfLaurent":
        merged = dict(self._terms)
        for k, c in other._terms.items():
            merged[k] = merged.get(k, 0) + c
        return QHalfLaurent(merged)

    def __neg__(self) -> "QHalfLaurent":
        return QHalfLaurent({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "QHalfLaurent") -> "QHalfLaurent":
        return self + (-other)

    def __mul__(self, other: "QHalfLaurent") -> "QHalfLaurent":
        acc: Dict[int, int] = defaultdict(int)
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                acc[k1 + k2] += c1 * c2
        return QHalfLaurent(acc)

    def __eq__(self, other):
        if not isinstance(other, QHalfLaurent):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def render(self) -> str:
        """按 q^{1/2} 指数升序输出带符号和，每项写成 q^{k/2}"""
        if not self._terms:
            return "0"
        parts: List[str] = []
        for k, c in self._terms.items():
            if k == 0:
                body = str(abs(c))
            else:
                power = f"q^{{{k}/2}}"
                body = power if abs(c) == 1 else f"{abs(c)}{power}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(parts)

    def __repr__(self):
        return f"QHalfLaurent({self.render()})"


def _exponent(a: Iterable[int]) -> ExponentVector:
    return tuple(int(x) for x in a)


class TorusElement:
    """量子环面元素: 指数向量 -> 非零 QHalfLaurent 系数"""

    __slots__ = ("_m", "_terms")

    def __init__(self, m: int, terms: Optional[Mapping[Sequence[int], QHalfLaurent]] = None):
        self._m = int(m)
        clean: Dict[ExponentVector, QHalfLaurent] = {}
        for a, coefficient in (terms or {}).items():
            key = _exponent(a)
            if len(key) != self._m:
                raise DimensionError(f"指数向量 {key} 的长度与环面维数 {self._m} 不一致")
            if not coefficient.is_zero():
                clean[key] = coefficient
        self._terms: Dict[ExponentVector, QHalfLaurent] = dict(sorted(clean.items()))

    @property
    def m(self) -> int:
        return self._m

    def terms(self) -> List[Tuple[ExponentVector, QHalfLaurent]]:
        return list(self._terms.items())

    def coefficient(self, a: Sequence[int]) -> QHalfLaurent:
        return self._terms.get(_exponent(a), QHalfLaurent())

    def is_zero(self) -> bool:
        return not self._terms

    def _require_same_m(self, other: "TorusElement") -> None:
        if self._m != other._m:
            raise DimensionError(f"环面维数不一致: {self._m} 与 {other._m}")

    def __add__(self, other: "TorusElement") -> "TorusElement":
        self._require_same_m(other)
        merged = dict(self._terms)
        for a, c in other._terms.items():
            merged[a] = merged[a] + c if a in merged else c
        return TorusElement(self._m, merged)

    def __neg__(self) -> "TorusElement":
        return TorusElement(self._m, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return self + (-other)

    def scale(self, exponent: int) -> "TorusElement":
        """整体乘以 q^{exponent/2}"""
        return TorusElement(self._m, {a: c.shift(exponent) for a, c in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self._m == other._m and self._terms == other._terms

    __hash__ = None

    def render(self) -> str:
        """规范文本: 按指数向量字典序排列，系数为 1 时省略括号"""
        if not self._terms:
            return "0"
        parts = []
        for a, c in self._terms.items():
            vector = "x^{(" + ",".join(str(x) for x in a) + ")}"
            parts.append(vector if c == QHalfLaurent.one() else f"({c.render()}) {vector}")
        return " + ".join(parts)

    def term_list(self) -> List[dict]:
        """机器可读的项列表"""
        return [
            {"exponent": list(a), "coefficient": [[k, v] for k, v in c.items()]}
            for a, c in self._terms.items()
        ]

    def __repr__(self):
        return f"TorusElement({self.render()})"


def monomial(a: Sequence[int]) -> TorusElement:
    """规范化单项式 X^a"""
    key = _exponent(a)
    return TorusElement(len(key), {key: QHalfLaurent.one()})


def identity(m: int) -> TorusElement:
    return monomial((0,) * m)


def multiply(x: TorusElement, y: TorusElement, lambda_: LambdaForm) -> TorusElement:
    """按 X^a X^b = q^{Λ(a,b)/2} X^{a+b} 双线性展开"""
    if x.m != y.m or x.m != lambda_.m:
        raise DimensionError(f"维数不一致: {x.m}, {y.m}, Λ 为 {lambda_.m}")
    lam = lambda_.entries
    right = [(np.asarray(b, dtype=np.int64), b, c) for b, c in y.terms()]
    acc: Dict[ExponentVector, Dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for a, ca in x.terms():
        row = np.asarray(a, dtype=np.int64) @ lam
        for b_arr, b, cb in right:
            shift = int(row @ b_arr)
            key = tuple(i + j for i, j in zip(a, b))
            bucket = acc[key]
            for k1, c1 in ca.items():
                for k2, c2 in cb.items():
                    bucket[k1 + k2 + shift] += c1 * c2
    return TorusElement(x.m, {key: QHalfLaurent(bucket) for key, bucket in acc.items()})


def multiply_all(factors: Sequence[TorusElement], lambda_: LambdaForm, m: int) -> TorusElement:
    result = identity(m)
    for factor in factors:
        result = multiply(result, factor, lambda_)
    return result


def bar(x: TorusElement) -> TorusElement:
    """bar 对合: q^{1/2} -> q^{-1/2}，规范化单项式不动"""
    return TorusElement(x.m, {a: c.bar() for a, c in x.terms()})


def specialize_q1(x: TorusElement) -> Dict[ExponentVector, int]:
    """在 q^{1/2}=1 处取值，丢弃结果为零的项"""
    result = {}
    for a, c in x.terms():
        value = c.at_one()
        if value != 0:
            result[a] = value
    return result


def _exchange_exponents(seed: QuantumSeed, tau: int) -> Tuple[np.ndarray, np.ndarray]:
    """Π_± 的指数 -e_τ + (b_τ)_±"""
    plus, minus = seed.btilde.column_parts(tau)
    unit = np.zeros(seed.m, dtype=np.int64)
    unit[tau - 1] = 1
    return plus - unit, minus - unit


def _parse_signs(signs: Sequence) -> List[bool]:
    parsed = []
    for sign in signs:
        if sign in ("+", 1, True):
            parsed.append(True)
        elif sign in ("-", "−", -1, False):
            parsed.append(False)
        else:
            raise PreconditionError(f"符号 {sign!r} 不在 {{+, -}} 中")
    return parsed


def product_sequence_q_exponent(signs: Sequence, seed: QuantumSeed, tau: int) -> int:
    """Z_1⋯Z_d = q^{n(λ)/2} X^{ΣZ}，Z_i 取 Π_+ 或 Π_-，返回 n(λ)"""
    plus, minus = _exchange_exponents(seed, tau)
    chosen = [plus if is_plus else minus for is_plus in _parse_signs(signs)]
    lam = seed.lambda_.entries
    total = 0
    for i in range(len(chosen)):
        row = chosen[i] @ lam
        for j in range(i + 1, len(chosen)):
            total += int(row @ chosen[j])
    return total


def exchange_power(seed: QuantumSeed, tau: int, d: int) -> TorusElement:
    """(X_{τ'})^d = Σ_λ q^{n(λ)/2} X^{-d e_τ + (Σλ) b_- + (d-Σλ) b_+}，λ_i=1 表示取 Π_-"""
    if d < 0:
        raise PreconditionError(f"幂次 d={d} 必须非负")
    plus, minus = _exchange_exponents(seed, tau)
    acc: Dict[ExponentVector, Dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for choice in cartesian((True, False), repeat=d):
        minus_count = choice.count(False)
        exponent = tuple(int(v) for v in (d - minus_count) * plus + minus_count * minus)
        n_lambda = product_sequence_q_exponent(["+" if c else "-" for c in choice], seed, tau)
        acc[exponent][n_lambda] += 1
    return TorusElement(seed.m, {a: QHalfLaurent(bucket) for a, bucket in acc.items()})


def exchange_binomial(seed: QuantumSeed, tau: int) -> TorusElement:
    """Π_+ + Π_-，即种子环面中的 X_{τ'}"""
    plus, minus = _exchange_exponents(seed, tau)
    return monomial(tuple(int(v) for v in plus)) + monomial(tuple(int(v) for v in minus))
