"""
校验模块

把匹配公式与变异动力学相互印证: 量子环面中的交换关系、拟交换关系、
交换变量的幂，以及基于 sympy 精确除法的交换变异对照。
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import Poly

from errors import IntegrityError, PreconditionError
from expansion import ArcExpansion, expand_arc
from logging_setup import logger
from quantum_torus import (
    TorusElement,
    bar,
    exchange_binomial,
    exchange_power,
    monomial,
    multiply,
    multiply_all,
    specialize_q1,
)
from seed_core import QuantumSeed, Triangulation, check_compatibility, mutate_seed
from snake_graph import CrossingSequence

FROZEN_PREFIX = "@"


@dataclass(frozen=True)
class FlipPath:
    """依次沿方向 k_1..k_r 翻转，第 s 步产生的新弧名为 new_arcs[s-1]"""
    name: str
    directions: Tuple[int, ...]
    new_arcs: Tuple[str, ...]


@dataclass
class Scenario:
    name: str
    triangulation: Triangulation
    seed: QuantumSeed
    named_arcs: Dict[str, CrossingSequence] = field(default_factory=dict)
    flip_paths: List[FlipPath] = field(default_factory=list)
    description: str = ""
    principal: bool = True

    def crossing_sequence(self, arc: str) -> CrossingSequence:
        """命名弧给出其穿越序列，三角剖分中的弧给出空序列"""
        if arc in self.named_arcs:
            return self.named_arcs[arc]
        if arc in self.triangulation.arc_map:
            return CrossingSequence(arc=arc, pending=self.triangulation.arc(arc).pending)
        raise PreconditionError(f"场景 {self.name} 中没有弧 {arc} 的穿越序列")

    def flip_path(self, name: str) -> FlipPath:
        for path in self.flip_paths:
            if path.name == name:
                return path
        raise PreconditionError(f"场景 {self.name} 中没有翻转路径 {name}")


def frozen_name(row: int) -> str:
    """冻结变量 (1 起行号) 的引用名"""
    return f"{FROZEN_PREFIX}{row}"


def seeds_along(s: Scenario, path: FlipPath) -> List[QuantumSeed]:
    seeds = [s.seed]
    for k in path.directions:
        seeds.append(mutate_seed(seeds[-1], k))
    return seeds


def clusters_along(s: Scenario, path: FlipPath) -> List[Tuple[str, ...]]:
    """各种子的可变簇 (按方向排列的弧名)"""
    if len(path.directions) != len(path.new_arcs):
        raise PreconditionError(f"翻转路径 {path.name} 的方向数与新弧数不一致")
    clusters = [tuple(s.triangulation.mutable_arcs)]
    for k, arc in zip(path.directions, path.new_arcs):
        current = list(clusters[-1])
        if not 1 <= k <= len(current):
            raise PreconditionError(f"翻转路径 {path.name} 的方向 {k} 超出范围 1..{len(current)}")
        current[k - 1] = arc
        clusters.append(tuple(current))
    return clusters


class ExpansionCache:
    """同一场景内弧展开的缓存，全部以初始种子的量子环面表示"""

    def __init__(self, s: Scenario):
        self.scenario = s
        self._arcs: Dict[str, ArcExpansion] = {}

    def arc(self, name: str) -> ArcExpansion:
        if name not in self._arcs:
            s = self.scenario
            self._arcs[name] = expand_arc(s.triangulation, s.crossing_sequence(name), s.seed)
        return self._arcs[name]

    def quantum(self, name: str) -> TorusElement:
        if name.startswith(FROZEN_PREFIX):
            row = int(name[len(FROZEN_PREFIX):])
            m, n = self.scenario.seed.m, self.scenario.seed.n
            if not n < row <= m:
                raise PreconditionError(f"冻结变量 {name} 超出行号范围 {n + 1}..{m}")
            unit = [0] * m
            unit[row - 1] = 1
            return monomial(unit)
        return self.arc(name).quantum()

    def commutative(self, name: str) -> Dict[Tuple[int, ...], int]:
        return self.arc(name).commutative()

    def seed_variable(self, cluster: Sequence[str], row: int) -> TorusElement:
        """种子中第 row 个变量 (0 起) 在初始环面中的展开"""
        if row < len(cluster):
            return self.quantum(cluster[row])
        return self.quantum(frozen_name(row + 1))


@dataclass(frozen=True)
class CheckReport:
    check: str
    scenario: str
    passed: bool
    detail: str = ""

    def render(self) -> str:
        head = f"{'PASS' if self.passed else 'FAIL'} {self.check} {self.scenario}"
        return f"{head} {self.detail}" if self.detail else head


def _first_difference(lhs: TorusElement, rhs: TorusElement) -> str:
    diff = lhs - rhs
    if diff.is_zero():
        return ""
    a, c = diff.terms()[0]
    return f"首个不同项 ({c.render()}) x^{{({','.join(str(x) for x in a)})}}"


# ---------------------------------------------------------------------------
# 量子校验
# ---------------------------------------------------------------------------

def check_quasi_commutation(s: Scenario, arcs: Sequence[str], path: Optional[FlipPath] = None,
                            cache: Optional[ExpansionCache] = None) -> CheckReport:
    """X_α X_β = q^{Λ(t)_{αβ}} X_β X_α，Λ(t) 取路径上第一个同时含 α、β 的种子"""
    cache = cache or ExpansionCache(s)
    if path is None:
        path = FlipPath(name="base", directions=(), new_arcs=())
    seeds = seeds_along(s, path)
    clusters = clusters_along(s, path)
    check_name = f"quasi-commutation:{path.name}"
    m = s.seed.m

    for alpha, beta in combinations(arcs, 2):
        exponents = []
        for seed, cluster in zip(seeds, clusters):
            names = list(cluster) + [frozen_name(row) for row in range(seed.n + 1, m + 1)]
            if alpha in names and beta in names:
                exponents.append(int(seed.lambda_.entries[names.index(alpha), names.index(beta)]))
        if not exponents:
            raise PreconditionError(f"路径 {path.name} 上没有同时含 {alpha}、{beta} 的种子")
        if len(set(exponents)) > 1:
            return CheckReport(check_name, s.name, False,
                               f"{alpha},{beta} 在不同种子中的 Λ 指数不一致: {sorted(set(exponents))}")
        x_a, x_b = cache.quantum(alpha), cache.quantum(beta)
        lhs = multiply(x_a, x_b, s.seed.lambda_)
        rhs = multiply(x_b, x_a, s.seed.lambda_).scale(2 * exponents[0])
        if lhs != rhs:
            return CheckReport(check_name, s.name, False, f"{alpha},{beta}: {_first_difference(lhs, rhs)}")
    return CheckReport(check_name, s.name, True)


def _normalized_seed_monomial(cache: ExpansionCache, seed: QuantumSeed, cluster: Sequence[str],
                              b: Sequence[int]) -> TorusElement:
    """种子 t 中的规范化单项式 X(t)^b 在初始环面中的展开，b 非负"""
    base = cache.scenario.seed
    factors = []
    for row, power in enumerate(b):
        factors.extend([cache.seed_variable(cluster, row)] * int(power))
    lam = seed.lambda_.entries
    prefactor = sum(int(lam[i, j]) * int(b[i]) * int(b[j])
                    for i in range(len(b)) for j in range(i + 1, len(b)))
    return multiply_all(factors, base.lambda_, base.m).scale(-prefactor)


def check_exchange_relation(s: Scenario, path: FlipPath, step: int,
                            cache: Optional[ExpansionCache] = None) -> CheckReport:
    """第 step 步翻转 (1 起) 的交换关系，只用乘法验证"""
    cache = cache or ExpansionCache(s)
    check_name = f"exchange:{path.name}#{step}"
    if not 1 <= step <= len(path.directions):
        raise PreconditionError(f"翻转路径 {path.name} 没有第 {step} 步")
    seeds = seeds_along(s, path)
    clusters = clusters_along(s, path)
    seed, cluster = seeds[step - 1], clusters[step - 1]
    k = path.directions[step - 1]
    tau, tau_new = cluster[k - 1], path.new_arcs[step - 1]

    lam_base = s.seed.lambda_
    lhs = multiply(cache.quantum(tau_new), cache.quantum(tau), lam_base)

    rhs = TorusElement(s.seed.m)
    unit = [0] * seed.m
    unit[k - 1] = 1
    for part in seed.btilde.column_parts(k):
        b = [int(x) for x in part]
        shifted = [x - u for x, u in zip(b, unit)]
        shift = seed.lambda_.form(shifted, unit)
        rhs = rhs + _normalized_seed_monomial(cache, seed, cluster, b).scale(shift)

    if lhs != rhs:
        logger.warning(f"交换关系不成立: 场景 {s.name}, 路径 {path.name}, 第 {step} 步")
        return CheckReport(check_name, s.name, False, f"{tau_new}·{tau}: {_first_difference(lhs, rhs)}")
    return CheckReport(check_name, s.name, True)


def check_positivity_and_bar(x: TorusElement, check: str = "positivity", scenario: str = "-") -> CheckReport:
    for a, c in x.terms():
        if not c.is_nonnegative():
            return CheckReport(check, scenario, False,
                               f"负系数项 ({c.render()}) x^{{({','.join(str(v) for v in a)})}}")
    mirrored = bar(x)
    if mirrored != x:
        return CheckReport(check, scenario, False, f"bar 不变性失败, {_first_difference(x, mirrored)}")
    return CheckReport(check, scenario, True)


def check_exchange_power(seed: QuantumSeed, tau: int, d: int, scenario: str = "-") -> CheckReport:
    """(Π_+ + Π_-)^d 与按 n(λ) 求和的公式一致"""
    check = f"exchange-power:{tau}^{d}"
    closed = exchange_power(seed, tau, d)
    repeated = multiply_all([exchange_binomial(seed, tau)] * d, seed.lambda_, seed.m)
    if closed != repeated:
        return CheckReport(check, scenario, False, _first_difference(closed, repeated))
    return CheckReport(check, scenario, True)


# ---------------------------------------------------------------------------
# 交换变异对照
# ---------------------------------------------------------------------------

class _Laurent:
    """poly / x^shift，poly 为 sympy 整系数多项式"""

    def __init__(self, poly: Poly, shift: Tuple[int, ...]):
        self.poly = poly
        self.shift = tuple(shift)

    @classmethod
    def variable(cls, gens, row: int) -> "_Laurent":
        return cls(Poly(gens[row], *gens, domain=sympy.ZZ), (0,) * len(gens))

    @classmethod
    def one(cls, gens) -> "_Laurent":
        return cls(Poly(1, *gens, domain=sympy.ZZ), (0,) * len(gens))

    def _lift(self, target: Tuple[int, ...]) -> Poly:
        gens = self.poly.gens
        factor = Poly.from_dict({tuple(t - s for t, s in zip(target, self.shift)): 1}, *gens, domain=sympy.ZZ)
        return self.poly * factor

    def __add__(self, other: "_Laurent") -> "_Laurent":
        target = tuple(max(a, b) for a, b in zip(self.shift, other.shift))
        return _Laurent(self._lift(target) + other._lift(target), target).normalized()

    def __mul__(self, other: "_Laurent") -> "_Laurent":
        return _Laurent(self.poly * other.poly,
                        tuple(a + b for a, b in zip(self.shift, other.shift))).normalized()

    def power(self, k: int) -> "_Laurent":
        result = _Laurent.one(self.poly.gens)
        for _ in range(k):
            result = result * self
        return result

    def normalized(self) -> "_Laurent":
        """提出单项式公因子，使 poly 不被任何 x_i 整除"""
        monoms = self.poly.monoms()
        if not monoms or self.poly.is_zero:
            return self
        low = tuple(min(e[i] for e in monoms) for i in range(len(self.shift)))
        if not any(low):
            return self
        terms = {tuple(a - b for a, b in zip(e, low)): c for e, c in self.poly.terms()}
        return _Laurent(Poly.from_dict(terms, *self.poly.gens, domain=sympy.ZZ),
                        tuple(s - l for s, l in zip(self.shift, low)))

    def divide_exact(self, other: "_Laurent") -> "_Laurent":
        num, den = self.normalized(), other.normalized()
        quotient, remainder = num.poly.div(den.poly)
        if not remainder.is_zero:
            raise IntegrityError(f"Laurent 除法有非零余式: {remainder.as_expr()}")
        if not all(c.is_integer for c in quotient.coeffs()):
            raise IntegrityError(f"Laurent 除法的商不是整系数: {quotient.as_expr()}")
        integral = Poly.from_dict({e: int(c) for e, c in quotient.terms()}, *num.poly.gens, domain=sympy.ZZ)
        return _Laurent(integral, tuple(a - b for a, b in zip(num.shift, den.shift))).normalized()

    def to_dict(self) -> Dict[Tuple[int, ...], int]:
        result = {}
        for e, c in self.poly.terms():
            if c != 0:
                result[tuple(a - s for a, s in zip(e, self.shift))] = int(c)
        return dict(sorted(result.items()))


def commutative_oracle(s: Scenario, path: FlipPath) -> Dict[str, Dict[Tuple[int, ...], int]]:
    """沿翻转路径做交换变异，每步以精确多项式除法求出新变量"""
    m = s.seed.m
    gens = sympy.symbols(f"x1:{m + 1}")
    base = s.triangulation.mutable_arcs
    current = [_Laurent.variable(gens, row) for row in range(m)]
    results = {arc: current[row].to_dict() for row, arc in enumerate(base)}
    seed = s.seed
    clusters = clusters_along(s, path)
    for step, k in enumerate(path.directions, start=1):
        plus, minus = seed.btilde.column_parts(k)
        numerator = None
        for part in (plus, minus):
            term = _Laurent.one(gens)
            for row, power in enumerate(part):
                if power:
                    term = term * current[row].power(int(power))
            numerator = term if numerator is None else numerator + term
        current[k - 1] = numerator.divide_exact(current[k - 1])
        results[clusters[step][k - 1]] = current[k - 1].to_dict()
        seed = mutate_seed(seed, k)
    logger.info(f"交换变异对照完成: 场景 {s.name}, 路径 {path.name}, {len(path.directions)} 步")
    return results


def check_commutative_oracle(s: Scenario, path: FlipPath,
                             cache: Optional[ExpansionCache] = None) -> CheckReport:
    cache = cache or ExpansionCache(s)
    check_name = f"oracle:{path.name}"
    oracle = commutative_oracle(s, path)
    for arc in path.new_arcs:
        expected = oracle[arc]
        got = cache.commutative(arc)
        if got != expected:
            missing = sorted(set(expected.items()) ^ set(got.items()))[0]
            return CheckReport(check_name, s.name, False,
                               f"{arc}: 首个不同项 {missing[1]}·x^{{({','.join(str(v) for v in missing[0])})}}")
    return CheckReport(check_name, s.name, True)


# ---------------------------------------------------------------------------
# 套件
# ---------------------------------------------------------------------------

CHECK_KINDS = ("compatibility", "expansion", "exchange", "quasi-commutation", "oracle", "exchange-power")


def _guarded(check: str, scenario: str, action) -> List[CheckReport]:
    """IntegrityError 记为失败，其余异常照常抛出"""
    try:
        result = action()
    except IntegrityError as e:
        logger.error(f"校验 {check} 发现不一致: {e.detail}", exc_info=True)
        return [CheckReport(check, scenario, False, e.detail)]
    return result if isinstance(result, list) else [result]


def _expansion_reports(s: Scenario, cache: ExpansionCache, arc: str) -> List[CheckReport]:
    check = f"expansion:{arc}"
    x = cache.quantum(arc)
    report = check_positivity_and_bar(x, check, s.name)
    if not report.passed:
        return [report]
    q1 = specialize_q1(x)
    if q1 != cache.commutative(arc):
        return [CheckReport(check, s.name, False, "q=1 特殊化与交换展开不一致")]
    return [report]


def run_suite(s: Scenario, check: Optional[str] = None, max_power: int = 3) -> List[CheckReport]:
    """运行全部校验，或只运行名字以 check 开头的一类"""
    if check is not None and check not in CHECK_KINDS:
        raise PreconditionError(f"未知校验 {check}，可选: {', '.join(CHECK_KINDS)}")

    def wanted(kind: str) -> bool:
        return check is None or check == kind

    cache = ExpansionCache(s)
    reports: List[CheckReport] = []
    logger.info(f"开始校验场景 {s.name}: {check or '全部'}")

    if wanted("compatibility"):
        result = check_compatibility(s.seed.btilde, s.seed.lambda_)
        reports.append(CheckReport("compatibility", s.name, result.ok, result.message))
    if wanted("expansion"):
        names = list(s.triangulation.mutable_arcs) + list(s.named_arcs)
        for arc in names:
            reports += _guarded(f"expansion:{arc}", s.name, lambda arc=arc: _expansion_reports(s, cache, arc))
    if wanted("exchange-power"):
        for tau in range(1, s.seed.n + 1):
            for d in range(1, max_power + 1):
                reports.append(check_exchange_power(s.seed, tau, d, s.name))
    for path in s.flip_paths:
        if wanted("exchange"):
            for step in range(1, len(path.directions) + 1):
                reports += _guarded(f"exchange:{path.name}#{step}", s.name,
                                    lambda step=step, path=path: check_exchange_relation(s, path, step, cache))
        if wanted("quasi-commutation"):
            arcs = sorted(set(s.triangulation.mutable_arcs) | set(path.new_arcs))
            arcs += [frozen_name(row) for row in range(s.seed.n + 1, s.seed.m + 1)]
            reports += _guarded(f"quasi-commutation:{path.name}", s.name,
                                lambda path=path, arcs=arcs: _quasi_reports(s, path, arcs, cache))
        if wanted("oracle"):
            reports += _guarded(f"oracle:{path.name}", s.name,
                                lambda path=path: check_commutative_oracle(s, path, cache))
    if wanted("quasi-commutation") and not s.flip_paths:
        base = FlipPath(name="base", directions=(), new_arcs=())
        arcs = list(s.triangulation.mutable_arcs) + [frozen_name(row) for row in range(s.seed.n + 1, s.seed.m + 1)]
        reports += _guarded("quasi-commutation:base", s.name, lambda: _quasi_reports(s, base, arcs, cache))

    failed = sum(1 for r in reports if not r.passed)
    logger.info(f"场景 {s.name} 校验结束: {len(reports)} 项, 失败 {failed} 项")
    return reports


def _quasi_reports(s: Scenario, path: FlipPath, arcs: Sequence[str], cache: ExpansionCache) -> CheckReport:
    """只检查在路径上某个种子中同时出现的弧对"""
    clusters = clusters_along(s, path)
    frozen = [frozen_name(row) for row in range(s.seed.n + 1, s.seed.m + 1)]
    pairs = set()
    for cluster in clusters:
        names = list(cluster) + frozen
        for a, b in combinations(names, 2):
            pairs.add(tuple(sorted((a, b))))
    for a, b in sorted(pairs):
        if a in arcs and b in arcs:
            report = check_quasi_commutation(s, [a, b], path, cache)
            if not report.passed:
                return report
    return CheckReport(f"quasi-commutation:{path.name}", s.name, True)
