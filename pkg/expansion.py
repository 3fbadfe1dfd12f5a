"""
展开模块

匹配的权重、穿越、高度统计，指数向量 a(P)，Ω 与赋值映射 v，
以及交换与量子 Laurent 展开。
"""
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from errors import DimensionError, IntegrityError, PreconditionError
from logging_setup import logger
from quantum_torus import QHalfLaurent, TorusElement
from seed_core import ExtendedExchangeMatrix, QuantumSeed, Triangulation
from snake_graph import (
    SLOTS,
    CrossingSequence,
    PerfectMatching,
    SnakeGraph,
    build_snake_graph,
    enumerate_matchings,
    maximal_matching,
    minimal_matching,
    pair_at,
    twist_graph,
    is_perfect_matching,
)

HeightVector = Tuple[int, ...]


def _require_matching(g: SnakeGraph, p: PerfectMatching) -> None:
    if not is_perfect_matching(g, p.edges):
        raise PreconditionError(f"边集 {sorted(p.edges)} 不是蛇形图 {g.arc} 的完美匹配")


def _require_dimensions(t: Triangulation, btilde: ExtendedExchangeMatrix) -> None:
    if btilde.n != t.n:
        raise DimensionError(f"B̃ 有 {btilde.n} 列，而三角剖分有 {t.n} 条可变弧")


def enclosed_tiles(g: SnakeGraph, p: PerfectMatching) -> Set[int]:
    """P 与 P_- 的对称差围出的瓦片"""
    _require_matching(g, p)
    difference = set(p.edges) ^ set(minimal_matching(g).edges)
    inside = set()
    for tile in g.tiles:
        flags = {tile.edge(slot) in difference for slot in SLOTS if g.edge(tile.edge(slot)).is_boundary}
        if len(flags) != 1:
            raise IntegrityError(f"瓦片 {tile.index} 的边界边对 P Δ P_- 的归属不一致")
        if True in flags:
            inside.add(tile.index)
    for j, u in enumerate(g.glue, start=1):
        if ((j in inside) != (j + 1 in inside)) != (u in difference):
            raise IntegrityError(f"粘合边 e{u} 与瓦片 {j}、{j + 1} 的内外关系不一致")
    return inside


def height_vector(t: Triangulation, g: SnakeGraph, p: PerfectMatching) -> HeightVector:
    """m_k = 被围住且对角线为 τ_k 的瓦片数"""
    counts = [0] * t.n
    for index in enclosed_tiles(g, p):
        counts[t.index_of(g.tile(index).diagonal)] += 1
    return tuple(counts)


def _integrate(graph: nx.Graph, start: PerfectMatching, zero,
               increment: Callable[[PerfectMatching, int], object],
               add: Callable, what: str) -> Dict[PerfectMatching, object]:
    """从 start 沿扭转图广度优先积分，再逐条非树边检查一致性

    increment(P, s) 为从 P 在瓦片 s 扭转一次后的增量。
    """
    values = {start: zero}
    for p, q in nx.bfs_edges(graph, start):
        values[q] = add(values[p], increment(p, graph.edges[p, q]["tile"]))
    if len(values) != graph.number_of_nodes():
        raise IntegrityError(f"{what}: 扭转图不连通，只到达 {len(values)}/{graph.number_of_nodes()} 个匹配")
    tree = nx.Graph(nx.bfs_tree(graph, start))
    for p, q, s in graph.edges(data="tile"):
        if values[q] != add(values[p], increment(p, s)):
            cycle = nx.shortest_path(tree, q, p)
            tiles = [graph.edges[a, b]["tile"] for a, b in zip(cycle, cycle[1:])] + [s]
            raise IntegrityError(f"{what}: 沿瓦片序列 {tiles} 的扭转环不闭合")
    return values


def heights_by_twists(t: Triangulation, g: SnakeGraph,
                      graph: Optional[nx.Graph] = None) -> Dict[PerfectMatching, HeightVector]:
    """从 P_- 出发，顺时针一对扭到逆时针一对时加 e_a"""
    graph = twist_graph(g) if graph is None else graph

    def increment(p: PerfectMatching, s: int) -> HeightVector:
        step = [0] * t.n
        step[t.index_of(g.tile(s).diagonal)] = 1 if pair_at(g, p, s) == "cw" else -1
        return tuple(step)

    def add(a: HeightVector, b: HeightVector) -> HeightVector:
        return tuple(x + y for x, y in zip(a, b))

    return _integrate(graph, minimal_matching(g), (0,) * t.n, increment, add, "高度积分")


def height_vector_by_twists(t: Triangulation, g: SnakeGraph, p: PerfectMatching) -> HeightVector:
    _require_matching(g, p)
    return heights_by_twists(t, g)[p]


def _crossing_counts(t: Triangulation, g: SnakeGraph) -> np.ndarray:
    counts = np.zeros(t.n, dtype=np.int64)
    for tile in g.tiles:
        counts[t.index_of(tile.diagonal)] += 1
    return counts


def _weight_counts(t: Triangulation, g: SnakeGraph, p: PerfectMatching) -> np.ndarray:
    counts = np.zeros(t.n, dtype=np.int64)
    for eid in p.edges:
        label = g.edge(eid).label
        # 边界弧对应的变量取 1
        if not t.is_boundary(label):
            counts[t.index_of(label)] += 1
    return counts


def tropical_shift(btilde: ExtendedExchangeMatrix, heights: Sequence[HeightVector]) -> Tuple[int, ...]:
    """冻结行像 Σ_k m_k b̃_{·k} 在全部匹配上的逐分量最小值"""
    frozen = btilde.entries[btilde.n:, :]
    if frozen.shape[0] == 0:
        return ()
    images = np.array([frozen @ np.asarray(h, dtype=np.int64) for h in heights], dtype=np.int64)
    return tuple(int(x) for x in images.min(axis=0))


def exponent_vector(t: Triangulation, c: CrossingSequence, g: SnakeGraph, p: PerfectMatching,
                    btilde: ExtendedExchangeMatrix, shift: Sequence[int],
                    height: Optional[HeightVector] = None) -> Tuple[int, ...]:
    """a(P): 可变坐标为权重减穿越，冻结坐标为高度经 B̃ 的像减去热带平移"""
    _require_dimensions(t, btilde)
    if len(shift) != btilde.m - btilde.n:
        raise DimensionError(f"热带平移长度 {len(shift)} 与冻结行数 {btilde.m - btilde.n} 不一致")
    height = height_vector(t, g, p) if height is None else height
    mutable = _weight_counts(t, g, p) - _crossing_counts(t, g)
    frozen = btilde.entries[btilde.n:, :] @ np.asarray(height, dtype=np.int64) - np.asarray(shift, dtype=np.int64)
    return tuple(int(x) for x in mutable) + tuple(int(x) for x in frozen)


@dataclass(frozen=True)
class MatchingStatistics:
    weight: Tuple[int, ...]
    crossing: Tuple[int, ...]
    height: HeightVector
    exponent: Tuple[int, ...]


def matching_statistics(t: Triangulation, c: CrossingSequence, g: SnakeGraph, p: PerfectMatching,
                        btilde: ExtendedExchangeMatrix,
                        shift: Optional[Sequence[int]] = None) -> MatchingStatistics:
    if shift is None:
        shift = tropical_shift(btilde, [height_vector(t, g, q) for q in enumerate_matchings(g)])
    height = height_vector(t, g, p)
    return MatchingStatistics(
        weight=tuple(int(x) for x in _weight_counts(t, g, p)),
        crossing=tuple(int(x) for x in _crossing_counts(t, g)),
        height=height,
        exponent=exponent_vector(t, c, g, p, btilde, shift, height),
    )


def omega(t: Triangulation, c: CrossingSequence, g: SnakeGraph, p: PerfectMatching,
          s: int, seed: QuantumSeed) -> int:
    """Ω(p_s, P)，P 占据逆时针一对时取正号"""
    pair = pair_at(g, p, s)
    if pair is None:
        raise PreconditionError(f"匹配在瓦片 {s} 上不能扭转，Ω 无定义")
    tile = g.tile(s)
    tau = tile.diagonal
    slots = tile.ccw_slots if pair == "ccw" else tile.cw_slots
    pair_edges = {tile.edge(slot) for slot in slots}

    m_plus = sum(1 for other in g.tiles if other.index > s and other.diagonal == tau)
    m_minus = sum(1 for other in g.tiles if other.index < s and other.diagonal == tau)
    n_plus = n_minus = 0
    for eid in p.edges:
        if eid in pair_edges:
            continue
        edge = g.edge(eid)
        if edge.label != tau:
            continue
        if edge.first_tile > s:
            n_plus += 1
        elif edge.first_tile < s:
            n_minus += 1

    value = (n_plus - m_plus - n_minus + m_minus) * seed.symmetrizer[t.index_of(tau)]
    return value if pair == "ccw" else -value


@dataclass
class ValuationTable:
    values: Dict[PerfectMatching, int] = field(default_factory=dict)

    def __getitem__(self, p: PerfectMatching) -> int:
        return self.values[p]

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return self.values.items()


def valuation_from(t: Triangulation, c: CrossingSequence, g: SnakeGraph, seed: QuantumSeed,
                   start: str = "minus", graph: Optional[nx.Graph] = None) -> Dict[PerfectMatching, int]:
    """从 P_- (start='minus') 或 P_+ (start='plus') 出发积分 v(μP) = v(P) - Ω(p, P)"""
    if start not in ("minus", "plus"):
        raise PreconditionError(f"起点 {start} 不在 {{minus, plus}} 中")
    graph = twist_graph(g) if graph is None else graph
    origin = minimal_matching(g) if start == "minus" else maximal_matching(g)

    def increment(p: PerfectMatching, s: int) -> int:
        return -omega(t, c, g, p, s, seed)

    return _integrate(graph, origin, 0, increment, lambda a, b: a + b, f"赋值积分 ({start})")


def valuation(t: Triangulation, c: CrossingSequence, g: SnakeGraph, seed: QuantumSeed,
              graph: Optional[nx.Graph] = None) -> ValuationTable:
    """最小与最大赋值都算出并要求一致，v(P_±) = 0"""
    graph = twist_graph(g) if graph is None else graph
    lower = valuation_from(t, c, g, seed, "minus", graph)
    top = maximal_matching(g)
    if lower[top] != 0:
        raise IntegrityError(f"弧 {c.arc}: v(P_+) = {lower[top]}，应为 0")
    upper = valuation_from(t, c, g, seed, "plus", graph)
    for p, value in lower.items():
        if upper[p] != value:
            raise IntegrityError(
                f"弧 {c.arc}: 匹配 {sorted(p.edges)} 的最小赋值 {value} 与最大赋值 {upper[p]} 不一致"
            )
    return ValuationTable(values=dict(lower))


@dataclass
class ArcExpansion:
    """一条弧的全部中间结果，供展开、匹配列表与校验共用"""
    arc: str
    graph: SnakeGraph
    matchings: List[PerfectMatching]
    heights: Dict[PerfectMatching, HeightVector]
    shift: Tuple[int, ...]
    exponents: Dict[PerfectMatching, Tuple[int, ...]]
    valuation: Optional[ValuationTable] = None
    m: int = 0

    def commutative(self) -> Dict[Tuple[int, ...], int]:
        totals: Counter = Counter(self.exponents[p] for p in self.matchings)
        return dict(sorted(totals.items()))

    def quantum(self) -> TorusElement:
        if self.valuation is None:
            raise PreconditionError(f"弧 {self.arc} 未计算赋值，不能给出量子展开")
        acc: Dict[Tuple[int, ...], Dict[int, int]] = defaultdict(lambda: defaultdict(int))
        for p in self.matchings:
            acc[self.exponents[p]][self.valuation[p]] += 1
        return TorusElement(self.m, {a: QHalfLaurent(c) for a, c in acc.items()})


def expand_arc(t: Triangulation, c: CrossingSequence, seed: QuantumSeed, quantum: bool = True) -> ArcExpansion:
    _require_dimensions(t, seed.btilde)
    g = build_snake_graph(t, c)
    matchings = enumerate_matchings(g)
    heights = {p: height_vector(t, g, p) for p in matchings}
    shift = tropical_shift(seed.btilde, list(heights.values()))
    exponents = {p: exponent_vector(t, c, g, p, seed.btilde, shift, heights[p]) for p in matchings}
    table = valuation(t, c, g, seed, twist_graph(g, matchings)) if quantum else None
    logger.info(f"弧 {c.arc} 展开完成: {len(matchings)} 个匹配, {len(set(exponents.values()))} 个单项式")
    return ArcExpansion(arc=c.arc, graph=g, matchings=matchings, heights=heights, shift=shift,
                        exponents=exponents, valuation=table, m=seed.m)


def commutative_expansion(t: Triangulation, c: CrossingSequence, seed: QuantumSeed) -> Dict[Tuple[int, ...], int]:
    """x_γ = Σ_P x^T(P)"""
    return expand_arc(t, c, seed, quantum=False).commutative()


def quantum_expansion(t: Triangulation, c: CrossingSequence, seed: QuantumSeed) -> TorusElement:
    """X_γ = Σ_P q^{v(P)/2} X^{a(P)}"""
    return expand_arc(t, c, seed).quantum()
