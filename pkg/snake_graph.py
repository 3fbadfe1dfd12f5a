"""
蛇形图模块

由穿越序列构造蛇形图，枚举完美匹配，计算最小/最大匹配、扭转、匹配分解，
以及 τ 等价类与 ν 签名。瓦片几何是抽象的: 只记录标签、奇偶性和粘合关系。

约定:
- 瓦片 j 的左下三角形为 Δ_{j-1} 在 τ 处旋转得到的 (τ, x', y')，右上三角形为 Δ_j 的 (τ, x, y)
- 奇数瓦片 N=y, E=x, S=y', W=x'；偶数瓦片 N=x, E=y, S=x', W=y'
- 对角线连接 NW 与 SE
"""
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from config import MAX_MATCHINGS
from errors import IntegrityError, PreconditionError, StructuralError
from logging_setup import logger
from seed_core import Triangulation

SLOTS = ("N", "E", "S", "W")
CORNERS = ("SW", "SE", "NE", "NW")
_SLOT_CORNERS = {"N": ("NW", "NE"), "E": ("SE", "NE"), "S": ("SW", "SE"), "W": ("SW", "NW")}
_SHARED_SLOT = {"up": ("N", "S"), "right": ("E", "W")}


@dataclass(frozen=True)
class CrossingSequence:
    """弧 γ 依次穿越的弧 p_1..p_d；γ 为悬挂弧时给出的是环路 l(γ) 的序列"""
    arc: str
    crossings: Tuple[str, ...] = ()
    pending: bool = False
    start_triangle: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))

    @property
    def d(self) -> int:
        return len(self.crossings)


@dataclass(frozen=True)
class Tile:
    index: int
    diagonal: str
    labels: Tuple[str, str, str, str]   # N, E, S, W
    edges: Tuple[int, int, int, int]    # N, E, S, W
    corners: Tuple[int, int, int, int]  # SW, SE, NE, NW

    @property
    def odd(self) -> bool:
        return self.index % 2 == 1

    def label(self, slot: str) -> str:
        return self.labels[SLOTS.index(slot)]

    def edge(self, slot: str) -> int:
        return self.edges[SLOTS.index(slot)]

    def corner(self, name: str) -> int:
        return self.corners[CORNERS.index(name)]

    @property
    def cw_slots(self) -> Tuple[str, str]:
        """(x, x') 所在的一对边，即对角线顺时针方向的一对"""
        return ("E", "W") if self.odd else ("N", "S")

    @property
    def ccw_slots(self) -> Tuple[str, str]:
        return ("N", "S") if self.odd else ("E", "W")

    @property
    def diagonal_ends(self) -> Tuple[int, int]:
        return self.corner("NW"), self.corner("SE")

    def slot_of(self, edge_id: int) -> Optional[str]:
        for slot, eid in zip(SLOTS, self.edges):
            if eid == edge_id:
                return slot
        return None


@dataclass(frozen=True)
class Edge:
    id: int
    label: str
    ends: Tuple[int, int]
    tiles: Tuple[int, ...] = ()
    slots: Tuple[str, ...] = ()

    @property
    def first_tile(self) -> int:
        return self.tiles[0] if self.tiles else 0

    @property
    def last_tile(self) -> int:
        return self.tiles[-1] if self.tiles else 0

    @property
    def is_boundary(self) -> bool:
        """只属于一个瓦片 (或 d=0 的唯一边)"""
        return len(self.tiles) <= 1


@dataclass(frozen=True)
class PerfectMatching:
    edges: FrozenSet[int]

    def key(self) -> Tuple[int, ...]:
        return tuple(sorted(self.edges))

    def __contains__(self, edge_id) -> bool:
        return edge_id in self.edges

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class SnakeGraph:
    arc: str
    tiles: Tuple[Tile, ...]
    edges: Tuple[Edge, ...]
    glue: Tuple[int, ...] = ()    # 第 j 个元素为瓦片 j 与 j+1 的公共边
    attach: Tuple[str, ...] = ()  # 瓦片 j+1 接在瓦片 j 的 up 或 right

    @property
    def d(self) -> int:
        return len(self.tiles)

    @cached_property
    def edge_map(self) -> Dict[int, Edge]:
        return {edge.id: edge for edge in self.edges}

    @cached_property
    def tile_map(self) -> Dict[int, Tile]:
        return {tile.index: tile for tile in self.tiles}

    @cached_property
    def vertices(self) -> Tuple[int, ...]:
        found: Set[int] = set()
        for edge in self.edges:
            found.update(edge.ends)
        return tuple(sorted(found))

    @property
    def diagonals(self) -> Tuple[str, ...]:
        return tuple(tile.diagonal for tile in self.tiles)

    def edge(self, edge_id: int) -> Edge:
        if edge_id not in self.edge_map:
            raise PreconditionError(f"蛇形图 {self.arc} 中不存在边 e{edge_id}")
        return self.edge_map[edge_id]

    def tile(self, index: int) -> Tile:
        if index not in self.tile_map:
            raise PreconditionError(f"蛇形图 {self.arc} 中不存在瓦片 {index}")
        return self.tile_map[index]


# ---------------------------------------------------------------------------
# 构造
# ---------------------------------------------------------------------------

def _initial_triangle(t: Triangulation, c: CrossingSequence) -> str:
    """确定 Δ_0"""
    first = c.crossings[0]
    holders = [tri_id for tri_id, _ in t.occurrences(first)]
    if c.start_triangle is not None:
        t.triangle(c.start_triangle)
        if c.start_triangle not in holders:
            raise StructuralError(f"起始三角形 {c.start_triangle} 不含第一个穿越弧 {first}")
        return c.start_triangle
    if t.arc(first).pending:
        return holders[0]
    if c.d == 1:
        raise StructuralError(f"弧 {c.arc} 只穿越非悬挂弧 {first} 一次，必须给出 start_triangle")
    second = c.crossings[1]
    candidates = [tri_id for tri_id in holders if second in t.triangle(tri_id).sides]
    if not candidates:
        raise StructuralError(f"弧 {c.arc} 的第 1、2 个穿越弧 {first}、{second} 不共三角形")
    if len(candidates) > 1:
        raise StructuralError(f"弧 {c.arc} 的 Δ_0 无法唯一确定，请给出 start_triangle")
    return next(tri_id for tri_id in holders if tri_id != candidates[0])


def _walk(t: Triangulation, c: CrossingSequence) -> List[Tuple[str, int, str, int]]:
    """逐个穿越，返回 (Δ_{j-1}, 槽位, Δ_j, 槽位)"""
    for position, arc_id in enumerate(c.crossings, start=1):
        if t.arc(arc_id).boundary:
            raise StructuralError(f"弧 {c.arc} 的第 {position} 个穿越弧 {arc_id} 是边界弧")
    current = _initial_triangle(t, c)
    steps = []
    for position, tau in enumerate(c.crossings, start=1):
        tri = t.triangle(current)
        if tau not in tri.sides:
            raise StructuralError(
                f"弧 {c.arc} 的第 {position} 个穿越弧 {tau} 不在三角形 {current} 上，与前一个穿越不共三角形"
            )
        slot = tri.sides.index(tau)
        if t.arc(tau).pending:
            nxt, nxt_slot = current, slot
        else:
            nxt, nxt_slot = next((tid, s) for tid, s in t.occurrences(tau) if tid != current)
        steps.append((current, slot, nxt, nxt_slot))
        current = nxt
    return steps


def build_snake_graph(t: Triangulation, c: CrossingSequence) -> SnakeGraph:
    """由三角剖分与穿越序列构造蛇形图"""
    if c.d == 0:
        t.arc(c.arc)
        logger.info(f"弧 {c.arc} 属于三角剖分，蛇形图为单条边")
        return SnakeGraph(arc=c.arc, tiles=(), edges=(Edge(0, c.arc, (0, 1)),))

    steps = _walk(t, c)
    edge_labels: Dict[int, str] = {}
    edge_ends: Dict[int, Tuple[int, int]] = {}
    edge_places: Dict[int, List[Tuple[int, str]]] = defaultdict(list)
    tiles: List[Tile] = []
    glue: List[int] = []
    attach: List[str] = []
    next_vertex = 0
    next_edge = 0
    shared: Optional[Tuple[str, int]] = None  # (新瓦片中的共享槽位, 边 id)
    corners_seed: Dict[str, int] = {}

    for position, (low, low_slot, up, up_slot) in enumerate(steps, start=1):
        tau, x_low, y_low = t.triangle(low).rotated_at(low_slot)
        _, x, y = t.triangle(up).rotated_at(up_slot)
        if position % 2 == 1:
            labels = (y, x, y_low, x_low)
        else:
            labels = (x, y, x_low, y_low)

        corners = dict(corners_seed)
        for name in CORNERS:
            if name not in corners:
                corners[name] = next_vertex
                next_vertex += 1

        edges = []
        for slot, label in zip(SLOTS, labels):
            if shared is not None and shared[0] == slot:
                eid = shared[1]
                if edge_labels[eid] != label:
                    raise IntegrityError(
                        f"瓦片 {position} 的 {slot} 边标签 {label} 与粘合边标签 {edge_labels[eid]} 不一致"
                    )
            else:
                eid = next_edge
                next_edge += 1
                edge_labels[eid] = label
                a, b = _SLOT_CORNERS[slot]
                edge_ends[eid] = (corners[a], corners[b])
            edge_places[eid].append((position, slot))
            edges.append(eid)

        tile = Tile(
            index=position,
            diagonal=tau,
            labels=labels,
            edges=tuple(edges),
            corners=tuple(corners[name] for name in CORNERS),
        )
        tiles.append(tile)

        if position == c.d:
            break
        following = c.crossings[position]
        if following == x:
            direction = "up" if tile.odd else "right"
        elif following == y:
            direction = "right" if tile.odd else "up"
        else:
            raise StructuralError(
                f"弧 {c.arc} 的第 {position + 1} 个穿越弧 {following} 不是三角形 {up} 中 {tau} 之外的边"
            )
        out_slot, in_slot = _SHARED_SLOT[direction]
        glue.append(tile.edge(out_slot))
        attach.append(direction)
        shared = (in_slot, tile.edge(out_slot))
        if direction == "up":
            corners_seed = {"SW": tile.corner("NW"), "SE": tile.corner("NE")}
        else:
            corners_seed = {"SW": tile.corner("SE"), "NW": tile.corner("NE")}

    edges_out = tuple(
        Edge(
            id=eid,
            label=edge_labels[eid],
            ends=edge_ends[eid],
            tiles=tuple(p for p, _ in edge_places[eid]),
            slots=tuple(s for _, s in edge_places[eid]),
        )
        for eid in sorted(edge_labels)
    )
    graph = SnakeGraph(arc=c.arc, tiles=tuple(tiles), edges=edges_out, glue=tuple(glue), attach=tuple(attach))
    if len(graph.edges) != 3 * c.d + 1 or len(graph.vertices) != 2 * c.d + 2:
        raise IntegrityError(
            f"蛇形图 {c.arc} 形状异常: {len(graph.edges)} 条边, {len(graph.vertices)} 个顶点, d={c.d}"
        )
    logger.info(f"构造蛇形图: 弧 {c.arc}, {c.d} 个瓦片, {len(graph.edges)} 条边")
    return graph


# ---------------------------------------------------------------------------
# 完美匹配
# ---------------------------------------------------------------------------

def is_perfect_matching(g: SnakeGraph, edges: Iterable[int]) -> bool:
    covered: Dict[int, int] = defaultdict(int)
    for eid in edges:
        if eid not in g.edge_map:
            return False
        for v in g.edge_map[eid].ends:
            covered[v] += 1
    return all(covered.get(v, 0) == 1 for v in g.vertices) and set(covered) <= set(g.vertices)


def _require_matching(g: SnakeGraph, p: PerfectMatching) -> None:
    if not is_perfect_matching(g, p.edges):
        raise PreconditionError(f"边集 {sorted(p.edges)} 不是蛇形图 {g.arc} 的完美匹配")


def _disjoint_subsets(g: SnakeGraph, owned: Sequence[int]) -> List[Tuple[Tuple[int, ...], FrozenSet[int]]]:
    options = []
    for size in range(len(owned) + 1):
        for subset in combinations(owned, size):
            touched: Set[int] = set()
            ok = True
            for eid in subset:
                ends = set(g.edge_map[eid].ends)
                if touched & ends:
                    ok = False
                    break
                touched |= ends
            if ok:
                options.append((subset, frozenset(touched)))
    return options


def _frontier_dp(g: SnakeGraph, step):
    """沿瓦片推进的动态规划，状态为下一条粘合边端点中已被覆盖的顶点"""
    states = {frozenset(): step(None, None)}
    previous_glue = None
    for position, tile in enumerate(g.tiles):
        owned = [eid for eid in tile.edges if eid != previous_glue]
        next_glue = g.glue[position] if position < len(g.glue) else None
        keep = frozenset(g.edge_map[next_glue].ends) if next_glue is not None else frozenset()
        must_cover = frozenset(tile.corners) - keep
        options = _disjoint_subsets(g, owned)
        merged = {}
        for covered, payload in states.items():
            for subset, touched in options:
                if touched & covered:
                    continue
                now = covered | touched
                if must_cover - now:
                    continue
                frontier = now & keep
                merged[frontier] = step(merged.get(frontier), (payload, subset))
        states = merged
        previous_glue = next_glue
        yield states


def count_matchings(g: SnakeGraph) -> int:
    """只计数，不受枚举上限约束"""
    if g.d == 0:
        return 1

    def step(acc, item):
        if item is None:
            return acc if acc is not None else 1
        return (acc or 0) + item[0]

    states = {}
    for states in _frontier_dp(g, step):
        pass
    return states.get(frozenset(), 0)


def enumerate_matchings(g: SnakeGraph, limit: Optional[int] = None) -> List[PerfectMatching]:
    """精确枚举全部完美匹配，按排序后的边 id 元组输出"""
    limit = MAX_MATCHINGS if limit is None else limit
    if g.d == 0:
        return [PerfectMatching(frozenset({g.edges[0].id}))]

    def step(acc, item):
        if item is None:
            return acc if acc is not None else [()]
        prefixes, subset = item
        extended = [prefix + subset for prefix in prefixes]
        return extended if acc is None else acc + extended

    states = {}
    for states in _frontier_dp(g, step):
        total = sum(len(v) for v in states.values())
        if total > limit:
            raise PreconditionError(f"蛇形图 {g.arc} 的部分匹配数 {total} 超过上限 {limit}")
    found = [PerfectMatching(frozenset(edges)) for edges in states.get(frozenset(), [])]
    found.sort(key=PerfectMatching.key)
    logger.info(f"弧 {g.arc} 的蛇形图共有 {len(found)} 个完美匹配")
    return found


def _boundary_matching(g: SnakeGraph, ccw: bool) -> PerfectMatching:
    if g.d == 0:
        return PerfectMatching(frozenset({g.edges[0].id}))
    chosen = []
    for edge in g.edges:
        if not edge.is_boundary:
            continue
        tile = g.tile(edge.first_tile)
        slots = tile.ccw_slots if ccw else tile.cw_slots
        if edge.slots[0] in slots:
            chosen.append(edge.id)
    p = PerfectMatching(frozenset(chosen))
    if not is_perfect_matching(g, p.edges):
        raise IntegrityError(f"蛇形图 {g.arc} 的{'最大' if ccw else '最小'}匹配不是完美匹配: {sorted(chosen)}")
    return p


def minimal_matching(g: SnakeGraph) -> PerfectMatching:
    """P_-: 每个瓦片上都落在顺时针一对中的边界边"""
    return _boundary_matching(g, ccw=False)


def maximal_matching(g: SnakeGraph) -> PerfectMatching:
    """P_+: 每个瓦片上都落在逆时针一对中的边界边"""
    return _boundary_matching(g, ccw=True)


def is_boundary_only(g: SnakeGraph, p: PerfectMatching) -> bool:
    return all(g.edge(eid).is_boundary for eid in p.edges)


# ---------------------------------------------------------------------------
# 扭转
# ---------------------------------------------------------------------------

def pair_at(g: SnakeGraph, p: PerfectMatching, s: int) -> Optional[str]:
    """匹配在瓦片 s 上占据的一对边: 'cw'、'ccw' 或 None"""
    tile = g.tile(s)
    inside = {slot for slot, eid in zip(SLOTS, tile.edges) if eid in p.edges}
    if inside == set(tile.cw_slots):
        return "cw"
    if inside == set(tile.ccw_slots):
        return "ccw"
    return None


def can_twist(g: SnakeGraph, p: PerfectMatching, s: int) -> bool:
    return pair_at(g, p, s) is not None


def twist(g: SnakeGraph, p: PerfectMatching, s: int) -> PerfectMatching:
    pair = pair_at(g, p, s)
    if pair is None:
        raise PreconditionError(f"匹配在瓦片 {s} 上没有两条对边，不能扭转")
    tile = g.tile(s)
    old, new = (tile.cw_slots, tile.ccw_slots) if pair == "cw" else (tile.ccw_slots, tile.cw_slots)
    edges = set(p.edges) - {tile.edge(slot) for slot in old}
    edges |= {tile.edge(slot) for slot in new}
    return PerfectMatching(frozenset(edges))


def twist_graph(g: SnakeGraph, matchings: Optional[Sequence[PerfectMatching]] = None) -> nx.Graph:
    """节点为全部完美匹配，边为单次扭转，边属性 tile 为扭转所在瓦片"""
    matchings = enumerate_matchings(g) if matchings is None else matchings
    graph = nx.Graph()
    graph.add_nodes_from(matchings)
    for p in matchings:
        for tile in g.tiles:
            if can_twist(g, p, tile.index):
                graph.add_edge(p, twist(g, p, tile.index), tile=tile.index)
    return graph


# ---------------------------------------------------------------------------
# 分解与重组
# ---------------------------------------------------------------------------

def restrict(g: SnakeGraph, first: int, last: int) -> SnakeGraph:
    """瓦片 first..last 构成的子蛇形图，边 id 与原图一致"""
    if not 1 <= first <= last <= g.d:
        raise PreconditionError(f"瓦片区间 [{first}, {last}] 超出 1..{g.d}")
    window = range(first, last + 1)
    edges = []
    for edge in g.edges:
        places = [(tile, slot) for tile, slot in zip(edge.tiles, edge.slots) if tile in window]
        if places:
            edges.append(Edge(edge.id, edge.label, edge.ends,
                              tuple(p for p, _ in places), tuple(s for _, s in places)))
    return SnakeGraph(
        arc=f"{g.arc}[{first}:{last}]",
        tiles=tuple(g.tile(j) for j in window),
        edges=tuple(edges),
        glue=g.glue[first - 1:last - 1],
        attach=g.attach[first - 1:last - 1],
    )


def _cut_positions(g: SnakeGraph, cut_edges: Sequence[int]) -> List[int]:
    positions = []
    for u in cut_edges:
        if u not in g.glue:
            raise PreconditionError(f"边 e{u} 不是蛇形图 {g.arc} 的粘合边")
        positions.append(g.glue.index(u) + 1)
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise PreconditionError(f"切割边 {list(cut_edges)} 未按位置严格递增给出")
    return positions


def split_snake_graph(g: SnakeGraph, cut_edges: Sequence[int]) -> List[SnakeGraph]:
    positions = _cut_positions(g, cut_edges)
    bounds = [0] + positions + [g.d]
    return [restrict(g, bounds[i] + 1, bounds[i + 1]) for i in range(len(bounds) - 1)]


def _covering_edge(p: PerfectMatching, g: SnakeGraph, vertex: int) -> Edge:
    for eid in p.edges:
        edge = g.edge_map[eid]
        if vertex in edge.ends:
            return edge
    raise IntegrityError(f"顶点 v{vertex} 未被匹配覆盖")


def decompose_matching(g: SnakeGraph, cut_edges: Sequence[int], p: PerfectMatching) -> List[PerfectMatching]:
    """沿粘合边 u_1..u_r 把 P 拆成各段子蛇形图上的匹配，满足 u_i ∈ P_i ∪ P_{i+1}"""
    _require_matching(g, p)
    if not cut_edges:
        return [p]
    positions = _cut_positions(g, cut_edges)
    pieces = split_snake_graph(g, cut_edges)
    bounds = [0] + positions + [g.d]
    parts: List[Set[int]] = [set() for _ in pieces]
    cuts = set(cut_edges)

    def piece_of(tile_index: int) -> int:
        for i in range(len(pieces)):
            if bounds[i] < tile_index <= bounds[i + 1]:
                return i
        raise IntegrityError(f"瓦片 {tile_index} 不属于任何分段")

    for eid in p.edges:
        if eid not in cuts:
            parts[piece_of(g.edge_map[eid].first_tile)].add(eid)
    for i, (u, j) in enumerate(zip(cut_edges, positions)):
        if u in p.edges:
            parts[i].add(u)
            parts[i + 1].add(u)
            continue
        # u 的两个端点由同一侧的边覆盖，u 归另一侧
        if _covering_edge(p, g, g.edge_map[u].ends[0]).first_tile <= j:
            parts[i + 1].add(u)
        else:
            parts[i].add(u)

    result = [PerfectMatching(frozenset(part)) for part in parts]
    for piece, part in zip(pieces, result):
        if not is_perfect_matching(piece, part.edges):
            raise IntegrityError(f"分解得到的 {sorted(part.edges)} 不是 {piece.arc} 的完美匹配")
    return result


def recombine_matching(g: SnakeGraph, cut_edges: Sequence[int], parts: Sequence[PerfectMatching]) -> PerfectMatching:
    """decompose_matching 的逆: (∪P_i) 去掉只出现在一侧的 u_i"""
    if not cut_edges:
        if len(parts) != 1:
            raise PreconditionError(f"无切割边时应只有一段，实际 {len(parts)} 段")
        _require_matching(g, parts[0])
        return parts[0]
    pieces = split_snake_graph(g, cut_edges)
    if len(parts) != len(pieces):
        raise PreconditionError(f"分段数 {len(pieces)} 与子匹配数 {len(parts)} 不一致")
    for piece, part in zip(pieces, parts):
        if not is_perfect_matching(piece, part.edges):
            raise PreconditionError(f"{sorted(part.edges)} 不是 {piece.arc} 的完美匹配")
    union: Set[int] = set()
    for part in parts:
        union |= part.edges
    for i, u in enumerate(cut_edges):
        left, right = u in parts[i], u in parts[i + 1]
        if not (left or right):
            raise PreconditionError(f"粘合边 e{u} 不在相邻两段的子匹配中")
        if left != right:
            union.discard(u)
    p = PerfectMatching(frozenset(union))
    _require_matching(g, p)
    return p


# ---------------------------------------------------------------------------
# τ 等价类
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TauClass:
    kind: str                 # I, II, III, IV
    edges: Tuple[int, ...]
    tiles: Tuple[int, ...]    # 类中边所接触的 τ 对角线所在瓦片


def edge_order_key(g: SnakeGraph, edge_id: int) -> Tuple[int, int, int, int]:
    """匹配边的全序: 首个瓦片、末个瓦片，同一瓦片内逆时针一对在前"""
    edge = g.edge(edge_id)
    if not edge.tiles:
        return 0, 0, 0, 0
    tile = g.tile(edge.first_tile)
    slot = edge.slots[0]
    return edge.first_tile, edge.last_tile, 0 if slot in tile.ccw_slots else 1, SLOTS.index(slot)


def tau_equivalence(g: SnakeGraph, tau: str) -> List[TauClass]:
    """标签为 τ 的边按是否接触同一条 τ 对角线的端点分组"""
    tau_edges = [edge for edge in g.edges if edge.label == tau]
    if not tau_edges:
        return []
    linked = nx.Graph()
    linked.add_nodes_from(edge.id for edge in tau_edges)
    touched: Dict[int, Set[int]] = defaultdict(set)
    for tile in g.tiles:
        if tile.diagonal != tau:
            continue
        ends = set(tile.diagonal_ends)
        group = [edge.id for edge in tau_edges if ends & set(edge.ends)]
        for eid in group:
            touched[eid].add(tile.index)
        nx.add_path(linked, group)

    classes = []
    for component in nx.connected_components(linked):
        members = sorted(component, key=lambda eid: edge_order_key(g, eid))
        tiles = tuple(sorted(set().union(*(touched[eid] for eid in members))))
        if len(members) == 1:
            kind = "III" if tiles else "IV"
        elif len(members) == 2:
            a, b = (set(g.edge(eid).ends) for eid in members)
            kind = "II" if a & b else "I"
        else:
            raise IntegrityError(f"τ={tau} 的等价类含 {len(members)} 条边: {members}")
        classes.append(TauClass(kind=kind, edges=tuple(members), tiles=tiles))
    classes.sort(key=lambda cls: edge_order_key(g, cls.edges[0]))
    return classes


def nu_signature(g: SnakeGraph, tau: str, p: PerfectMatching,
                 classes: Optional[Sequence[TauClass]] = None) -> Tuple[int, ...]:
    """ν_j = 类 j 中属于 P 的边数，I/II/III 型再减一"""
    classes = tau_equivalence(g, tau) if classes is None else classes
    signature = []
    for cls in classes:
        inside = sum(1 for eid in cls.edges if eid in p.edges)
        signature.append(inside if cls.kind == "IV" else inside - 1)
    return tuple(signature)


# ---------------------------------------------------------------------------
# DOT 导出
# ---------------------------------------------------------------------------

def _quote(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(g: SnakeGraph, matching: Optional[PerfectMatching] = None, name: Optional[str] = None) -> str:
    """瓦片为子图簇，对角线虚线，匹配边加粗；节点 v{k}，边 e{k}"""
    lines = [f'graph "{_quote(name or "snake_" + g.arc)}" {{', "  node [shape=point];"]
    placed: Set[int] = set()
    for tile in g.tiles:
        lines.append(f"  subgraph cluster_tile{tile.index} {{")
        lines.append(f'    label="{tile.index}: {_quote(tile.diagonal)}";')
        for v in tile.corners:
            if v not in placed:
                placed.add(v)
                lines.append(f"    v{v};")
        nw, se = tile.diagonal_ends
        lines.append(f'    v{nw} -- v{se} [style=dashed, label="{_quote(tile.diagonal)}"];')
        lines.append("  }")
    for v in g.vertices:
        if v not in placed:
            lines.append(f"  v{v};")
    for edge in g.edges:
        attrs = [f'id="e{edge.id}"', f'label="{_quote(edge.label)}"']
        if matching is not None and edge.id in matching.edges:
            attrs.append("style=bold")
        a, b = edge.ends
        lines.append(f"  v{a} -- v{b} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
