"""
场景文件读写与场景生成

场景文件是带版本号的 JSON 文档 (扩展名 .scn)，规范写法: 顶层键各占一行，
列表中每个元素压缩为一行。校验错误带 1 起的行号。
"""
import json
import os
from collections import deque
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from config import DEFAULT_FLIP_DEPTH, SCENARIO_DIR, SCENARIO_SUFFIX, SCENARIO_VERSION
from errors import PreconditionError, QclError, ScenarioError
from logging_setup import logger
from schemas import (
    ArcSpec,
    FlipPathSpec,
    NamedArcSpec,
    ScenarioDocument,
    SeedKind,
    SeedSpec,
    TriangleSpec,
)
from seed_core import (
    Arc,
    ExtendedExchangeMatrix,
    LambdaForm,
    Triangle,
    Triangulation,
    build_principal_quantization,
    quantum_seed,
    signed_adjacency,
    weight_symmetrizer,
)
from snake_graph import CrossingSequence, build_snake_graph
from verification import FlipPath, Scenario, clusters_along

_SECTIONS = ("version", "name", "description", "arcs", "triangles", "seed", "named_arcs", "flip_paths")


# ---------------------------------------------------------------------------
# 行号定位
# ---------------------------------------------------------------------------

def _value_lines(text: str) -> Dict[Tuple, int]:
    """扫描合法 JSON 文本，记录每个值 (按路径) 起始的行号"""
    lines: Dict[Tuple, int] = {}
    stack: List[list] = []  # [kind, 当前键或下标, 是否等待键]
    line = 1
    i, n = 0, len(text)

    def record():
        lines.setdefault(tuple(entry[1] for entry in stack), line)

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch in " \t\r:":
            i += 1
        elif ch == '"':
            j = i + 1
            while text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if stack and stack[-1][0] == "object" and stack[-1][2]:
                stack[-1][1] = json.loads(text[i:j + 1])
                stack[-1][2] = False
            else:
                record()
            i = j + 1
        elif ch in "{[":
            record()
            stack.append(["object", None, True] if ch == "{" else ["array", 0, False])
            i += 1
        elif ch in "}]":
            stack.pop()
            i += 1
        elif ch == ",":
            if stack[-1][0] == "array":
                stack[-1][1] += 1
            else:
                stack[-1][2] = True
            i += 1
        else:
            record()
            while i < n and text[i] not in ",]}\n \t\r":
                i += 1
    return lines


def _line_of(lines: Dict[Tuple, int], path: Sequence) -> Optional[int]:
    path = tuple(path)
    while path:
        if path in lines:
            return lines[path]
        path = path[:-1]
    return lines.get(())


# ---------------------------------------------------------------------------
# 文档 <-> 场景
# ---------------------------------------------------------------------------

def _locate_structural(doc: ScenarioDocument, lines: Dict[Tuple, int], detail: str) -> Optional[int]:
    for index, tri in enumerate(doc.triangles):
        if f"三角形 {tri.id} " in f"{detail} ":
            return _line_of(lines, ("triangles", index))
    for index, arc in enumerate(doc.arcs):
        if f"弧 {arc.id} " in f"{detail} " or detail.endswith(f": {arc.id}"):
            return _line_of(lines, ("arcs", index))
    return _line_of(lines, ("triangles",))


def _build_seed(doc: ScenarioDocument, t: Triangulation):
    spec = doc.seed
    if spec.kind == SeedKind.PRINCIPAL.value:
        # 缺省取弧的权重
        symmetrizer = weight_symmetrizer(t) if spec.symmetrizer is None else spec.symmetrizer
        return build_principal_quantization(signed_adjacency(t), symmetrizer), True
    if spec.btilde is None or spec.lambda_ is None:
        raise ScenarioError("explicit 种子必须同时给出 btilde 与 lambda")
    btilde = ExtendedExchangeMatrix(spec.btilde)
    if btilde.n != t.n:
        raise ScenarioError(f"btilde 有 {btilde.n} 列，而三角剖分有 {t.n} 条可变弧")
    if btilde.principal_part.tolist() != signed_adjacency(t).tolist():
        raise ScenarioError("btilde 的前 n 行与三角剖分的带符号邻接矩阵不一致")
    return quantum_seed(btilde, LambdaForm(spec.lambda_)), False


def scenario_from_document(doc: ScenarioDocument, lines: Optional[Dict[Tuple, int]] = None) -> Scenario:
    """校验文档并组装场景，错误信息带行号"""
    lines = lines or {}
    if doc.version != SCENARIO_VERSION:
        raise ScenarioError(f"不支持的格式版本 {doc.version}，当前为 {SCENARIO_VERSION}",
                            _line_of(lines, ("version",)))
    try:
        t = Triangulation(
            arcs=tuple(Arc(a.id, a.label, a.weight, a.boundary, a.pending) for a in doc.arcs),
            triangles=tuple(Triangle(tri.id, tuple(tri.sides)) for tri in doc.triangles),
        )
    except QclError as e:
        raise ScenarioError(e.detail, _locate_structural(doc, lines, e.detail))

    try:
        seed, principal = _build_seed(doc, t)
    except QclError as e:
        raise ScenarioError(e.detail, _line_of(lines, ("seed",)))

    named: Dict[str, CrossingSequence] = {}
    for index, spec in enumerate(doc.named_arcs):
        where = _line_of(lines, ("named_arcs", index))
        if spec.name in t.arc_map:
            raise ScenarioError(f"命名弧 {spec.name} 与三角剖分中的弧重名", where)
        if spec.name in named:
            raise ScenarioError(f"命名弧 {spec.name} 重复", where)
        c = CrossingSequence(spec.name, tuple(spec.crossings), spec.pending, spec.start_triangle)
        try:
            build_snake_graph(t, c)
        except QclError as e:
            raise ScenarioError(e.detail, where)
        named[spec.name] = c

    scenario = Scenario(name=doc.name, triangulation=t, seed=seed, named_arcs=named,
                        description=doc.description, principal=principal)
    for index, spec in enumerate(doc.flip_paths):
        where = _line_of(lines, ("flip_paths", index))
        path = FlipPath(spec.name, tuple(spec.directions), tuple(spec.new_arcs))
        if any(other.name == path.name for other in scenario.flip_paths):
            raise ScenarioError(f"翻转路径 {path.name} 重复", where)
        try:
            clusters_along(scenario, path)
            for arc in path.new_arcs:
                scenario.crossing_sequence(arc)
        except QclError as e:
            raise ScenarioError(e.detail, where)
        scenario.flip_paths.append(path)
    return scenario


def document_from_scenario(s: Scenario) -> ScenarioDocument:
    t = s.triangulation
    if s.principal:
        seed = SeedSpec(kind=SeedKind.PRINCIPAL, symmetrizer=list(s.seed.symmetrizer))
    else:
        seed = SeedSpec(kind=SeedKind.EXPLICIT, btilde=s.seed.btilde.to_list(), lambda_=s.seed.lambda_.to_list())
    return ScenarioDocument(
        version=SCENARIO_VERSION,
        name=s.name,
        description=s.description,
        arcs=[ArcSpec(id=a.id, label=a.label, weight=a.weight, boundary=a.boundary, pending=a.pending)
              for a in t.arcs],
        triangles=[TriangleSpec(id=tri.id, sides=list(tri.sides)) for tri in t.triangles],
        seed=seed,
        named_arcs=[NamedArcSpec(name=name, pending=c.pending, crossings=list(c.crossings),
                                 start_triangle=c.start_triangle)
                    for name, c in s.named_arcs.items()],
        flip_paths=[FlipPathSpec(name=p.name, directions=list(p.directions), new_arcs=list(p.new_arcs))
                    for p in s.flip_paths],
    )


def serialize_document(doc: ScenarioDocument) -> str:
    data = doc.model_dump(mode="json", by_alias=True, exclude_none=True)
    out = ["{"]
    for position, key in enumerate(_SECTIONS):
        value = data[key]
        tail = "," if position < len(_SECTIONS) - 1 else ""
        if isinstance(value, list) and value:
            out.append(f'  "{key}": [')
            items = [json.dumps(item, ensure_ascii=False) for item in value]
            out.extend(f"    {item}," for item in items[:-1])
            out.append(f"    {items[-1]}")
            out.append(f"  ]{tail}")
        else:
            out.append(f'  "{key}": {json.dumps(value, ensure_ascii=False)}{tail}')
    out.append("}")
    return "\n".join(out) + "\n"


def serialize_scenario(s: Scenario) -> str:
    return serialize_document(document_from_scenario(s))


def parse_document(text: str) -> Tuple[ScenarioDocument, Dict[Tuple, int]]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"JSON 语法错误: {e.msg}", e.lineno)
    if not isinstance(raw, dict):
        raise ScenarioError("场景文件顶层必须是对象", 1)
    lines = _value_lines(text)
    try:
        doc = ScenarioDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ScenarioError(f"{where}: {first['msg']}", _line_of(lines, first["loc"]))
    return doc, lines


def parse_scenario_text(text: str) -> Scenario:
    doc, lines = parse_document(text)
    return scenario_from_document(doc, lines)


def parse_scenario(path: str) -> Scenario:
    """读取并校验场景文件"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ScenarioError(f"无法读取场景文件 {path}: {e.strerror}")
    scenario = parse_scenario_text(text)
    logger.info(f"载入场景 {scenario.name}: {path}")
    return scenario


def resolve_scenario_path(ref: str) -> str:
    """路径直接使用，裸名称到场景目录下查找"""
    if os.path.isfile(ref):
        return ref
    name = ref if ref.endswith(SCENARIO_SUFFIX) else ref + SCENARIO_SUFFIX
    candidate = os.path.join(SCENARIO_DIR, name)
    if os.path.isfile(candidate):
        return candidate
    raise ScenarioError(f"未找到场景 {ref}")


def load_scenario(ref: str) -> Scenario:
    return parse_scenario(resolve_scenario_path(ref))


def list_bundled() -> List[str]:
    if not os.path.isdir(SCENARIO_DIR):
        return []
    return sorted(f[: -len(SCENARIO_SUFFIX)] for f in os.listdir(SCENARIO_DIR) if f.endswith(SCENARIO_SUFFIX))


# ---------------------------------------------------------------------------
# 多边形场景
# ---------------------------------------------------------------------------

def _diagonal_id(a: int, b: int) -> str:
    a, b = min(a, b), max(a, b)
    return f"d{a}_{b}"


def _boundary_id(a: int, b: int) -> str:
    a, b = min(a, b), max(a, b)
    return f"b{a}_{b}"


def _triangle_id(tri: Tuple[int, int, int]) -> str:
    return "t" + "_".join(str(v) for v in sorted(tri))


def _fan(n: int, apex: int) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int, int]]]:
    others = [(apex + step) % n for step in range(1, n)]
    diagonals = [(apex, v) for v in others[1:-1]]
    triangles = [(apex, others[i], others[i + 1]) for i in range(n - 2)]
    return diagonals, triangles


def _zigzag(n: int) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int, int]]]:
    order = [0]
    low, high = 1, n - 1
    while len(order) < n:
        order.append(low)
        low += 1
        if len(order) < n:
            order.append(high)
            high -= 1
    diagonals = [(order[i], order[i + 1]) for i in range(1, n - 2)]
    triangles = [(order[i], order[i + 1], order[i + 2]) for i in range(n - 2)]
    return diagonals, triangles


class _Polygon:
    """凸多边形三角剖分的组合几何，顶点 0..n-1 按逆时针编号"""

    def __init__(self, n: int, diagonals: Sequence[Tuple[int, int]], triangles: Sequence[Tuple[int, int, int]]):
        self.n = n
        self.diagonals = {tuple(sorted(d)) for d in diagonals}
        self.triangles = [tuple(sorted(tri)) for tri in triangles]

    def _edge_id(self, a: int, b: int) -> str:
        return _diagonal_id(a, b) if tuple(sorted((a, b))) in self.diagonals else _boundary_id(a, b)

    def _across(self, a: int, b: int, current: Tuple[int, int, int]) -> Tuple[int, int, int]:
        for tri in self.triangles:
            if tri != current and a in tri and b in tri:
                return tri
        raise PreconditionError(f"边 ({a},{b}) 另一侧没有三角形")

    def crossings(self, i: int, j: int) -> Tuple[List[str], Optional[str]]:
        """对角线 (i, j) 依次穿越的弧，以及起始三角形"""
        if tuple(sorted((i, j))) in self.diagonals or (j - i) % self.n in (1, self.n - 1):
            return [], None
        rel = lambda v: (v - i) % self.n
        start = None
        for tri in self.triangles:
            if i not in tri:
                continue
            u, v = sorted((x for x in tri if x != i), key=rel)
            if rel(u) < rel(j) < rel(v):
                start = tri
                break
        if start is None:
            raise PreconditionError(f"找不到对角线 ({i},{j}) 的起始三角形")
        crossed = []
        current = start
        while True:
            crossed.append(self._edge_id(u, v))
            current = self._across(u, v, current)
            w = next(x for x in current if x not in (u, v))
            if w == j:
                break
            if rel(j) < rel(w):
                v = w
            else:
                u = w
        return crossed, _triangle_id(start)

    def flip(self, a: int, b: int) -> Tuple[int, int]:
        """翻转对角线 (a, b)，返回新对角线"""
        sides = [tri for tri in self.triangles if a in tri and b in tri]
        c, d = (next(x for x in tri if x not in (a, b)) for tri in sides)
        self.triangles = [tri for tri in self.triangles if tri not in sides]
        self.triangles += [tuple(sorted((a, c, d))), tuple(sorted((b, c, d)))]
        self.diagonals.discard(tuple(sorted((a, b))))
        self.diagonals.add(tuple(sorted((c, d))))
        return tuple(sorted((c, d)))


def _covering_paths(n_vertices: int, diagonals: Sequence[Tuple[int, int]],
                    triangles: Sequence[Tuple[int, int, int]]) -> List[FlipPath]:
    """广度优先翻转，直到每条对角线都至少作为新弧出现一次；每条路径止于首次出现处"""
    start = tuple(tuple(sorted(d)) for d in diagonals)
    missing = {(i, j) for i in range(n_vertices) for j in range(i + 2, n_vertices)
               if (i, j) != (0, n_vertices - 1)} - set(start)
    queue = deque([((), (), start, tuple(triangles))])
    seen = {frozenset(start)}
    paths = []
    while queue and missing:
        directions, created, cluster, tris = queue.popleft()
        for k in range(1, len(cluster) + 1):
            walker = _Polygon(n_vertices, cluster, tris)
            new = walker.flip(*cluster[k - 1])
            following = cluster[:k - 1] + (new,) + cluster[k:]
            if frozenset(following) in seen:
                continue
            seen.add(frozenset(following))
            step = (directions + (k,), created + (_diagonal_id(*new),), following, tuple(walker.triangles))
            queue.append(step)
            if new in missing:
                missing.discard(new)
                paths.append(FlipPath("cover_" + "_".join(str(d) for d in step[0]), step[0], step[1]))
    return paths


def _polygon_triangulation(polygon: _Polygon, diagonals: Sequence[Tuple[int, int]]) -> Triangulation:
    n = polygon.n
    arcs = [Arc(_diagonal_id(a, b), _diagonal_id(a, b)) for a, b in diagonals]
    arcs += [Arc(_boundary_id(v, (v + 1) % n), _boundary_id(v, (v + 1) % n), boundary=True) for v in range(n)]
    triangles = []
    for a, b, c in polygon.triangles:
        # 逆时针顶点 a<b<c 对应顺时针边序 (ac, bc, ab)
        sides = (polygon._edge_id(a, c), polygon._edge_id(b, c), polygon._edge_id(a, b))
        triangles.append(Triangle(_triangle_id((a, b, c)), sides))
    return Triangulation(arcs=tuple(arcs), triangles=tuple(triangles))


def generate_polygon(n_vertices: int, fan_apex: int = 0, kind: str = "fan",
                     depth: Optional[int] = None, cover: bool = False) -> Scenario:
    """凸多边形的扇形或锯齿三角剖分场景，主系数量子化 D = I

    depth 给出全部不含相邻重复方向的翻转路径；cover 另加一组路径，使每条对角线都被翻出一次
    """
    depth = DEFAULT_FLIP_DEPTH if depth is None else depth
    if n_vertices < 4:
        raise PreconditionError(f"多边形至少需要 4 个顶点，实际 {n_vertices}")
    if depth < 0:
        raise PreconditionError(f"翻转深度 {depth} 不能为负")
    if kind == "fan":
        if not 0 <= fan_apex < n_vertices:
            raise PreconditionError(f"扇形中心 {fan_apex} 超出 0..{n_vertices - 1}")
        diagonals, triangles = _fan(n_vertices, fan_apex)
        name = f"polygon{n_vertices}_fan" + (str(fan_apex) if fan_apex else "")
    elif kind == "zigzag":
        diagonals, triangles = _zigzag(n_vertices)
        name = f"polygon{n_vertices}_zigzag"
    else:
        raise PreconditionError(f"未知三角剖分类型 {kind}")

    polygon = _Polygon(n_vertices, diagonals, triangles)
    t = _polygon_triangulation(polygon, diagonals)
    seed = build_principal_quantization(signed_adjacency(t), weight_symmetrizer(t))

    named: Dict[str, CrossingSequence] = {}
    for i in range(n_vertices):
        for j in range(i + 2, n_vertices):
            if (i, j) == (0, n_vertices - 1) or (i, j) in polygon.diagonals:
                continue
            crossed, start = polygon.crossings(i, j)
            named[_diagonal_id(i, j)] = CrossingSequence(_diagonal_id(i, j), tuple(crossed), start_triangle=start)

    paths = []
    n = len(diagonals)
    for directions in product(range(1, n + 1), repeat=depth):
        if depth == 0 or any(a == b for a, b in zip(directions, directions[1:])):
            continue
        walker = _Polygon(n_vertices, diagonals, triangles)
        cluster = [tuple(sorted(d)) for d in diagonals]
        created = []
        for k in directions:
            new = walker.flip(*cluster[k - 1])
            cluster[k - 1] = new
            created.append(_diagonal_id(*new))
        paths.append(FlipPath("flip_" + "_".join(str(k) for k in directions), tuple(directions), tuple(created)))
    if cover:
        paths += _covering_paths(n_vertices, diagonals, triangles)

    description = f"{n_vertices} 边形的{'扇形' if kind == 'fan' else '锯齿'}三角剖分，翻转深度 {depth}"
    if cover:
        description += "，含覆盖全部对角线的翻转路径"
    scenario = Scenario(name=name, triangulation=t, seed=seed, named_arcs=named,
                        flip_paths=paths, description=description, principal=True)
    logger.info(f"生成多边形场景 {name}: {len(named)} 条命名弧, {len(paths)} 条翻转路径")
    return scenario
