"""
种子核心模块

交换矩阵、量子化相容对 (B̃, Λ)、二者的变异，以及轨形三角剖分的带符号邻接矩阵。
所有对外的方向参数 k 均按 1..n 计数。
"""
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import seed_checks_mode
from errors import DimensionError, IntegrityError, PreconditionError, StructuralError
from logging_setup import logger


def _frozen_int_matrix(entries, name: str) -> np.ndarray:
    arr = np.array(entries, dtype=np.int64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} 必须是二维整数矩阵，实际维数 {arr.ndim}")
    arr.setflags(write=False)
    return arr


def _check_direction(k: int, n: int) -> int:
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise PreconditionError(f"变异方向 k={k} 超出范围 1..{n}")
    return int(k) - 1


@dataclass(frozen=True, eq=False)
class ExtendedExchangeMatrix:
    """m×n 扩充交换矩阵，前 n 行可变，后 m-n 行冻结"""
    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_int_matrix(self.entries, "B̃")
        m, n = arr.shape
        if n < 1 or m < n:
            raise DimensionError(f"B̃ 的形状 {m}×{n} 不满足 m ≥ n ≥ 1")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return int(self.entries.shape[1])

    @property
    def m(self) -> int:
        return int(self.entries.shape[0])

    @property
    def principal_part(self) -> np.ndarray:
        return self.entries[: self.n, :]

    def column(self, k: int) -> np.ndarray:
        return self.entries[:, _check_direction(k, self.n)]

    def column_parts(self, k: int) -> Tuple[np.ndarray, np.ndarray]:
        """第 k 列的正部 (b_k)_+ 与负部 (b_k)_-，均为长度 m 的非负向量"""
        col = self.column(k)
        return np.maximum(col, 0), np.maximum(-col, 0)

    def to_list(self) -> List[List[int]]:
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, ExtendedExchangeMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.array_equal(self.entries, other.entries))

    def __repr__(self):
        return f"ExtendedExchangeMatrix({self.to_list()})"


@dataclass(frozen=True, eq=False)
class LambdaForm:
    """m×m 反对称整数矩阵，对应双线性型 Λ(a,b) = aᵀΛb"""
    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_int_matrix(self.entries, "Λ")
        if arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"Λ 必须是方阵，实际形状 {arr.shape[0]}×{arr.shape[1]}")
        if not np.array_equal(arr, -arr.T):
            raise PreconditionError("Λ 不是反对称矩阵")
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return int(self.entries.shape[0])

    def form(self, a: Sequence[int], b: Sequence[int]) -> int:
        if len(a) != self.m or len(b) != self.m:
            raise DimensionError(f"指数向量长度 {len(a)}/{len(b)} 与 Λ 的维数 {self.m} 不一致")
        return int(np.asarray(a, dtype=np.int64) @ self.entries @ np.asarray(b, dtype=np.int64))

    def to_list(self) -> List[List[int]]:
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, LambdaForm):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.array_equal(self.entries, other.entries))

    def __repr__(self):
        return f"LambdaForm({self.to_list()})"


@dataclass(frozen=True)
class CompatibilityReport:
    """相容性检查结果，失败时定位第一个违例元素 (行主序，1 起计数)"""
    ok: bool
    symmetrizer: Optional[Tuple[int, ...]] = None
    entry: Optional[Tuple[int, int]] = None
    value: Optional[int] = None
    message: str = ""


@dataclass(frozen=True)
class QuantumSeed:
    """相容对 (B̃, Λ) 及对称化子 D"""
    btilde: ExtendedExchangeMatrix
    lambda_: LambdaForm
    symmetrizer: Tuple[int, ...]

    @property
    def n(self) -> int:
        return self.btilde.n

    @property
    def m(self) -> int:
        return self.btilde.m


def check_compatibility(btilde: ExtendedExchangeMatrix, lambda_: LambdaForm) -> CompatibilityReport:
    """计算 B̃ᵀΛ，判断其是否等于 (D 0) 且 D 为正对角阵"""
    if lambda_.m != btilde.m:
        raise DimensionError(f"Λ 为 {lambda_.m}×{lambda_.m}，而 B̃ 有 {btilde.m} 行")
    product = btilde.entries.T @ lambda_.entries
    n, m = product.shape
    for i in range(n):
        for j in range(m):
            value = int(product[i, j])
            if i == j and value <= 0:
                return CompatibilityReport(
                    ok=False, entry=(i + 1, j + 1), value=value,
                    message=f"(B̃ᵀΛ)[{i + 1},{j + 1}] = {value}，对角元必须为正",
                )
            if i != j and value != 0:
                return CompatibilityReport(
                    ok=False, entry=(i + 1, j + 1), value=value,
                    message=f"(B̃ᵀΛ)[{i + 1},{j + 1}] = {value}，非对角元必须为 0",
                )
    return CompatibilityReport(ok=True, symmetrizer=tuple(int(product[i, i]) for i in range(n)))


def _reverify(btilde: ExtendedExchangeMatrix, lambda_: LambdaForm,
              expected: Optional[Tuple[int, ...]], context: str) -> CompatibilityReport:
    report = check_compatibility(btilde, lambda_)
    failure = None
    if not report.ok:
        failure = report.message
    elif expected is not None and report.symmetrizer != tuple(expected):
        failure = f"对称化子由 {tuple(expected)} 变为 {report.symmetrizer}"
    if failure:
        if seed_checks_mode() == "warn":
            logger.warning(f"{context} 后相容性复检失败: {failure}")
        else:
            raise IntegrityError(f"{context} 后相容性复检失败: {failure}")
    return report


def quantum_seed(btilde: ExtendedExchangeMatrix, lambda_: LambdaForm) -> QuantumSeed:
    """由显式给出的 (B̃, Λ) 组装量子种子，不相容时报前置条件错误"""
    report = check_compatibility(btilde, lambda_)
    if not report.ok:
        raise PreconditionError(f"(B̃, Λ) 不相容: {report.message}")
    return QuantumSeed(btilde=btilde, lambda_=lambda_, symmetrizer=report.symmetrizer)


def build_principal_quantization(B, D: Sequence[int]) -> QuantumSeed:
    """主系数量子化: B̃ = (Bᵀ I)ᵀ, Λ = [[0, -D], [D, -DB]]"""
    b = np.array(B, dtype=np.int64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionError(f"B 必须是方阵，实际形状 {b.shape}")
    n = b.shape[0]
    if len(D) != n:
        raise DimensionError(f"对称化子长度 {len(D)} 与 B 的阶数 {n} 不一致")
    if any(int(d) <= 0 for d in D):
        raise PreconditionError(f"对称化子 {tuple(D)} 必须全为正整数")
    d = np.diag(np.array(D, dtype=np.int64))
    db = d @ b
    if not np.array_equal(db, -db.T):
        raise PreconditionError("D·B 不是反对称矩阵")

    btilde = ExtendedExchangeMatrix(np.vstack([b, np.eye(n, dtype=np.int64)]))
    zero = np.zeros((n, n), dtype=np.int64)
    lam = LambdaForm(np.block([[zero, -d], [d, -db]]))
    report = _reverify(btilde, lam, tuple(int(x) for x in D), "主系数量子化")
    logger.info(f"构造主系数量子种子: n={n}, D={tuple(int(x) for x in D)}")
    return QuantumSeed(btilde=btilde, lambda_=lam, symmetrizer=report.symmetrizer or tuple(int(x) for x in D))


def mutate_matrix(btilde: ExtendedExchangeMatrix, k: int) -> ExtendedExchangeMatrix:
    """矩阵变异 μ_k"""
    k0 = _check_direction(k, btilde.n)
    b = btilde.entries
    col = b[:, k0]
    row = b[k0, :]
    new = (b
           + np.outer(np.maximum(col, 0), np.maximum(row, 0))
           - np.outer(np.maximum(-col, 0), np.maximum(-row, 0)))
    new[:, k0] = -col
    new[k0, :] = -row
    return ExtendedExchangeMatrix(new)


def mutate_lambda(seed: QuantumSeed, k: int) -> LambdaForm:
    """Λ 的变异: Λ'_{ik} = Λ(e_i, -e_k + Σ_l [b_lk]_+ e_l)，其余元素不变"""
    k0 = _check_direction(k, seed.n)
    lam = seed.lambda_.entries
    shifted = np.maximum(seed.btilde.entries[:, k0], 0).astype(np.int64)
    shifted[k0] -= 1
    new_col = lam @ shifted
    new = lam.copy()
    new[:, k0] = new_col
    new[k0, :] = -new_col
    new[k0, k0] = 0
    lam_new = LambdaForm(new)
    _reverify(mutate_matrix(seed.btilde, k), lam_new, seed.symmetrizer, f"Λ 沿方向 {k} 变异")
    return lam_new


def mutate_seed(seed: QuantumSeed, k: int) -> QuantumSeed:
    """同时变异 B̃ 与 Λ，对称化子保持不变"""
    return QuantumSeed(
        btilde=mutate_matrix(seed.btilde, k),
        lambda_=mutate_lambda(seed, k),
        symmetrizer=seed.symmetrizer,
    )


# ---------------------------------------------------------------------------
# 轨形三角剖分
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    id: str
    label: str
    weight: int = 1
    boundary: bool = False
    pending: bool = False


@dataclass(frozen=True)
class Triangle:
    """三角形，sides 按轨形定向下的顺时针循环顺序存放"""
    id: str
    sides: Tuple[str, str, str]

    def side(self, slot: int) -> str:
        return self.sides[slot % 3]

    def rotated_at(self, slot: int) -> Tuple[str, str, str]:
        """从 slot 处的边开始按顺时针读出三条边 (τ, x, y)，x 顺时针紧随 τ"""
        return self.side(slot), self.side(slot + 1), self.side(slot + 2)


@dataclass(frozen=True)
class Triangulation:
    arcs: Tuple[Arc, ...]
    triangles: Tuple[Triangle, ...]

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "triangles", tuple(self.triangles))
        _validate_triangulation(self)

    @cached_property
    def arc_map(self) -> Dict[str, Arc]:
        return {arc.id: arc for arc in self.arcs}

    @cached_property
    def triangle_map(self) -> Dict[str, Triangle]:
        return {tri.id: tri for tri in self.triangles}

    @cached_property
    def mutable_arcs(self) -> Tuple[str, ...]:
        return tuple(arc.id for arc in self.arcs if not arc.boundary)

    @property
    def n(self) -> int:
        return len(self.mutable_arcs)

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {arc_id: i for i, arc_id in enumerate(self.mutable_arcs)}

    @cached_property
    def _occurrences(self) -> Dict[str, Tuple[Tuple[str, int], ...]]:
        found: Dict[str, List[Tuple[str, int]]] = {arc.id: [] for arc in self.arcs}
        for tri in self.triangles:
            for slot, side in enumerate(tri.sides):
                found[side].append((tri.id, slot))
        return {key: tuple(value) for key, value in found.items()}

    def arc(self, arc_id: str) -> Arc:
        if arc_id not in self.arc_map:
            raise StructuralError(f"未知弧 {arc_id}")
        return self.arc_map[arc_id]

    def triangle(self, tri_id: str) -> Triangle:
        if tri_id not in self.triangle_map:
            raise StructuralError(f"未知三角形 {tri_id}")
        return self.triangle_map[tri_id]

    def index_of(self, arc_id: str) -> int:
        """可变弧的 0 起下标，边界弧没有下标"""
        if arc_id not in self._index:
            raise StructuralError(f"弧 {arc_id} 不是三角剖分中的可变弧")
        return self._index[arc_id]

    def is_boundary(self, arc_id: str) -> bool:
        return self.arc(arc_id).boundary

    def weight(self, arc_id: str) -> int:
        return self.arc(arc_id).weight

    def occurrences(self, arc_id: str) -> Tuple[Tuple[str, int], ...]:
        """弧作为三角形边出现的位置 (三角形 id, 槽位)"""
        self.arc(arc_id)
        return self._occurrences[arc_id]


def _validate_triangulation(t: Triangulation) -> None:
    if not t.triangles:
        raise StructuralError("三角形列表为空")
    seen = Counter(arc.id for arc in t.arcs)
    duplicated = [arc_id for arc_id, count in seen.items() if count > 1]
    if duplicated:
        raise StructuralError(f"弧 id 重复: {duplicated[0]}")
    tri_seen = Counter(tri.id for tri in t.triangles)
    duplicated = [tri_id for tri_id, count in tri_seen.items() if count > 1]
    if duplicated:
        raise StructuralError(f"三角形 id 重复: {duplicated[0]}")

    for arc in t.arcs:
        if arc.weight not in (1, 2):
            raise StructuralError(f"弧 {arc.id} 的权重 {arc.weight} 不在 {{1, 2}} 中")
        if arc.boundary and arc.pending:
            raise StructuralError(f"边界弧 {arc.id} 不能是悬挂弧")
        if arc.pending and arc.weight != 2:
            raise StructuralError(f"悬挂弧 {arc.id} 的权重必须为 2")
        if not arc.pending and arc.weight != 1:
            raise StructuralError(f"非悬挂弧 {arc.id} 的权重必须为 1")

    counts: Counter = Counter()
    for tri in t.triangles:
        if len(tri.sides) != 3:
            raise StructuralError(f"三角形 {tri.id} 必须恰有三条边")
        for side in tri.sides:
            if side not in seen:
                raise StructuralError(f"三角形 {tri.id} 引用了未知弧 {side}")
        if len(set(tri.sides)) < 3:
            raise StructuralError(f"三角形 {tri.id} 是自折三角形 (重复的边 {tri.sides})")
        counts.update(tri.sides)

    for arc in t.arcs:
        expected = 1 if (arc.boundary or arc.pending) else 2
        if counts[arc.id] != expected:
            raise StructuralError(
                f"弧 {arc.id} 作为三角形边出现 {counts[arc.id]} 次，应为 {expected} 次"
            )


def signed_adjacency(t: Triangulation) -> np.ndarray:
    """带符号邻接矩阵 B^T，只保留可变弧的行列"""
    n = t.n
    b = np.zeros((n, n), dtype=np.int64)
    mutable = set(t.mutable_arcs)
    for tri in t.triangles:
        for slot in range(3):
            tau, follower = tri.side(slot), tri.side(slot + 1)
            if tau not in mutable or follower not in mutable:
                continue
            i, j = t.index_of(tau), t.index_of(follower)
            # follower 顺时针紧随 tau
            b[i, j] += t.weight(follower)
            b[j, i] -= t.weight(tau)
    return b


def weight_symmetrizer(t: Triangulation) -> Tuple[int, ...]:
    """D^T = diag(w(τ_1), ..., w(τ_n))"""
    return tuple(t.weight(arc_id) for arc_id in t.mutable_arcs)
