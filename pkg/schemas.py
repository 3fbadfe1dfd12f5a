from typing import Optional, Dict, List, Any
from pydantic import BaseModel, Field
from enum import Enum


# ---------------------------------------------------------------------------
# 场景文件
# ---------------------------------------------------------------------------

class ArcSpec(BaseModel):
    """三角剖分中的弧"""
    id: str = Field(..., min_length=1, description="弧 id")
    label: str = Field(..., description="显示标签")
    weight: int = Field(1, description="权重，悬挂弧为 2")
    boundary: bool = Field(False, description="是否为边界弧")
    pending: bool = Field(False, description="是否为悬挂弧")


class TriangleSpec(BaseModel):
    """三角形，三条边按顺时针循环顺序给出"""
    id: str = Field(..., min_length=1, description="三角形 id")
    sides: List[str] = Field(..., min_length=3, max_length=3, description="顺时针排列的三条边")


class SeedKind(str, Enum):
    """种子给法"""
    PRINCIPAL = "principal"
    EXPLICIT = "explicit"


class SeedSpec(BaseModel):
    """主系数量子化只需对称化子；显式给法需要 B̃ 与 Λ"""
    kind: SeedKind = Field(..., description="principal 或 explicit")
    symmetrizer: Optional[List[int]] = Field(None, description="对称化子 D，principal 缺省取弧的权重")
    btilde: Optional[List[List[int]]] = Field(None, description="m×n 扩充交换矩阵")
    lambda_: Optional[List[List[int]]] = Field(None, alias="lambda", description="m×m 反对称矩阵 Λ")

    class Config:
        populate_by_name = True
        use_enum_values = True


class NamedArcSpec(BaseModel):
    """相对初始三角剖分给出穿越序列的弧"""
    name: str = Field(..., min_length=1, description="弧名")
    pending: bool = Field(False, description="是否为悬挂弧")
    crossings: List[str] = Field(default_factory=list, description="依次穿越的弧 id")
    start_triangle: Optional[str] = Field(None, description="Δ_0，只穿越一次非悬挂弧时必填")


class FlipPathSpec(BaseModel):
    """翻转路径"""
    name: str = Field(..., min_length=1, description="路径名")
    directions: List[int] = Field(default_factory=list, description="翻转方向 k_1..k_r，1 起计数")
    new_arcs: List[str] = Field(default_factory=list, description="每一步产生的新弧名")


class ScenarioDocument(BaseModel):
    """场景文件的完整结构"""
    version: int = Field(..., description="格式版本")
    name: str = Field(..., min_length=1, description="场景名")
    description: str = Field("", description="说明")
    arcs: List[ArcSpec] = Field(..., description="弧列表")
    triangles: List[TriangleSpec] = Field(..., description="三角形列表")
    seed: SeedSpec = Field(..., description="量子种子")
    named_arcs: List[NamedArcSpec] = Field(default_factory=list, description="命名弧")
    flip_paths: List[FlipPathSpec] = Field(default_factory=list, description="翻转路径")


# ---------------------------------------------------------------------------
# HTTP 接口
# ---------------------------------------------------------------------------

class ExpansionMode(str, Enum):
    """展开方式"""
    QUANTUM = "quantum"
    COMMUTATIVE = "commutative"


class OutputFormat(str, Enum):
    """输出格式"""
    TEXT = "text"
    TERMS = "terms"


class PolygonKind(str, Enum):
    """多边形三角剖分类型"""
    FAN = "fan"
    ZIGZAG = "zigzag"


class ScenarioRef(BaseModel):
    """按名称引用内置场景，或直接内联场景文档"""
    scenario: Optional[str] = Field(None, description="内置场景名或路径")
    document: Optional[ScenarioDocument] = Field(None, description="内联场景文档")


class ExpandRequest(ScenarioRef):
    """展开请求"""
    arc: str = Field(..., min_length=1, description="目标弧")
    mode: ExpansionMode = Field(ExpansionMode.QUANTUM, description="量子或交换展开")
    format: OutputFormat = Field(OutputFormat.TEXT, description="输出格式")

    class Config:
        use_enum_values = True


class ExpandResponse(BaseModel):
    """展开结果"""
    status: str = Field(..., description="处理状态")
    arc: str = Field(..., description="目标弧")
    mode: str = Field(..., description="展开方式")
    text: str = Field(..., description="规范文本")
    terms: List[Dict[str, Any]] = Field(default_factory=list, description="项列表")
    matchings: int = Field(..., description="完美匹配个数")


class MatchingsRequest(ScenarioRef):
    """匹配列表请求"""
    arc: str = Field(..., min_length=1, description="目标弧")
    count_only: bool = Field(False, description="只返回个数")


class MatchingInfo(BaseModel):
    """单个完美匹配"""
    edges: List[str] = Field(..., description="边 id")
    labels: List[str] = Field(..., description="边标签")
    height: List[int] = Field(..., description="高度向量")
    exponent: List[int] = Field(..., description="指数向量 a(P)")
    valuation: int = Field(..., description="赋值 v(P)")


class MatchingsResponse(BaseModel):
    """匹配列表结果"""
    status: str = Field(..., description="处理状态")
    arc: str = Field(..., description="目标弧")
    count: int = Field(..., description="完美匹配个数")
    matchings: List[MatchingInfo] = Field(default_factory=list, description="匹配明细")


class SnakeRequest(ScenarioRef):
    """蛇形图导出请求"""
    arc: str = Field(..., min_length=1, description="目标弧")
    highlight: Optional[int] = Field(None, ge=0, description="加粗显示第几个匹配 (0 起)")


class SnakeResponse(BaseModel):
    """蛇形图导出结果"""
    status: str = Field(..., description="处理状态")
    arc: str = Field(..., description="目标弧")
    tiles: int = Field(..., description="瓦片数")
    dot: str = Field(..., description="DOT 文本")


class VerifyRequest(ScenarioRef):
    """校验请求"""
    check: Optional[str] = Field(None, description="只运行某一类校验")


class VerifyResponse(BaseModel):
    """校验结果"""
    status: str = Field(..., description="处理状态")
    passed: bool = Field(..., description="是否全部通过")
    reports: List[str] = Field(default_factory=list, description="逐项报告")


class PolygonRequest(BaseModel):
    """多边形场景生成请求"""
    vertices: int = Field(..., ge=4, le=12, description="顶点数")
    kind: PolygonKind = Field(PolygonKind.FAN, description="fan 或 zigzag")
    fan_apex: int = Field(0, ge=0, description="扇形中心顶点")
    depth: Optional[int] = Field(None, ge=0, le=4, description="翻转路径深度")
    cover: bool = Field(False, description="加入翻出每条对角线的路径")

    class Config:
        use_enum_values = True


class PolygonResponse(BaseModel):
    """多边形场景生成结果"""
    status: str = Field(..., description="处理状态")
    name: str = Field(..., description="场景名")
    document: str = Field(..., description="规范化的场景文本")


class ScenarioListResponse(BaseModel):
    """内置场景列表"""
    status: str = Field(..., description="处理状态")
    scenarios: List[str] = Field(default_factory=list, description="场景名")
