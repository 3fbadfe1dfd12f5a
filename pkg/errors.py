"""
统一异常定义

各层共用。detail 与 HTTPException.detail 含义一致，路由层直接透传给前端。
"""
from typing import Optional


class QclError(Exception):
    """所有计算错误的基类"""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class StructuralError(QclError):
    """三角剖分、穿越序列或蛇形图结构不合法"""


class DimensionError(QclError):
    """矩阵、指数向量或量子环面维数不一致"""


class PreconditionError(QclError):
    """操作前置条件不满足"""


class IntegrityError(QclError):
    """理论上不可能出现的不一致，说明输入或实现有缺陷"""


class ScenarioError(QclError):
    """场景文件语法或校验错误"""

    def __init__(self, detail: str, line: Optional[int] = None):
        if line is not None:
            detail = f"第 {line} 行: {detail}"
        super().__init__(detail)
        self.line = line


# 输入类错误，CLI 退出码 2，HTTP 400/422
INPUT_ERRORS = (StructuralError, DimensionError, PreconditionError, ScenarioError)


def http_status(error: QclError) -> int:
    """异常对应的 HTTP 状态码"""
    if isinstance(error, PreconditionError):
        return 422
    if isinstance(error, INPUT_ERRORS):
        return 400
    return 500
