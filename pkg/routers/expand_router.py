from fastapi import APIRouter, HTTPException

from errors import QclError, http_status
from logging_setup import logger
from schemas import (
    ExpandRequest,
    ExpandResponse,
    MatchingsRequest,
    MatchingsResponse,
    SnakeRequest,
    SnakeResponse,
)
from services import service_expand, service_load_scenario, service_matchings, service_snake

router = APIRouter()


@router.post("/expand", response_model=ExpandResponse)
async def expand_arc(request: ExpandRequest) -> ExpandResponse:
    """
    弧的量子 Laurent 展开

    按蛇形图完美匹配求和，系数为 q^{1/2} 的 Laurent 多项式

    - **scenario**: 内置场景名或路径 (与 document 二选一)
    - **document**: 内联场景文档
    - **arc**: 目标弧
    - **mode**: quantum 或 commutative
    - **format**: text 只返回规范文本，terms 同时返回项列表
    """
    try:
        s = service_load_scenario(request.scenario, request.document)
        result = service_expand(s, request.arc, commutative=request.mode == "commutative")
        terms = result["terms"] if request.format == "terms" else []
        return ExpandResponse(
            status="success",
            arc=result["arc"],
            mode=result["mode"],
            text=result["text"],
            terms=terms,
            matchings=result["matchings"],
        )
    except HTTPException:
        raise
    except QclError as e:
        logger.warning(f"请求未完成 ({type(e).__name__}): {e.detail}")
        raise HTTPException(status_code=http_status(e), detail=e.detail)
    except Exception as e:
        logger.error(f"接口处理异常: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"展开失败: {str(e)}")


@router.post("/matchings", response_model=MatchingsResponse)
async def list_matchings(request: MatchingsRequest) -> MatchingsResponse:
    """
    完美匹配列表

    - **arc**: 目标弧
    - **count_only**: 只返回个数

    每个匹配给出边、标签、高度向量、指数向量和赋值
    """
    try:
        s = service_load_scenario(request.scenario, request.document)
        result = service_matchings(s, request.arc, count_only=request.count_only)
        return MatchingsResponse(status="success", **result)
    except HTTPException:
        raise
    except QclError as e:
        logger.warning(f"请求未完成 ({type(e).__name__}): {e.detail}")
        raise HTTPException(status_code=http_status(e), detail=e.detail)
    except Exception as e:
        logger.error(f"接口处理异常: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"匹配枚举失败: {str(e)}")


@router.post("/snake", response_model=SnakeResponse)
async def export_snake(request: SnakeRequest) -> SnakeResponse:
    """
    蛇形图 DOT 导出

    - **arc**: 目标弧
    - **highlight**: 加粗显示的匹配下标 (0 起，按边 id 排序)
    """
    try:
        s = service_load_scenario(request.scenario, request.document)
        result = service_snake(s, request.arc, highlight=request.highlight)
        return SnakeResponse(status="success", arc=result["arc"], tiles=result["tiles"], dot=result["dot"])
    except HTTPException:
        raise
    except QclError as e:
        logger.warning(f"请求未完成 ({type(e).__name__}): {e.detail}")
        raise HTTPException(status_code=http_status(e), detail=e.detail)
    except Exception as e:
        logger.error(f"接口处理异常: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"蛇形图导出失败: {str(e)}")
