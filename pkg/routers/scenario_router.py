from fastapi import APIRouter, HTTPException

from errors import QclError, http_status
from logging_setup import logger
from schemas import PolygonRequest, PolygonResponse, ScenarioListResponse
from services import service_generate_polygon, service_list_scenarios

router = APIRouter()


@router.get("/scenarios", response_model=ScenarioListResponse)
async def list_scenarios() -> ScenarioListResponse:
    """内置场景名列表"""
    return ScenarioListResponse(status="success", scenarios=service_list_scenarios())


@router.post("/scenarios/polygon", response_model=PolygonResponse)
async def generate_polygon_scenario(request: PolygonRequest) -> PolygonResponse:
    """
    生成凸多边形场景

    - **vertices**: 顶点数 (4..12)
    - **kind**: fan 或 zigzag
    - **fan_apex**: 扇形中心顶点
    - **depth**: 翻转路径深度
    - **cover**: 加入翻出每条对角线的路径

    返回规范化的场景文本，可直接保存为 .scn 文件
    """
    try:
        scenario, text = service_generate_polygon(request.vertices, kind=request.kind,
                                                  fan_apex=request.fan_apex, depth=request.depth,
                                                  cover=request.cover)
        return PolygonResponse(status="success", name=scenario.name, document=text)
    except HTTPException:
        raise
    except QclError as e:
        logger.warning(f"请求未完成 ({type(e).__name__}): {e.detail}")
        raise HTTPException(status_code=http_status(e), detail=e.detail)
    except Exception as e:
        logger.error(f"接口处理异常: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"场景生成失败: {str(e)}")
