from fastapi import APIRouter, HTTPException

from errors import QclError, http_status
from logging_setup import logger
from schemas import VerifyRequest, VerifyResponse
from services import service_load_scenario, service_verify

router = APIRouter()


@router.post("/verify", response_model=VerifyResponse)
async def verify_scenario(request: VerifyRequest) -> VerifyResponse:
    """
    运行场景校验

    - **scenario** / **document**: 场景
    - **check**: compatibility, expansion, exchange, quasi-commutation, oracle, exchange-power 之一，缺省全部运行

    校验失败不报错，passed 为 false，reports 中对应行以 FAIL 开头
    """
    try:
        s = service_load_scenario(request.scenario, request.document)
        reports = service_verify(s, request.check)
        return VerifyResponse(
            status="success",
            passed=all(r.passed for r in reports),
            reports=[r.render() for r in reports],
        )
    except HTTPException:
        raise
    except QclError as e:
        logger.warning(f"请求未完成 ({type(e).__name__}): {e.detail}")
        raise HTTPException(status_code=http_status(e), detail=e.detail)
    except Exception as e:
        logger.error(f"接口处理异常: {e}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"校验失败: {str(e)}")
