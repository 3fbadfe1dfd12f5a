from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn

from config import APP_TITLE, APP_DESCRIPTION, APP_VERSION, SERVER_HOST, SERVER_PORT
from logging_setup import logger
from routers import expand_router, verify_router, scenario_router

app = FastAPI(
    title=APP_TITLE,
    description=APP_DESCRIPTION,
    version=APP_VERSION
)

# 添加CORS中间件，支持前端访问
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

# 注册路由
app.include_router(expand_router.router, prefix="/api")
app.include_router(verify_router.router, prefix="/api")
app.include_router(scenario_router.router, prefix="/api")


@app.get("/")
async def root():
    return {"message": f"{APP_TITLE}运行中", "status": "ok", "version": APP_VERSION}


if __name__ == "__main__":
    logger.info(f"启动{APP_TITLE}")
    uvicorn.run(app, host=SERVER_HOST, port=SERVER_PORT)
