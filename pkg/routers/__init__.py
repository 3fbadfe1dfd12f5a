"""
路由模块初始化
"""

from . import expand_router
from . import verify_router
from . import scenario_router

__all__ = ['expand_router', 'verify_router', 'scenario_router']
