from datetime import datetime
import os
from dotenv import load_dotenv

# 加载环境变量
load_dotenv()

# 应用配置
APP_TITLE = '轨形量子丛代数展开系统'
APP_DESCRIPTION = '基于蛇形图完美匹配与赋值映射的量子 Laurent 展开计算与校验服务'
APP_VERSION = '1.0'

# 日志配置
LOG_FILE_NAME = os.getenv('QCL_LOG_FILE', f'./log/qcl_log_{datetime.now().strftime("%Y%m%d")}.log')

# 服务配置
SERVER_HOST = os.getenv('QCL_HOST', '0.0.0.0')
SERVER_PORT = int(os.getenv('QCL_PORT', '8004'))

# 场景文件配置
SCENARIO_DIR = os.getenv('QCL_SCENARIO_DIR', os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data'))
SCENARIO_SUFFIX = '.scn'
SCENARIO_VERSION = 1

# 计算配置
MAX_MATCHINGS = int(os.getenv('QCL_MAX_MATCHINGS', '10000'))  # 完美匹配枚举上限
DEFAULT_FLIP_DEPTH = int(os.getenv('QCL_FLIP_DEPTH', '1'))  # 生成多边形场景时的翻转深度

# 种子相容性复检模式: strict 直接报错, warn 只记录警告
SEED_CHECKS_MODES = ('strict', 'warn')


def seed_checks_mode() -> str:
    """读取 QCL_SEED_CHECKS，每次调用时重新读取以便测试切换"""
    mode = os.getenv('QCL_SEED_CHECKS', 'strict').strip().lower()
    if mode not in SEED_CHECKS_MODES:
        return 'strict'
    return mode
