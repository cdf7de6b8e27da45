# filename: logger.py
# @Time    : 2025/10/12 10:21
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
brtf 日志模块
Logger module for the brtf toolkit.

通过环境变量控制日志：
- BRTF_LOG_LEVEL: 控制日志等级（debug, info, warning, error, critical）
- BRTF_LOG_SILENT: 设为 1/true/yes 时禁用所有日志输出
- BRTF_LOG_FILE: 设置日志文件路径，启用文件输出

各数值模块通过 get_logger(__name__) 获取子 logger（例如 brtf.tf_solver），
子 logger 不单独挂 handler，统一由根 logger "brtf" 输出。
"""

import logging
import os
import sys
from pathlib import Path

LEVEL_MAP: dict[str, int] = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}

LOG_LEVEL = os.environ.get("BRTF_LOG_LEVEL", "info").lower()
SILENT_MODE = os.environ.get("BRTF_LOG_SILENT", "0").lower() in ("1", "true", "yes")
LOG_FILE = os.environ.get("BRTF_LOG_FILE")

FORMATTER = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

logger = logging.getLogger("brtf")
logger.propagate = False  # 防止日志向上传播到根logger


def _attach_file_handler(path: str) -> None:
    try:
        log_path = Path(path)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path)
        file_handler.setFormatter(FORMATTER)
        logger.addHandler(file_handler)
    except Exception as e:
        logger.error(f"创建日志文件失败: {str(e)}. 回退到仅控制台输出")


if not SILENT_MODE:
    logger.setLevel(LEVEL_MAP.get(LOG_LEVEL, logging.INFO))

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(FORMATTER)
    logger.addHandler(console_handler)

    if LOG_FILE:
        _attach_file_handler(LOG_FILE)

    logger.info("日志系统已初始化 - 级别: %s, 文件: %s", LOG_LEVEL.upper(), LOG_FILE if LOG_FILE else "N/A")

else:
    # 静默模式：禁用日志
    logger.disabled = True
    logger.addHandler(logging.NullHandler())


def get_logger(name: str) -> logging.Logger:
    """
    中文: 返回 brtf 根 logger 的子 logger，名称取模块路径的最后一段。
    English: Child of the package logger, named after the last component of the module path.
    """
    return logger.getChild(name.rsplit(".", 1)[-1])


def set_level(level: str) -> None:
    """
    中文: 运行时调整日志等级（CLI --log-level 使用）；未知等级抛出 ValueError。
    English: Change the level at runtime; unknown names raise ValueError.
    """
    key = level.lower()
    if key not in LEVEL_MAP:
        raise ValueError(f"未知日志等级: {level!r}，可选 {sorted(LEVEL_MAP)}")
    logger.setLevel(LEVEL_MAP[key])
