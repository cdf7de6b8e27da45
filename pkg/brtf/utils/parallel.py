# filename: parallel.py
# @Time    : 2025/10/15 16:02
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
扫描点的并行执行：workers > 1 时使用进程池，结果顺序与输入一致。
Parallel evaluation of sweep points; results keep the input order.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

from brtf.utils.logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    if workers < 1:
        raise ValueError(f"workers 必须 >= 1，当前 {workers}")
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("使用 %d 个进程并行计算 %d 个扫描点", workers, len(items))
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
