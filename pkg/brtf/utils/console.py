"""
文件名: console.py
作者: JQQ
创建日期: 2025/10/15
最后修改日期: 2025/10/18
版权: 2023 JQQ. All rights reserved.
依赖: rich
描述:
  中文: 全局 rich Console，能量台账、拟合表与恒等式表都经由此实例打印。
        非 TTY 输出（CliRunner 捕获、重定向到文件）时使用固定宽度，宽度可由 BRTF_CONSOLE_WIDTH 覆盖。
  English: Shared rich Console for ledgers and fit tables; fixed width when stdout is not a terminal.
"""

from __future__ import annotations

import os
import sys

from rich.console import Console

DEFAULT_WIDTH = 160


def _width() -> int | None:
    raw = os.environ.get("BRTF_CONSOLE_WIDTH")
    if raw:
        return max(int(raw), 40)
    return None if sys.stdout.isatty() else DEFAULT_WIDTH


def make_console(no_color: bool = False) -> Console:
    return Console(no_color=no_color, width=_width(), soft_wrap=False)


# 引用方通过 console_util.console 访问，set_no_color 会替换该对象
console: Console = make_console()


def set_no_color(flag: bool) -> None:
    global console
    console = make_console(no_color=flag)
