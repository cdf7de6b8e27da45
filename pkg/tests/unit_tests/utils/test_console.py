# -*- coding: utf-8 -*-
# filename: test_console.py
# @Time    : 2025/10/18 11:05
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：全局 Console 的宽度选择与 no_color 切换。
English: Width selection and no_color switching of the shared console.
"""

import pytest

from brtf.utils import console as console_util


@pytest.fixture(autouse=True)
def restore_console():
    saved = console_util.console
    yield
    console_util.console = saved


def test_env_width(monkeypatch):
    monkeypatch.setenv("BRTF_CONSOLE_WIDTH", "100")
    assert console_util.make_console().width == 100


def test_env_width_has_floor(monkeypatch):
    monkeypatch.setenv("BRTF_CONSOLE_WIDTH", "10")
    assert console_util.make_console().width == 40


def test_captured_output_uses_default_width(monkeypatch, capsys):
    monkeypatch.delenv("BRTF_CONSOLE_WIDTH", raising=False)
    # capsys 下 stdout 不是 TTY
    assert console_util.make_console().width == console_util.DEFAULT_WIDTH


def test_set_no_color_replaces_instance():
    before = console_util.console
    console_util.set_no_color(True)
    assert console_util.console is not before
    assert console_util.console.no_color
