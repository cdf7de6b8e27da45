# -*- coding: utf-8 -*-
# filename: conftest.py
# @Time    : 2025/10/18 10:20
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文: E2E 测试公共夹具：CliRunner 与输出目录。完整 Z 扫描耗时较长，默认通过 -m "not e2e" 跳过。
English: Root-level E2E fixtures. Full Z sweeps are slow and skipped by default with -m "not e2e".
"""

from __future__ import annotations

from pathlib import Path

import pytest
from typer.testing import CliRunner


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "out"
