# -*- coding: utf-8 -*-
# filename: conftest.py
# @Time    : 2025/10/17 17:30
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：集成测试全局 fixtures，提供 CliRunner 与输出目录。
English: Global fixtures for integration tests: a CliRunner and an output directory.
"""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """尚不存在的输出目录，由命令自行创建 / Output directory created by the command itself."""
    return tmp_path / "out"


@pytest.fixture
def fast_overrides() -> str:
    """
    中文：缩小动量网格与抽样规模的 --set 覆盖串。
    English: --set overrides with a coarse momentum grid and a tiny positivity sample.
    """
    return json.dumps({"momentum_decades": 4.0, "points_per_decade": 8, "q_samples": 2, "box_points": 8, "formats": ["json"]})
