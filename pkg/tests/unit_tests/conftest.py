# -*- coding: utf-8 -*-
# filename: conftest.py
# @Time    : 2025/10/17 09:40
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：单元测试共享 fixtures。TF 原子与试探态构造代价较高，按 session 缓存；动量网格比默认稀疏以缩短用时。
English: Shared unit-test fixtures; solved atoms and trial states are cached per session on a coarser momentum grid.
"""

import pytest

from brtf.coherent_states import TrialSpec, build_trial_spec
from brtf.model import AtomSystem
from brtf.rel_corrections import CorrectionSettings
from brtf.tf_solver import TFAtom, solve_atom

# 单元测试使用的动量网格 / momentum grid used by the unit tests
TEST_DECADES = 8.0
TEST_POINTS_PER_DECADE = 24


@pytest.fixture(scope="session")
def neutral_atom() -> TFAtom:
    """中性原子 Z=10, λ=1 / neutral atom."""
    return solve_atom(AtomSystem.from_lambda(1.0, 10.0))


@pytest.fixture(scope="session")
def positive_ion() -> TFAtom:
    """正离子 Z=10, λ=0.8 / positive ion."""
    return solve_atom(AtomSystem.from_lambda(0.8, 10.0))


@pytest.fixture(scope="session")
def negative_ion() -> TFAtom:
    """负离子 Z=10, λ=1.2（TF 部分与中性相同） / negative ion, TF part equals the neutral one."""
    return solve_atom(AtomSystem.from_lambda(1.2, 10.0))


@pytest.fixture(scope="session")
def neutral_spec(neutral_atom: TFAtom) -> TrialSpec:
    return build_trial_spec(neutral_atom, decades=TEST_DECADES, points_per_decade=TEST_POINTS_PER_DECADE)


@pytest.fixture(scope="session")
def ion_spec(positive_ion: TFAtom) -> TrialSpec:
    return build_trial_spec(positive_ion, decades=TEST_DECADES, points_per_decade=TEST_POINTS_PER_DECADE)


@pytest.fixture(scope="session")
def negative_spec(negative_ion: TFAtom) -> TrialSpec:
    return build_trial_spec(negative_ion, decades=TEST_DECADES, points_per_decade=TEST_POINTS_PER_DECADE)


@pytest.fixture(scope="session")
def loose_settings() -> CorrectionSettings:
    """
    中文：放宽多极尾项容差，只检验修正项之间的结构关系。
    English: Relaxed multipole tolerance for structural checks of the correction terms.
    """
    return CorrectionSettings(multipole_order=8, angular_nodes=24, p_points_per_decade=6, multipole_tolerance=0.5)
