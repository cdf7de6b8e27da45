# -*- coding: utf-8 -*-
# filename: test_tf_solver.py
# @Time    : 2025/10/17 11:05
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：Thomas-Fermi 求解器的单元测试：普适解基准值、离子边界条件、能量分解与 Z^{7/3} 标度。
English: Unit tests for the Thomas-Fermi solver: universal benchmarks, ionic boundary, energy ledger and scaling.
"""

import math

import numpy as np
import pytest

from brtf.model import AtomSystem
from brtf.radial import GridDensity, UniformBall
from brtf.tf_solver import (
    GAMMA_TF,
    TFAtom,
    UnsupportedDensityError,
    build_atom,
    scaling_check,
    solve_atom,
    solve_universal,
    tf_energy,
)

NEUTRAL_SLOPE = -1.588071
UNIT_TF_ENERGY = -0.768745


class TestUniversalSolution:
    def test_neutral_slope(self) -> None:
        sol = solve_universal(1.0)
        assert sol.is_neutral
        assert sol.slope0 == pytest.approx(NEUTRAL_SLOPE, abs=1e-5)
        assert sol.y[0] == pytest.approx(1.0, abs=1e-4)
        assert np.all(np.diff(sol.y) <= 1e-12)

    def test_overcharged_reuses_neutral(self) -> None:
        assert solve_universal(2.0) is solve_universal(1.0)

    def test_ionic_boundary(self) -> None:
        sol = solve_universal(0.8)
        assert not sol.is_neutral
        assert math.isfinite(sol.t0)
        assert sol.boundary_residual < 1e-6
        # 离子解的初始斜率比中性解更陡
        assert sol.slope0 < NEUTRAL_SLOPE
        assert np.all(sol.y[sol.t > sol.t0] == 0.0)

    @pytest.mark.parametrize("lam", [0.0, -1.0])
    def test_lambda_must_be_positive(self, lam: float) -> None:
        with pytest.raises(ValueError):
            solve_universal(lam)

    def test_tolerance_range(self) -> None:
        with pytest.raises(ValueError):
            solve_universal(1.0, tolerance=1e-2)

    def test_grid_validation(self) -> None:
        with pytest.raises(ValueError):
            solve_universal(1.0, t_min=1.0, t_max=0.5)


class TestAtom:
    def test_unit_charge_energy(self) -> None:
        atom = solve_atom(AtomSystem.from_lambda(1.0, 1.0))
        assert atom.energy.total == pytest.approx(UNIT_TF_ENERGY, abs=1e-3)

    def test_neutral_virial_ratios(self, neutral_atom: TFAtom) -> None:
        e = neutral_atom.energy
        # 中性 TF 原子：动能 : 核吸引 : 电子排斥 = 3 : −7 : 1
        assert e.kinetic == pytest.approx(-e.total, rel=1e-4)
        assert e.external == pytest.approx(-7.0 * e.hartree, rel=1e-3)
        assert e.kinetic == pytest.approx(3.0 * e.hartree, rel=1e-3)

    def test_neutral_atom(self, neutral_atom: TFAtom) -> None:
        assert neutral_atom.u_prime == 0.0
        assert neutral_atom.electron_count == pytest.approx(10.0, rel=1e-5)
        assert neutral_atom.energy.as_dict()["total"] == pytest.approx(neutral_atom.energy.total)

    def test_positive_ion(self, positive_ion: TFAtom) -> None:
        assert positive_ion.u_prime > 0.0
        assert positive_ion.electron_count == pytest.approx(8.0, rel=1e-4)
        # 电离后能量高于中性原子
        neutral = solve_atom(AtomSystem.from_lambda(1.0, 10.0))
        assert positive_ion.energy.total > neutral.energy.total

    def test_negative_ion_tf_part_is_neutral(self, negative_ion: TFAtom, neutral_atom: TFAtom) -> None:
        assert negative_ion.u_prime == 0.0
        assert negative_ion.energy.total == pytest.approx(neutral_atom.energy.total, rel=1e-12)
        assert negative_ion.electron_count == pytest.approx(10.0, rel=1e-5)

    def test_euler_lagrange(self, neutral_atom: TFAtom, positive_ion: TFAtom) -> None:
        assert neutral_atom.euler_lagrange_residual() < 1e-5
        assert positive_ion.euler_lagrange_residual() < 1e-5

    def test_pointwise_density_bound(self, neutral_atom: TFAtom, positive_ion: TFAtom) -> None:
        assert neutral_atom.pointwise_bound_ratio() <= 1.0 + 1e-9
        assert positive_ion.pointwise_bound_ratio() <= 1.0 + 1e-9

    def test_density_matches_potential(self, positive_ion: TFAtom) -> None:
        lhs = GAMMA_TF * positive_ion.rho ** (2.0 / 3.0)
        assert np.allclose(lhs, positive_ion.effective_potential, rtol=1e-10, atol=1e-12)

    def test_momentum_radius(self, neutral_atom: TFAtom) -> None:
        r = neutral_atom.r[::400]
        expected = np.sqrt(2.0 * neutral_atom.effective_potential[::400])
        assert np.allclose(neutral_atom.momentum_radius(r), expected, rtol=1e-10)
        assert neutral_atom.momentum_radius(np.array([2.0 * neutral_atom.r[-1]]))[0] == 0.0

    def test_tf_energy_of_empty_density(self, neutral_atom: TFAtom) -> None:
        empty = GridDensity(neutral_atom.r, np.zeros_like(neutral_atom.r))
        energy = tf_energy(empty, neutral_atom.sys)
        assert energy.total == 0.0

    def test_halved_minimizer_costs_energy(self, neutral_atom: TFAtom) -> None:
        # ρ/2 仍满足 ∫ρ <= N，最小值性质要求能量更高
        half = GridDensity(neutral_atom.r, 0.5 * neutral_atom.rho)
        assert tf_energy(half, neutral_atom.sys).total > neutral_atom.energy.total
        assert tf_energy(neutral_atom.profile, neutral_atom.sys).total == pytest.approx(neutral_atom.energy.total, rel=1e-10)

    def test_grid_convergence(self, neutral_atom: TFAtom) -> None:
        fine = solve_atom(neutral_atom.sys, t_min=1e-6, t_max=2e4, n_nodes=8000)
        assert fine.energy.total == pytest.approx(neutral_atom.energy.total, rel=1e-5)

    def test_build_atom_rejects_mismatched_solution(self) -> None:
        with pytest.raises(ValueError):
            build_atom(AtomSystem.from_lambda(0.8, 10.0), solve_universal(1.0))

    def test_tf_energy_needs_grid_density(self) -> None:
        with pytest.raises(UnsupportedDensityError):
            tf_energy(UniformBall(), AtomSystem.from_lambda(1.0, 1.0))  # type: ignore[arg-type]


class TestScaling:
    @pytest.mark.parametrize("lam", [1.0, 0.8])
    def test_seven_thirds_law(self, lam: float) -> None:
        assert scaling_check(lam, 1.0, 100.0) < 1e-6

    @pytest.mark.parametrize("lam", [0.5, 1.0, 1.5])
    @pytest.mark.parametrize(("Z1", "Z2"), [(1.0, 10.0), (1.0, 100.0), (10.0, 1000.0)])
    def test_law_across_charges(self, lam: float, Z1: float, Z2: float) -> None:
        assert scaling_check(lam, Z1, Z2) < 1e-6

    def test_identical_charges(self) -> None:
        assert scaling_check(1.0, 7.0, 7.0) == 0.0

    def test_overcharged_energy_is_neutral(self) -> None:
        neutral = solve_atom(AtomSystem.from_lambda(1.0, 10.0))
        assert solve_atom(AtomSystem.from_lambda(1.5, 10.0)).energy.total == pytest.approx(neutral.energy.total, rel=1e-12)

    def test_requires_charge_at_least_one(self) -> None:
        with pytest.raises(ValueError):
            scaling_check(1.0, 0.5, 10.0)
