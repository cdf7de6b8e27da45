# -*- coding: utf-8 -*-
# filename: test_rel_corrections.py
# @Time    : 2025/10/17 14:10
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：相对论修正积分的单元测试：核函数界、Legendre Q 表、球平均、修正项结构关系与指数拟合。
English: Unit tests for the relativistic correction integrals and exponent fits.
"""

import math

import numpy as np
import pytest
from pytest_mock import MockerFixture

import brtf.rel_corrections as rel_corrections
from brtf.coherent_states import TrialSpec
from brtf.rel_corrections import (
    HARTREE_LIFT_PREFACTOR,
    SWEEP_MIN_POINTS,
    TERM_NAMES,
    CorrectionSettings,
    CorrectionSweep,
    ExponentFit,
    KernelInequalityError,
    QuadratureConvergenceError,
    ball_average,
    claimed_exponents,
    correction_sweep,
    correction_terms,
    deficit_kernel,
    fit_exponent,
    hartree_lift_bound,
    kernel_chain_node_violation,
    kernel_chain_violation,
    legendre_q_table,
    momentum_integrals,
    multipole_matrices,
    phi1_deficit_bound,
    phi2_bound,
    phi2_kernel,
)


def _closed_form_q(z: float) -> tuple[float, float, float]:
    q0 = math.atanh(1.0 / z)
    return q0, z * q0 - 1.0, 0.5 * (3.0 * z * z - 1.0) * q0 - 1.5 * z


class TestKernels:
    def test_phi2_kernel_bounded(self) -> None:
        xi = np.geomspace(1e-3, 1e6, 80)
        a, b = np.meshgrid(xi, xi)
        values = phi2_kernel(a, b, 20.0)
        assert np.all(values >= 0.0)
        assert np.max(values) <= 0.5 + 1e-12

    def test_deficit_kernel_in_unit_interval(self) -> None:
        xi = np.geomspace(1e-3, 1e6, 80)
        a, b = np.meshgrid(xi, xi)
        values = deficit_kernel(a, b, 20.0)
        assert np.all(values >= 0.0)
        assert np.all(values <= 1.0)

    def test_deficit_kernel_vanishes_at_rest(self) -> None:
        assert float(deficit_kernel(0.0, 0.0, 20.0)) == 0.0

    @pytest.mark.parametrize("c", [1.0, 20.0, 137.0])
    def test_inequality_chain(self, c: float) -> None:
        violation, pair = kernel_chain_violation(np.geomspace(1e-4 * c, 1e4 * c, 120), c)
        assert violation <= 1e-10
        assert len(pair) == 2


    @pytest.mark.parametrize("c", [1.0, 20.0, 137.0])
    def test_node_check_agrees_with_pairs(self, c: float) -> None:
        xi = np.geomspace(1e-4 * c, 1e4 * c, 60)
        node_violation, node = kernel_chain_node_violation(xi, c)
        pair_violation, _ = kernel_chain_violation(xi, c)
        assert node_violation <= 1e-10
        assert pair_violation <= 1e-10
        assert node in xi

    def test_node_check_accepts_any_shape(self) -> None:
        violation, node = kernel_chain_node_violation(np.geomspace(0.1, 10.0, 12).reshape(3, 4), 5.0)
        assert violation <= 1e-10
        empty, where = kernel_chain_node_violation(np.zeros(0), 5.0)
        assert empty == 0.0
        assert math.isnan(where)


class TestMultipoles:
    @pytest.mark.parametrize("z", [1.05, 3.0])
    def test_low_orders_match_closed_form(self, z: float) -> None:
        table = legendre_q_table(z, 2)
        assert table.shape == (3, 1)
        for got, expected in zip(table[:, 0], _closed_form_q(z), strict=True):
            assert got == pytest.approx(expected, rel=1e-10)

    def test_branches_agree_at_switch(self) -> None:
        lo = legendre_q_table(1.1 - 1e-9, 6)[:, 0]
        hi = legendre_q_table(1.1 + 1e-9, 6)[:, 0]
        assert np.allclose(lo, hi, rtol=1e-6)

    def test_rejects_z_at_most_one(self) -> None:
        with pytest.raises(ValueError):
            legendre_q_table([1.0, 2.0], 3)

    def test_matrices_symmetric_and_frozen(self) -> None:
        mats = multipole_matrices(16, 0.1, 4)
        assert mats.shape == (5, 16, 16)
        assert np.allclose(mats, np.transpose(mats, (0, 2, 1)))
        with pytest.raises(ValueError):
            mats[0, 0, 0] = 1.0

    def test_higher_orders_decay_off_diagonal(self) -> None:
        mats = multipole_matrices(32, 0.2, 6)
        # 远离对角线时 Q_l 随 l 快速衰减
        assert np.all(np.abs(mats[1:, 0, -1]) < mats[0, 0, -1])


class TestBallAverage:
    def test_constant_integrand(self) -> None:
        p = np.geomspace(1e-2, 1e2, 401)
        P = np.array([0.0, 5e-3, 1.0, 50.0, 200.0])
        J = ball_average(p, np.ones_like(p), P)
        assert J[0] == 0.0
        assert np.allclose(J[1:], P[1:] ** 3 / 3.0, rtol=1e-6)

    def test_degenerate_grid(self) -> None:
        assert np.all(ball_average(np.array([1.0]), np.array([2.0]), np.array([0.5, 3.0])) == 0.0)


class TestSettings:
    def test_validation(self) -> None:
        with pytest.raises(ValueError):
            CorrectionSettings(multipole_order=0)
        with pytest.raises(ValueError):
            CorrectionSettings(multipole_tolerance=1.5)
        with pytest.raises(ValueError):
            CorrectionSettings(angular_nodes=1)


class TestCorrectionTerms:
    def test_structure(self, neutral_spec: TrialSpec, loose_settings: CorrectionSettings) -> None:
        terms = correction_terms(neutral_spec, loose_settings)
        assert terms.phi2_term > 0.0
        assert terms.phi1_deficit > 0.0
        assert terms.hartree_lift == pytest.approx(HARTREE_LIFT_PREFACTOR * (terms.phi2_term + terms.phi1_deficit))
        assert terms.kernel_violation <= 1e-10
        assert terms.multipole_tail <= loose_settings.multipole_tolerance
        assert set(terms.scaled()) == set(TERM_NAMES)
        assert terms.scaled()["phi2_term"] == pytest.approx(terms.phi2_term / 10.0 ** (7.0 / 3.0))

    def test_cached_and_shared(self, neutral_spec: TrialSpec, loose_settings: CorrectionSettings) -> None:
        terms = correction_terms(neutral_spec, loose_settings)
        assert correction_terms(neutral_spec, loose_settings) is terms
        assert phi2_bound(neutral_spec, loose_settings) == terms.phi2_term
        assert phi1_deficit_bound(neutral_spec, loose_settings) == terms.phi1_deficit
        assert hartree_lift_bound(neutral_spec, loose_settings) == terms.hartree_lift

    def test_every_node_is_checked(self, neutral_spec: TrialSpec, loose_settings: CorrectionSettings, mocker: MockerFixture) -> None:
        spy = mocker.spy(rel_corrections, "check_kernel_chain")
        integrals = momentum_integrals(neutral_spec, loose_settings)
        checked = sum(np.asarray(call.args[0]).size for call in spy.call_args_list)
        assert checked == integrals.p.size * neutral_spec.profile.momenta.size * loose_settings.angular_nodes
        assert 0.0 <= integrals.kernel_violation <= 1e-10

    def test_kernel_violation_is_fatal(self, neutral_spec: TrialSpec, loose_settings: CorrectionSettings, mocker: MockerFixture) -> None:
        mocker.patch.object(rel_corrections, "kernel_chain_node_violation", return_value=(1e-3, 5.0))
        with pytest.raises(KernelInequalityError) as exc_info:
            momentum_integrals(neutral_spec, loose_settings)
        assert exc_info.value.worst == (5.0, 5.0)

    def test_truncated_expansion_reports_trace(self, neutral_spec: TrialSpec) -> None:
        settings = CorrectionSettings(multipole_order=1, angular_nodes=16, p_points_per_decade=4, multipole_tolerance=1e-12)
        with pytest.raises(QuadratureConvergenceError) as exc_info:
            correction_terms(neutral_spec, settings)
        assert len(exc_info.value.trace) == 2


class TestExponentFit:
    def test_exact_power_law(self) -> None:
        records = [(z, 3.0 * z**1.75) for z in (10.0, 20.0, 40.0, 80.0)]
        fit = fit_exponent(records)
        assert fit.slope == pytest.approx(1.75, rel=1e-10)
        assert fit.intercept == pytest.approx(math.log(3.0), rel=1e-10)
        assert fit.residual < 1e-10
        assert fit.ci_low <= fit.slope <= fit.ci_high
        assert fit.n == 4

    def test_two_points_has_degenerate_interval(self) -> None:
        fit = fit_exponent([(10.0, 100.0), (100.0, 1e4)])
        assert fit.slope == pytest.approx(2.0)
        assert fit.ci_low == fit.ci_high == pytest.approx(2.0)

    def test_sweep_minimum_rejects_two_points(self) -> None:
        records = [(10.0, 100.0), (100.0, 1e4)]
        with pytest.raises(ValueError):
            fit_exponent(records, min_points=SWEEP_MIN_POINTS)
        fit = fit_exponent([*records, (1000.0, 1e6)], min_points=SWEEP_MIN_POINTS)
        assert fit.slope == pytest.approx(2.0)
        assert fit.n == 3

    def test_noisy_interval_widens(self) -> None:
        fit = fit_exponent([(10.0, 10.0), (20.0, 25.0), (40.0, 35.0), (80.0, 90.0)])
        assert fit.ci_high - fit.ci_low > 0.0
        assert fit.residual > 0.0

    @pytest.mark.parametrize(
        "records",
        [
            [(10.0, 1.0)],
            [(10.0, 1.0), (20.0, 0.0)],
            [(10.0, 1.0), (10.0, 2.0)],
        ],
    )
    def test_invalid_records(self, records: list[tuple[float, float]]) -> None:
        with pytest.raises(ValueError):
            fit_exponent(records)

    def test_claimed_exponents(self) -> None:
        claims = claimed_exponents(5.0 / 9.0)
        assert claims["phi2_term"] == pytest.approx(17.0 / 9.0)
        assert claims["phi1_deficit"] == pytest.approx(20.0 / 9.0)
        assert claims["hartree_lift"] == pytest.approx(20.0 / 9.0)


class TestSweep:
    @staticmethod
    def _fit(slope: float) -> ExponentFit:
        return ExponentFit(slope=slope, intercept=0.0, residual=0.0, stderr=0.0, ci_low=slope, ci_high=slope, n=4)

    def test_check_claims(self) -> None:
        sweep = CorrectionSweep(
            records=(),
            fits={"phi2_term": self._fit(1.8), "phi1_deficit": self._fit(2.5), "hartree_lift": self._fit(2.2)},
            delta=5.0 / 9.0,
        )
        assert sweep.check_claims() == {"phi2_term": True, "phi1_deficit": False, "hartree_lift": True}
        assert sweep.check_claims(margin=0.5)["phi1_deficit"]

    def test_needs_three_charges(self) -> None:
        with pytest.raises(ValueError):
            correction_sweep([10.0, 100.0])
