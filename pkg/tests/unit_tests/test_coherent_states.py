# -*- coding: utf-8 -*-
# filename: test_coherent_states.py
# @Time    : 2025/10/17 13:30
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：相干态试探态的单元测试：轮廓归一化与 Fourier 变换、迹恒等式、动能恒等式、γ₂ 诊断与正性抽样。
English: Unit tests for the coherent-state trial construction.
"""

import math

import numpy as np
import pytest
from pytest_mock import MockerFixture

from brtf.coherent_states import (
    AnnulusProfile,
    AnnulusUnavailableError,
    CoherentProfile,
    CoherentStatePacket,
    GaussianMixturePacket,
    NoSurplusElectronsError,
    TrialSpec,
    build_trial_spec,
    classical_density,
    coherent_overlap,
    critical_annulus_radius,
    epsilon_R_tilde,
    external_upper,
    gamma2_bounds,
    gamma2_diagnostics,
    hartree_upper,
    kinetic_upper,
    local_power,
    packet_expectation,
    positivity_sample,
    radial_fourier_transform,
    restricted_comparison,
    sample_profile_offsets,
    trace_gamma1,
    trace_gamma_total,
    unit_annulus,
    unit_annulus_hat,
    unit_profile,
    unit_profile_hat,
)
from brtf.model import AtomSystem
from brtf.tf_solver import GAMMA_TF, TFAtom, solve_atom

ORIGIN = [[0.0, 0.0, 0.0]]


class TestProfiles:
    def test_unit_profile_norms(self) -> None:
        prof = CoherentProfile.build(1.0, decades=4.0, points_per_decade=8)
        assert prof.norm == pytest.approx(1.0, abs=1e-12)
        # 单位球 Dirichlet 基态：‖∇g‖² = π²
        assert prof.grad_norm_sq == pytest.approx(math.pi**2, rel=1e-10)

    def test_dilation(self) -> None:
        prof = CoherentProfile.build(0.25, decades=4.0, points_per_decade=8)
        assert prof.scaled_grad_norm_sq == pytest.approx(16.0 * math.pi**2, rel=1e-10)
        assert np.allclose(prof.momenta, prof.kappa / 0.25)
        assert float(prof.g(np.asarray(0.3))) == 0.0

    def test_profile_transform_closed_form(self) -> None:
        k = np.array([0.0, 0.5, math.pi, 7.0, 40.0])
        numeric = radial_fourier_transform(unit_profile, (0.0, 1.0), k)
        assert np.allclose(numeric, unit_profile_hat(k), rtol=1e-9, atol=1e-13)
        assert float(unit_profile_hat(0.0)) == pytest.approx(1.0 / math.pi**2)

    def test_annulus_transform_closed_form(self) -> None:
        k = np.array([0.1, 2.0, math.pi, 11.0])
        numeric = radial_fourier_transform(unit_annulus, (1.0, 2.0), k)
        assert np.allclose(numeric, unit_annulus_hat(k), rtol=1e-9, atol=1e-13)

    def test_invalid_scale(self) -> None:
        with pytest.raises(ValueError):
            CoherentProfile.build(0.0)
        with pytest.raises(ValueError):
            AnnulusProfile.build(-1.0)
        with pytest.raises(ValueError):
            AnnulusProfile.build(1.0, K=-1)

    def test_annulus_orbitals_orthonormal(self) -> None:
        annulus = AnnulusProfile.build(2.0, K=3, decades=4.0, points_per_decade=8)
        assert annulus.normalization_residual < 1e-12
        assert annulus.grad_norm_sq == pytest.approx(math.pi**2 / 4.0, rel=1e-10)
        assert np.allclose(annulus.orbital_gram(4), np.eye(4), atol=1e-10)

    def test_annulus_xi_moment_scaling(self) -> None:
        a1 = AnnulusProfile.build(1.0, decades=4.0, points_per_decade=8)
        a2 = AnnulusProfile.build(3.0, decades=4.0, points_per_decade=8)
        assert a1.xi_moment > 0.0
        assert a2.xi_moment == pytest.approx(a1.xi_moment / 3.0)

    def test_profile_offsets_stay_in_ball(self) -> None:
        rng = np.random.default_rng(3)
        pts = sample_profile_offsets(rng, 500, 0.4)
        assert pts.shape == (500, 3)
        assert np.max(np.linalg.norm(pts, axis=1)) <= 0.4 + 1e-12


class TestTrialSpec:
    def test_classical_density_is_tf_density(self, neutral_atom: TFAtom) -> None:
        rho = classical_density(neutral_atom)
        assert np.allclose(GAMMA_TF * rho ** (2.0 / 3.0), neutral_atom.effective_potential, rtol=1e-10, atol=1e-12)

    def test_trace_gamma1(self, neutral_spec: TrialSpec, ion_spec: TrialSpec) -> None:
        assert trace_gamma1(neutral_spec) == pytest.approx(10.0, rel=1e-6)
        assert trace_gamma1(ion_spec) == pytest.approx(8.0, rel=1e-4)

    @pytest.mark.parametrize(("lam", "Z"), [(1.0, 10.0), (1.0, 100.0), (1.0, 1000.0), (2.0, 10.0)])
    def test_trace_gamma1_counts_nuclear_charge(self, lam: float, Z: float) -> None:
        # N >= Z 时极小化子冻结为中性，迹为 Z 而非 N
        spec = build_trial_spec(solve_atom(AtomSystem.from_lambda(lam, Z)), decades=4.0, points_per_decade=8)
        assert trace_gamma1(spec) == pytest.approx(Z, rel=1e-6)

    def test_trace_gamma_total(self, negative_spec: TrialSpec, ion_spec: TrialSpec) -> None:
        assert trace_gamma_total(negative_spec) == pytest.approx(12.0, rel=1e-6)
        assert trace_gamma_total(ion_spec) == pytest.approx(trace_gamma1(ion_spec))
        with pytest.raises(AnnulusUnavailableError):
            trace_gamma_total(ion_spec, annulus=True)

    def test_eps_r_tilde(self, neutral_spec: TrialSpec) -> None:
        assert 0.0 <= neutral_spec.eps_Rtilde <= 1.0
        assert epsilon_R_tilde(neutral_spec.classical_profile, 10.0, 0.1, 0.2) == 1.0

    def test_critical_annulus_radius(self, neutral_atom: TFAtom) -> None:
        R_tilde = critical_annulus_radius(neutral_atom, 1e-3)
        eps = epsilon_R_tilde(neutral_atom.profile, 10.0, R_tilde, neutral_atom.sys.R)
        assert R_tilde > neutral_atom.sys.R
        assert eps == pytest.approx(1e-3, rel=1e-3)
        with pytest.raises(ValueError):
            critical_annulus_radius(neutral_atom, 1.5)

    def test_restricted_occupancy(self, neutral_spec: TrialSpec) -> None:
        q = np.array([0.5 * neutral_spec.restriction_radius, 2.0 * neutral_spec.restriction_radius])
        assert neutral_spec.occupancy(np.zeros(2), q)[0] == 1.0
        assert neutral_spec.restricted_occupancy(np.zeros(2), q)[1] == 0.0

    def test_smeared_density_width_zero(self, neutral_spec: TrialSpec) -> None:
        assert neutral_spec.smeared_density(0.0) is neutral_spec.rho_classical
        assert neutral_spec.smeared_density() is neutral_spec.rho_smeared


class TestEnergyTerms:
    def test_kinetic_identity(self, neutral_spec: TrialSpec, ion_spec: TrialSpec) -> None:
        for spec in (neutral_spec, ion_spec):
            kin = kinetic_upper(spec)
            assert kin.phase_space == pytest.approx(spec.atom.energy.kinetic, rel=1e-10)
            assert kin.penalty == pytest.approx(trace_gamma1(spec) * math.pi**2 / spec.R**2, rel=1e-10)
            assert kin.total == pytest.approx(kin.phase_space + kin.penalty)

    def test_smearing_weakens_coulomb_terms(self, neutral_spec: TrialSpec) -> None:
        atom = neutral_spec.atom
        assert external_upper(neutral_spec) >= atom.energy.external
        assert hartree_upper(neutral_spec) <= atom.energy.hartree
        assert external_upper(neutral_spec, width=0.0) == pytest.approx(atom.energy.external, rel=1e-10)

    def test_restricted_comparison(self, negative_ion: TFAtom) -> None:
        # R̃ 取小值，使限制确实截掉一部分相空间
        spec = build_trial_spec(negative_ion, R_tilde=1.0, decades=4.0, points_per_decade=8)
        cmp = restricted_comparison(spec)
        assert cmp.kinetic_dominated
        assert cmp.hartree_dominated
        assert cmp.kinetic_restricted < cmp.kinetic_full
        # 去掉外层电子后核吸引变弱
        assert cmp.external_difference > 0.0


class TestGamma2:
    def test_diagnostics_need_surplus(self, neutral_spec: TrialSpec) -> None:
        with pytest.raises(NoSurplusElectronsError):
            gamma2_diagnostics(neutral_spec)

    def test_diagnostics(self, negative_spec: TrialSpec) -> None:
        diag = gamma2_diagnostics(negative_spec)
        assert diag.surplus == pytest.approx(2.0)
        assert diag.external_sign == -1
        assert diag.kinetic_bound > 0.0
        assert diag.interaction_bound > 0.0
        assert set(diag.as_dict()) == {"kinetic_bound", "interaction_bound", "external_sign", "K", "surplus"}

    def test_bounds_decay_with_k(self) -> None:
        annulus = AnnulusProfile.build(1.0, K=4, decades=4.0, points_per_decade=8)
        d4 = gamma2_bounds(annulus, 1.0)
        d5 = gamma2_bounds(annulus, 1.0, K=5)
        assert d5.kinetic_bound == pytest.approx(d4.kinetic_bound / 4.0)
        assert d5.interaction_bound == pytest.approx(d4.interaction_bound / 2.0)
        assert gamma2_bounds(annulus, 2.0).interaction_bound == pytest.approx(2.0 * d4.interaction_bound)
        assert d4.kinetic_bound == pytest.approx((2.0 / 3.0) * 0.25**5 * math.pi**2, rel=1e-10)
        with pytest.raises(ValueError):
            gamma2_bounds(annulus, -1.0)


class TestWavePackets:
    def test_single_gaussian_normalization(self) -> None:
        s = 0.3
        packet = GaussianMixturePacket([1.0], [[0.0, 0.0, 0.0]], [s], [[0.0, 0.0, 0.0]])
        assert abs(packet.value(np.zeros(3))) == pytest.approx((2.0 * math.pi * s * s) ** -0.75)
        x = np.random.default_rng(0).normal(size=(20, 3))
        assert np.allclose(packet.importance_weights(x), 1.0)

    def test_unnormalized_mixture_keeps_norm(self) -> None:
        s = 0.3
        packet = GaussianMixturePacket([10.0], ORIGIN, [s], ORIGIN, normalize=False)
        assert packet.norm_squared == pytest.approx(100.0 * (2.0 * math.pi * s * s) ** 1.5)
        assert abs(packet.value(np.zeros(3))) == pytest.approx(10.0)

    def test_envelope_dominates_density(self) -> None:
        rng = np.random.default_rng(4)
        packet = GaussianMixturePacket.random(rng, 1.0, 0.3)
        x = packet.sample(rng, 2000)
        assert np.all(packet.density(x) <= packet.envelope * packet.proposal_density(x) * (1.0 + 1e-12))

    def test_rejection_sampling_matches_density(self) -> None:
        # 单个高斯 |u|² 为各向同性正态分布，方差 s²
        s = 0.4
        packet = GaussianMixturePacket([1.0, 0.5j], [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], [s, s], ORIGIN * 2)
        x = packet.sample_density(np.random.default_rng(8), 20000)
        assert x.shape == (20000, 3)
        assert np.mean(x, axis=0) == pytest.approx(np.zeros(3), abs=0.02)
        assert np.var(x) == pytest.approx(s * s, rel=0.03)

    def test_invalid_mixture(self) -> None:
        with pytest.raises(ValueError):
            GaussianMixturePacket([1.0, 1.0], [[0.0, 0.0, 0.0]], [0.3], [[0.0, 0.0, 0.0]])
        with pytest.raises(ValueError):
            GaussianMixturePacket([1.0], [[0.0, 0.0, 0.0]], [0.0], [[0.0, 0.0, 0.0]])

    def test_coherent_state_self_overlap(self) -> None:
        prof = CoherentProfile.build(0.5, decades=4.0, points_per_decade=8)
        p = np.array([1.0, -2.0, 0.5])
        q = np.array([0.1, 0.2, 0.3])
        packet = CoherentStatePacket(p, q, prof)
        assert abs(coherent_overlap(prof, p, q, packet)) == pytest.approx(1.0, rel=1e-8)


class TestPositivity:
    def test_expectations_within_unit_interval(self, neutral_spec: TrialSpec) -> None:
        report = positivity_sample(neutral_spec, 4, seed=7, q_samples=6, box_points=12)
        assert report.trial_count == 4
        assert report.within(1e-8)
        assert 0.0 <= report.minimum <= report.maximum <= 1.0 + 1e-12
        assert report.parseval_residual < 1e-12

    def test_scales_with_packet_norm(self, neutral_spec: TrialSpec) -> None:
        args = ([1.0], [[0.05, 0.0, 0.0]], [neutral_spec.R], ORIGIN)
        unit = GaussianMixturePacket(*args)
        big = GaussianMixturePacket([10.0], *args[1:], normalize=False)
        a = packet_expectation(neutral_spec, unit, np.random.default_rng(5), q_samples=6, box_points=12)
        b = packet_expectation(neutral_spec, big, np.random.default_rng(5), q_samples=6, box_points=12)
        assert 0.0 < a <= 1.0 + 1e-12
        assert b == pytest.approx(big.norm_squared * a, rel=1e-10)

    def test_full_occupancy_recovers_norm(self, neutral_spec: TrialSpec, mocker: MockerFixture) -> None:
        mocker.patch.object(TFAtom, "momentum_radius", return_value=np.array([1e9]))
        packet = GaussianMixturePacket([3.0], [[0.05, 0.0, 0.0]], [neutral_spec.R], ORIGIN, normalize=False)
        value = packet_expectation(neutral_spec, packet, np.random.default_rng(2), q_samples=4, box_points=12)
        assert value == pytest.approx(packet.norm_squared, rel=1e-10)

    def test_empty_occupancy_gives_zero(self, neutral_spec: TrialSpec, mocker: MockerFixture) -> None:
        mocker.patch.object(TFAtom, "momentum_radius", return_value=np.array([0.0]))
        report = positivity_sample(neutral_spec, 2, seed=3, q_samples=4, box_points=12)
        assert report.maximum == 0.0

    def test_local_power_parseval(self, neutral_spec: TrialSpec) -> None:
        packet = GaussianMixturePacket.random(np.random.default_rng(6), neutral_spec.atom.sys.Z ** (-1.0 / 3.0), neutral_spec.R)
        power = local_power(neutral_spec, packet, packet.centers[0], box_points=16)
        assert power.position > 0.0
        assert power.parseval_residual < 1e-12
        assert 0.0 <= power.occupied <= power.momentum * (1.0 + 1e-12)

    def test_coherent_state_inside_occupied_region(self, neutral_spec: TrialSpec) -> None:
        packet = CoherentStatePacket(np.zeros(3), [0.05, 0.0, 0.0], neutral_spec.profile)
        value = packet_expectation(neutral_spec, packet, np.random.default_rng(1), q_samples=8, box_points=12)
        assert 0.0 < value <= 1.0 + 1e-8

    def test_seeded_reproducibility(self, neutral_spec: TrialSpec) -> None:
        a = positivity_sample(neutral_spec, 2, seed=11, q_samples=4, box_points=12)
        b = positivity_sample(neutral_spec, 2, seed=11, q_samples=4, box_points=12)
        assert a.values == b.values

    def test_trial_count_validation(self, neutral_spec: TrialSpec) -> None:
        with pytest.raises(ValueError):
            positivity_sample(neutral_spec, 0, seed=0)
