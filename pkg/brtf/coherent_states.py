"""
文件名: coherent_states.py
作者: JQQ
创建日期: 2025/10/13
最后修改日期: 2025/10/16
版权: 2023 JQQ. All rights reserved.
依赖: numpy, scipy
描述:
  中文: 上界试探密度矩阵 γ = γ̃₁ + γ₂ + γ̃₂ 的构造与诊断：相干态轮廓 g、环形轨道 f̃、占据函数 A/Ã、
        迹恒等式、正性抽样，以及相空间动能、外势能与 Hartree 能。
  English: Trial density matrices of the upper bound built from coherent states: profiles, occupancies,
    trace identities, positivity sampling and the phase-space energy terms.

  相空间积分在每个 |q| 处的占据区域是半径 P(q) = (2[V_Z − u']₊)^{1/2} 的动量球，全部化为径向积分。
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import brentq

from brtf.model import log_momentum_grid
from brtf.radial import (
    GridDensity,
    RadialProfile,
    composite_gauss,
    gauss_legendre,
    self_energy,
    smear_with_profile,
    volume_integral,
)
from brtf.tf_solver import TFAtom
from brtf.utils.logger import get_logger

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

PROFILE_NORM: float = 1.0 / math.sqrt(2.0 * math.pi)
# (2π)^{-3/2}·4π
HANKEL_PREFACTOR: float = math.sqrt(2.0 / math.pi)
MOMENT_K_MAX: float = 400.0
DEFAULT_R_TILDE_FACTOR: float = 100.0
DEFAULT_K: int = 20


class AnnulusUnavailableError(ValueError):
    """N < Z 时不存在环形轨道部分 / The annulus parts only exist for N >= Z."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


class NoSurplusElectronsError(ValueError):
    """γ₂ 诊断需要 N > Z / gamma_2 diagnostics need N > Z."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


# ------------------------------
# 单位轮廓及其 Fourier 变换 / unit profiles and transforms
# ------------------------------


def unit_profile(r: ArrayLike) -> FloatArray:
    """g(r) = (2π)^{-1/2} sin(πr)/r on the unit ball."""
    rr = np.abs(np.asarray(r, dtype=float))
    return np.where(rr < 1.0, PROFILE_NORM * math.pi * np.sinc(rr), 0.0)


def unit_profile_derivative(r: ArrayLike) -> FloatArray:
    rr = np.abs(np.asarray(r, dtype=float))
    safe = np.where(rr > 0, rr, 1.0)
    x = math.pi * safe
    d = PROFILE_NORM * (x * np.cos(x) - np.sin(x)) / safe**2
    return np.where((rr > 0) & (rr < 1.0), d, 0.0)


def unit_profile_hat(k: ArrayLike) -> FloatArray:
    """Closed form ĝ(k) = sin k / (k (π² − k²)), removable points k = 0 and k = π included."""
    kk = np.abs(np.asarray(k, dtype=float))
    near = np.abs(kk - math.pi) < 0.5
    safe = np.where(near, kk, math.pi)
    a = np.sinc(1.0 - safe / math.pi) / (safe * (math.pi + safe))
    other = np.where(near, 0.0, kk)
    b = np.sinc(other / math.pi) / (math.pi**2 - other**2)
    return np.where(near, a, b)


def unit_annulus(r: ArrayLike) -> FloatArray:
    """f̃ for R̃ = 1: (2π)^{-1/2} sin(π(r − 1))/r on 1 <= r <= 2."""
    rr = np.abs(np.asarray(r, dtype=float))
    inside = (rr >= 1.0) & (rr <= 2.0)
    safe = np.where(inside, rr, 1.0)
    return np.where(inside, PROFILE_NORM * np.sin(math.pi * (safe - 1.0)) / safe, 0.0)


def unit_annulus_derivative(r: ArrayLike) -> FloatArray:
    rr = np.abs(np.asarray(r, dtype=float))
    inside = (rr > 1.0) & (rr < 2.0)
    safe = np.where(inside, rr, 1.5)
    x = math.pi * (safe - 1.0)
    d = PROFILE_NORM * (math.pi * np.cos(x) / safe - np.sin(x) / safe**2)
    return np.where(inside, d, 0.0)


def unit_annulus_hat(k: ArrayLike) -> FloatArray:
    """Closed form (sin k + sin 2k) / (k (π² − k²))."""
    kk = np.abs(np.asarray(k, dtype=float))
    near = np.abs(kk - math.pi) < 0.5
    safe = np.where(near, kk, math.pi)
    a = np.sinc(1.0 - safe / math.pi) * (1.0 + 2.0 * np.cos(safe)) / (safe * (math.pi + safe))
    other = np.where(near, 0.0, kk)
    b = (np.sinc(other / math.pi) + 2.0 * np.sinc(2.0 * other / math.pi)) / (math.pi**2 - other**2)
    return np.where(near, a, b)


def radial_fourier_transform(
    f: Callable[[FloatArray], FloatArray],
    support: tuple[float, float],
    k: ArrayLike,
    *,
    nodes: int = 16,
    min_panels: int = 64,
) -> FloatArray:
    """
    中文:
      球对称函数的 Fourier 变换 f̂(k) = (2π)^{-3/2}·4π ∫ f(r) j0(kr) r² dr（零阶 Hankel 变换）。
      复合 Gauss-Legendre 的面板宽度随最大 k 缩小，保证每个振荡周期内有足够节点。
    English:
      Order-0 Hankel transform of a compactly supported radial function by composite Gauss-Legendre
      panels fine enough to resolve the largest requested momentum.
    """
    a, b = support
    kk = np.asarray(k, dtype=float)
    k_max = float(np.max(np.abs(kk))) if kk.size else 0.0
    panels = max(min_panels, int(math.ceil(k_max * (b - a) / 2.0)))
    x, w = composite_gauss(np.linspace(a, b, panels + 1), nodes)
    fx = f(x) * x * x * w
    flat = kk.ravel()
    out = np.empty_like(flat)
    chunks = max(1, flat.size * x.size // 2_000_000)
    for idx in np.array_split(np.arange(flat.size), chunks):
        out[idx] = np.sinc(np.outer(flat[idx], x) / math.pi) @ fx
    return HANKEL_PREFACTOR * out.reshape(kk.shape)


@lru_cache(maxsize=8)
def _unit_profile_transform(decades: float, points_per_decade: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    kappa, widths = log_momentum_grid(1.0, decades, points_per_decade)
    g_hat = radial_fourier_transform(unit_profile, (0.0, 1.0), kappa)
    for arr in (kappa, widths, g_hat):
        arr.setflags(write=False)
    return kappa, widths, g_hat


@lru_cache(maxsize=8)
def _unit_annulus_transform(decades: float, points_per_decade: int) -> tuple[FloatArray, FloatArray]:
    kappa, _ = log_momentum_grid(1.0, decades, points_per_decade)
    f_hat = radial_fourier_transform(unit_annulus, (1.0, 2.0), kappa)
    for arr in (kappa, f_hat):
        arr.setflags(write=False)
    return kappa, f_hat


def _unit_norms(
    f: Callable[[FloatArray], FloatArray],
    df: Callable[[FloatArray], FloatArray],
    support: tuple[float, float],
) -> tuple[float, float]:
    """(∫f², ∫|∇f|²) for a radial f on ``support``."""
    r, w = composite_gauss(np.linspace(support[0], support[1], 17), 32)
    jac = 4.0 * math.pi * r * r * w
    return float(np.sum(f(r) ** 2 * jac)), float(np.sum(df(r) ** 2 * jac))


@lru_cache(maxsize=1)
def _unit_annulus_xi_moment() -> float:
    """
    4π∫|f̂̃(κ)|²κ³dκ for R̃ = 1 from the numerical transform on [0, MOMENT_K_MAX]; beyond it |f̂̃|² averages
    to κ^{-6}, which leaves a tail of 2π/κ_max².
    """
    kappa, w = composite_gauss(np.linspace(0.0, MOMENT_K_MAX, int(MOMENT_K_MAX) + 1), 8)
    f_hat = radial_fourier_transform(unit_annulus, (1.0, 2.0), kappa)
    body = 4.0 * math.pi * float(np.sum(f_hat**2 * kappa**3 * w))
    return body + 2.0 * math.pi / MOMENT_K_MAX**2


@lru_cache(maxsize=1)
def _profile_radius_table() -> tuple[FloatArray, FloatArray]:
    # 4πr²g² = 2 sin²(πr) 的分布函数
    r = np.linspace(0.0, 1.0, 4097)
    cdf = r - np.sin(2.0 * math.pi * r) / (2.0 * math.pi)
    return cdf, r


def sample_profile_offsets(rng: np.random.Generator, n: int, R: float) -> FloatArray:
    """Draw ``n`` points from the density g_R² (shape (n, 3))."""
    cdf, r = _profile_radius_table()
    radius = R * np.interp(rng.random(n), cdf, r)
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return radius[:, None] * direction


# ------------------------------
# 轮廓类型 / profile types
# ------------------------------


@dataclass(frozen=True, eq=False)
class CoherentProfile:
    """
    中文:
      相干态轮廓 g_R(x) = R^{-3/2} g(x/R)。数值 Fourier 变换存放在单位对数动量网格 kappa 上，
      物理动量为 kappa/R，对应值为 R^{3/2} ĝ(kappa)。
    English:
      Dilated coherent-state profile with its numerical transform on a log momentum grid.
    """

    R: float
    kappa: FloatArray
    kappa_widths: FloatArray
    g_hat_unit: FloatArray
    norm: float
    grad_norm_sq: float

    @classmethod
    def build(cls, R: float, decades: float = 8.0, points_per_decade: int = 64) -> CoherentProfile:
        if R <= 0:
            raise ValueError(f"相干态尺度 R 必须为正，当前 {R}")
        kappa, widths, g_hat = _unit_profile_transform(float(decades), int(points_per_decade))
        norm, grad = _unit_norms(unit_profile, unit_profile_derivative, (0.0, 1.0))
        return cls(R=R, kappa=kappa, kappa_widths=widths, g_hat_unit=g_hat, norm=norm, grad_norm_sq=grad)

    @property
    def momenta(self) -> FloatArray:
        return self.kappa / self.R

    @property
    def momentum_widths(self) -> FloatArray:
        return self.kappa_widths / self.R

    @property
    def g_hat(self) -> FloatArray:
        return self.R**1.5 * self.g_hat_unit

    @property
    def scaled_grad_norm_sq(self) -> float:
        """‖∇g_R‖² = ‖∇g‖²/R²."""
        return self.grad_norm_sq / self.R**2

    def g(self, x: ArrayLike) -> FloatArray:
        return self.R**-1.5 * unit_profile(np.asarray(x, dtype=float) / self.R)

    def g_hat_exact(self, k: ArrayLike) -> FloatArray:
        return self.R**1.5 * unit_profile_hat(self.R * np.asarray(k, dtype=float))


@dataclass(frozen=True, eq=False)
class AnnulusProfile:
    """
    中文: 环形轨道 f̃（支撑 R̃ ≤ |x| ≤ 2R̃）及其二进伸缩族 φ_k(x) = 2^{-3k/2} f̃(x/2^k)。
    English: Annulus orbital and its dyadic family; norms and the |ξ|-moment are computed numerically.
    """

    R_tilde: float
    K: int
    kappa: FloatArray
    f_hat_unit: FloatArray
    norm: float
    unit_grad_norm_sq: float
    unit_xi_moment: float

    @classmethod
    def build(cls, R_tilde: float, K: int = DEFAULT_K, decades: float = 8.0, points_per_decade: int = 64) -> AnnulusProfile:
        if R_tilde <= 0:
            raise ValueError(f"R̃ 必须为正，当前 {R_tilde}")
        if K < 0:
            raise ValueError(f"K 必须非负，当前 {K}")
        kappa, f_hat = _unit_annulus_transform(float(decades), int(points_per_decade))
        norm, grad = _unit_norms(unit_annulus, unit_annulus_derivative, (1.0, 2.0))
        return cls(
            R_tilde=R_tilde,
            K=K,
            kappa=kappa,
            f_hat_unit=f_hat,
            norm=norm,
            unit_grad_norm_sq=grad,
            unit_xi_moment=_unit_annulus_xi_moment(),
        )

    @property
    def normalization_residual(self) -> float:
        return abs(self.norm - 1.0)

    @property
    def grad_norm_sq(self) -> float:
        """‖∇f̃‖², equal to π²/R̃²."""
        return self.unit_grad_norm_sq / self.R_tilde**2

    @property
    def xi_moment(self) -> float:
        """∫|f̂̃(ξ)|²|ξ| dξ, scaling as 1/R̃."""
        return self.unit_xi_moment / self.R_tilde

    @property
    def f_hat(self) -> FloatArray:
        return self.R_tilde**1.5 * self.f_hat_unit

    def f_tilde(self, x: ArrayLike) -> FloatArray:
        return self.R_tilde**-1.5 * unit_annulus(np.asarray(x, dtype=float) / self.R_tilde)

    def orbital(self, index: int, x: ArrayLike) -> FloatArray:
        scale = 2.0**index
        return scale**-1.5 * self.f_tilde(np.asarray(x, dtype=float) / scale)

    def orbital_gram(self, count: int) -> FloatArray:
        """Gram matrix of φ_0 .. φ_{count-1}; the identity up to quadrature error."""
        edges = self.R_tilde * 2.0 ** np.arange(count + 1)
        r, w = composite_gauss(edges, 48)
        values = np.stack([self.orbital(i, r) for i in range(count)])
        return (values * (4.0 * math.pi * r * r * w)) @ values.T


@lru_cache(maxsize=64)
def coherent_profile(R: float, decades: float = 8.0, points_per_decade: int = 64) -> CoherentProfile:
    return CoherentProfile.build(R, decades, points_per_decade)


class TruncatedProfile(RadialProfile):
    """σ restricted to the ball |x| <= radius."""

    def __init__(self, base: RadialProfile, radius: float) -> None:
        self.base = base
        self.radius = max(radius, 0.0)

    def density(self, s: ArrayLike) -> FloatArray:
        ss = np.asarray(s, dtype=float)
        return np.where(ss <= self.radius, self.base.density(ss), 0.0)

    def mass_within(self, r: ArrayLike) -> FloatArray:
        rr = np.asarray(r, dtype=float)
        return self.base.mass_within(np.minimum(rr, self.radius))

    @property
    def total_mass(self) -> float:
        return float(self.base.mass_within(np.asarray(self.radius)))

    @property
    def support_radius(self) -> float:
        return min(self.radius, self.base.support_radius)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.radius, *self.base.breakpoints)


# ------------------------------
# 试探态 / trial state
# ------------------------------


def classical_density(atom: TFAtom) -> FloatArray:
    """ρ_cl = 2(2π)^{-3}(4π/3)(2[V_Z − u']₊)^{3/2}, evaluated from the potential."""
    return (2.0 * atom.effective_potential) ** 1.5 / (3.0 * math.pi**2)


def epsilon_R_tilde(density: RadialProfile, Z: float, R_tilde: float, R: float) -> float:
    """ε_R̃ = 1 − (mass of ρ_cl inside |q| <= R̃ − R)/Z, clipped to [0, 1]."""
    radius = R_tilde - R
    if radius <= 0:
        return 1.0
    inside = float(density.mass_within(np.asarray(radius)))
    return float(min(max(1.0 - inside / Z, 0.0), 1.0))


@dataclass(frozen=True, eq=False)
class TrialSpec:
    """
    中文:
      试探密度矩阵的全部数据。占据 A(p,q) = 1{p²/2 ≤ V_Z(q) − u'}，限制占据 Ã = A·1{|q| ≤ R̃ − R}，
      smeared_density 为 ρ_cl ∗ g_R²。构造后不可变，可并发读取。
    English:
      Immutable bundle of the solved atom, the coherent and annulus profiles, the restriction parameter
      eps_Rtilde and the smeared density.
    """

    atom: TFAtom
    profile: CoherentProfile
    annulus: AnnulusProfile
    rho_classical: FloatArray
    rho_smeared: FloatArray
    eps_Rtilde: float

    @property
    def R(self) -> float:
        return self.profile.R

    @property
    def R_tilde(self) -> float:
        return self.annulus.R_tilde

    @property
    def K(self) -> int:
        return self.annulus.K

    @property
    def restriction_radius(self) -> float:
        return max(self.R_tilde - self.R, 0.0)

    @property
    def r(self) -> FloatArray:
        return self.atom.r

    @cached_property
    def classical_profile(self) -> GridDensity:
        return GridDensity(self.atom.r, self.rho_classical)

    def occupancy(self, p: ArrayLike, q: ArrayLike) -> FloatArray:
        pp = np.abs(np.asarray(p, dtype=float))
        return (pp <= self.atom.momentum_radius(q)).astype(float)

    def restricted_occupancy(self, p: ArrayLike, q: ArrayLike) -> FloatArray:
        qq = np.abs(np.asarray(q, dtype=float))
        return self.occupancy(p, qq) * (qq <= self.restriction_radius)

    def smeared_density(self, width: float | None = None) -> FloatArray:
        """ρ_cl ∗ g_w²; ``width`` defaults to R, and 0 returns ρ_cl itself."""
        if width is None:
            return self.rho_smeared
        if width == 0:
            return self.rho_classical
        return smear_with_profile(self.classical_profile, self.r, width)


def build_trial_spec(
    atom: TFAtom,
    R_tilde: float | None = None,
    *,
    R_tilde_factor: float = DEFAULT_R_TILDE_FACTOR,
    K: int = DEFAULT_K,
    decades: float = 8.0,
    points_per_decade: int = 64,
) -> TrialSpec:
    """
    中文: 由 TF 原子构造试探态；R̃ 默认取 R_tilde_factor·Z^{-1/3}。
    English: Assemble the trial state for a solved atom.
    """
    Z = atom.sys.Z
    if R_tilde is None:
        R_tilde = R_tilde_factor * Z ** (-1.0 / 3.0)
    profile = coherent_profile(atom.sys.R, decades, points_per_decade)
    annulus = AnnulusProfile.build(R_tilde, K, decades, points_per_decade)
    rho_cl = classical_density(atom)
    cl_profile = GridDensity(atom.r, rho_cl)
    eps = epsilon_R_tilde(cl_profile, Z, R_tilde, profile.R)
    smeared = smear_with_profile(cl_profile, atom.r, profile.R)
    smeared.setflags(write=False)
    rho_cl.setflags(write=False)
    logger.debug("试探态: Z=%.4g, R=%.4e, R̃=%.4e, ε_R̃=%.3e, K=%d", Z, profile.R, R_tilde, eps, K)
    spec = TrialSpec(atom=atom, profile=profile, annulus=annulus, rho_classical=rho_cl, rho_smeared=smeared, eps_Rtilde=eps)
    return spec


def critical_annulus_radius(atom: TFAtom, target: float = 1e-3) -> float:
    """
    中文: 使 ε_R̃ ≤ target 的最小 R̃，即 ρ_cl 在半径 R̃ − R 内的质量达到 (1 − target)Z。
    English: Smallest R̃ with eps_Rtilde <= target.

    Raises:
        ValueError: target 不在 (0, 1) 或网格内质量不足
    """
    if not 0 < target < 1:
        raise ValueError(f"target 必须位于 (0, 1)，当前 {target}")
    Z = atom.sys.Z
    profile = GridDensity(atom.r, classical_density(atom))
    goal = (1.0 - target) * Z
    if profile.total_mass < goal:
        raise ValueError(f"网格内质量 {profile.total_mass:.6g} 不足 {goal:.6g}")
    lo, hi = math.log(atom.r[0]), math.log(atom.r[-1])
    log_radius = brentq(lambda s: float(profile.mass_within(np.asarray(math.exp(s)))) - goal, lo, hi, xtol=1e-12)
    return math.exp(log_radius) + atom.sys.R


# ------------------------------
# 迹 / traces
# ------------------------------


def trace_gamma1(spec: TrialSpec) -> float:
    """tr γ₁ = ∫ρ_cl; equals min(N, Z) for the TF minimizer."""
    return volume_integral(spec.r, spec.rho_classical)


def trace_gamma_total(spec: TrialSpec, annulus: bool | None = None) -> float:
    """
    中文:
      tr γ = ∫Ã dΩ + (N − Z) + ε_R̃·Z。annulus 默认在 N > Z 时启用；未启用时返回 tr γ₁。
    English:
      Trace of the full trial matrix. Without the annulus parts this is the trace of gamma_1.

    Raises:
        AnnulusUnavailableError: N < Z 且要求环形部分
    """
    sys = spec.atom.sys
    use_annulus = sys.N > sys.Z if annulus is None else annulus
    if not use_annulus:
        return trace_gamma1(spec)
    if sys.N < sys.Z:
        raise AnnulusUnavailableError(f"N={sys.N} < Z={sys.Z} 时不存在 γ₂、γ̃₂")
    restricted = float(spec.classical_profile.mass_within(np.asarray(spec.restriction_radius))) if spec.restriction_radius > 0 else 0.0
    return restricted + (sys.N - sys.Z) + spec.eps_Rtilde * sys.Z


# ------------------------------
# 能量项 / energy terms
# ------------------------------


@dataclass(frozen=True)
class KineticUpper:
    phase_space: float
    penalty: float

    @property
    def total(self) -> float:
        return self.phase_space + self.penalty


def _phase_space_integrand(spec: TrialSpec) -> FloatArray:
    # 2(2π)^{-3}·4π P⁵/10 = P⁵/(10π²)
    return (2.0 * spec.atom.effective_potential) ** 2.5 / (10.0 * math.pi**2)


def kinetic_upper(spec: TrialSpec) -> KineticUpper:
    """
    中文: 相空间动能 2(2π)^{-3}∬_A p²/2 与局域化代价 tr γ₁·‖∇g‖²/R²。
    English: Phase-space kinetic energy and the localization penalty.
    """
    phase = volume_integral(spec.r, _phase_space_integrand(spec))
    penalty = trace_gamma1(spec) * spec.profile.scaled_grad_norm_sq
    return KineticUpper(phase_space=phase, penalty=penalty)


def external_upper(spec: TrialSpec, width: float | None = None) -> float:
    """−Z∫(ρ_cl ∗ g_R²)/|x|; ``width`` overrides R for the smearing."""
    rho = spec.smeared_density(width)
    return -spec.atom.sys.Z * volume_integral(spec.r, rho / spec.r)


def hartree_upper(spec: TrialSpec, width: float | None = None) -> float:
    """D(ρ_R, ρ_R) with ρ_R = ρ_cl ∗ g_R²."""
    return self_energy(spec.r, spec.smeared_density(width))


@dataclass(frozen=True)
class Gamma2Diagnostics:
    kinetic_bound: float
    interaction_bound: float
    external_sign: int
    K: int
    surplus: float
    grad_norm_sq: float
    xi_moment: float

    def as_dict(self) -> dict[str, float]:
        return {
            "kinetic_bound": self.kinetic_bound,
            "interaction_bound": self.interaction_bound,
            "external_sign": float(self.external_sign),
            "K": float(self.K),
            "surplus": self.surplus,
        }


def gamma2_bounds(annulus: AnnulusProfile, surplus: float, K: int | None = None) -> Gamma2Diagnostics:
    """
    中文: (2/3)(1/4)^{K+1}‖∇f̃‖² 与 (π/4)(N−Z)(1/2)^K ∫|f̂̃|²|ξ|；外势项只会降低能量，记为负号。
    English: Kinetic and interaction bounds of the surplus-electron part for a given surplus N - Z.
    """
    if surplus < 0:
        raise ValueError(f"surplus 必须非负，当前 {surplus}")
    k = annulus.K if K is None else K
    kinetic = (2.0 / 3.0) * 0.25 ** (k + 1) * annulus.grad_norm_sq
    interaction = (math.pi / 4.0) * surplus * 0.5**k * annulus.xi_moment
    return Gamma2Diagnostics(
        kinetic_bound=kinetic,
        interaction_bound=interaction,
        external_sign=-1,
        K=k,
        surplus=surplus,
        grad_norm_sq=annulus.grad_norm_sq,
        xi_moment=annulus.xi_moment,
    )


def gamma2_diagnostics(spec: TrialSpec) -> Gamma2Diagnostics:
    """
    Raises:
        NoSurplusElectronsError: N <= Z
    """
    sys = spec.atom.sys
    if sys.N <= sys.Z:
        raise NoSurplusElectronsError(f"γ₂ 仅在 N > Z 时存在，当前 N={sys.N}, Z={sys.Z}")
    return gamma2_bounds(spec.annulus, sys.N - sys.Z)


@dataclass(frozen=True)
class RestrictedComparison:
    kinetic_full: float
    kinetic_restricted: float
    hartree_full: float
    hartree_restricted: float
    external_difference: float

    @property
    def kinetic_dominated(self) -> bool:
        return self.kinetic_restricted <= self.kinetic_full * (1.0 + 1e-12)

    @property
    def hartree_dominated(self) -> bool:
        return self.hartree_restricted <= self.hartree_full * (1.0 + 1e-12)


def restricted_comparison(spec: TrialSpec) -> RestrictedComparison:
    """
    中文: 比较 γ̃₁ 与 γ₁ 的动能、Hartree 能；核吸引差 tr[(−Z/|x|)(γ̃₁ − γ₁)] 带符号报告。
    English: Restricted versus full one-body terms; the nuclear-attraction difference is reported signed.
    """
    radius = spec.restriction_radius
    phase = _phase_space_integrand(spec)
    kinetic_full = volume_integral(spec.r, phase)
    kinetic_restricted = float(GridDensity(spec.r, phase).mass_within(np.asarray(radius))) if radius > 0 else 0.0
    truncated = TruncatedProfile(spec.classical_profile, radius)
    rho_restricted = smear_with_profile(truncated, spec.r, spec.R)
    Z = spec.atom.sys.Z
    external_diff = -Z * volume_integral(spec.r, (rho_restricted - spec.rho_smeared) / spec.r)
    return RestrictedComparison(
        kinetic_full=kinetic_full,
        kinetic_restricted=kinetic_restricted,
        hartree_full=hartree_upper(spec),
        hartree_restricted=self_energy(spec.r, rho_restricted),
        external_difference=external_diff,
    )


# ------------------------------
# 波包与正性抽样 / wave packets and positivity sampling
# ------------------------------


class WavePacket(ABC):
    """
    中文: 试探波函数 u；提供取值、建议分布抽样及其密度，并按 |u|²/‖u‖² 做精确拒绝抽样。
    English: Trial wave function with a proposal distribution and exact rejection sampling from |u|²/‖u‖².
    """

    norm_squared: float = 1.0

    @abstractmethod
    def value(self, x: FloatArray) -> ComplexArray:
        """u(x) for points of shape (..., 3)."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, n: int) -> FloatArray: ...

    @abstractmethod
    def proposal_density(self, x: FloatArray) -> FloatArray: ...

    @property
    @abstractmethod
    def envelope(self) -> float:
        """Constant M with |u(x)|² <= M·proposal_density(x) everywhere."""

    def density(self, x: FloatArray) -> FloatArray:
        return np.abs(self.value(x)) ** 2

    def importance_weights(self, x: FloatArray) -> FloatArray:
        prop = self.proposal_density(x)
        return np.where(prop > 0, self.density(x) / np.where(prop > 0, prop, 1.0), 0.0)

    def sample_density(self, rng: np.random.Generator, n: int, max_rounds: int = 1000) -> FloatArray:
        """Draw ``n`` points from |u|²/‖u‖² by rejection against the proposal."""
        batch = int(min(100_000, max(16, 2 * n) * math.ceil(self.envelope / self.norm_squared)))
        accepted: list[FloatArray] = []
        count = 0
        for _ in range(max_rounds):
            x = self.sample(rng, batch)
            keep = rng.random(batch) * self.envelope <= self.importance_weights(x)
            accepted.append(x[keep])
            count += int(keep.sum())
            if count >= n:
                return np.concatenate(accepted)[:n]
        raise RuntimeError(f"拒绝抽样在 {max_rounds} 轮内未取满 {n} 个点")


class GaussianMixturePacket(WavePacket):
    """u(x) = Σ_j c_j exp(−|x − X_j|²/(4s_j²) + i k_j·x), normalized analytically unless ``normalize=False``."""

    def __init__(
        self,
        amplitudes: ArrayLike,
        centers: ArrayLike,
        widths: ArrayLike,
        boosts: ArrayLike,
        *,
        normalize: bool = True,
    ) -> None:
        c = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
        X = np.atleast_2d(np.asarray(centers, dtype=float))
        s = np.atleast_1d(np.asarray(widths, dtype=float))
        k = np.atleast_2d(np.asarray(boosts, dtype=float))
        if not (c.shape[0] == X.shape[0] == s.shape[0] == k.shape[0]) or X.shape[1] != 3 or k.shape[1] != 3:
            raise ValueError("高斯混合的参数维度不一致")
        if np.any(s <= 0):
            raise ValueError("高斯宽度必须为正")
        self.centers = X
        self.widths = s
        self.boosts = k
        norm_sq = float(np.real(np.conj(c) @ self._overlaps() @ c))
        if norm_sq <= 0:
            raise ValueError("高斯混合范数为零")
        if normalize:
            self.amplitudes = c / math.sqrt(norm_sq)
            self.norm_squared = 1.0
        else:
            self.amplitudes = c
            self.norm_squared = norm_sq
        mass = np.abs(self.amplitudes) ** 2 * (2.0 * math.pi * s * s) ** 1.5
        self._incoherent_mass = float(mass.sum())
        self._mix = mass / self._incoherent_mass

    def _overlaps(self) -> ComplexArray:
        a = 1.0 / (4.0 * self.widths**2)
        ai, aj = a[:, None], a[None, :]
        A = ai + aj
        Xi, Xj = self.centers[:, None, :], self.centers[None, :, :]
        dk = self.boosts[None, :, :] - self.boosts[:, None, :]
        m = (ai[..., None] * Xi + aj[..., None] * Xj) / A[..., None]
        exponent = -(ai * aj / A) * np.sum((Xi - Xj) ** 2, axis=-1) - np.sum(dk * dk, axis=-1) / (4.0 * A) + 1j * np.sum(m * dk, axis=-1)
        return (math.pi / A) ** 1.5 * np.exp(exponent)

    @classmethod
    def random(cls, rng: np.random.Generator, length_scale: float, width_scale: float, max_components: int = 3) -> GaussianMixturePacket:
        m = int(rng.integers(1, max_components + 1))
        direction = rng.normal(size=(m, 3))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        centers = direction * (3.0 * length_scale * rng.random(m) ** (1.0 / 3.0))[:, None]
        widths = width_scale * rng.uniform(0.5, 3.0, size=m)
        boost_dir = rng.normal(size=(m, 3))
        boost_dir /= np.linalg.norm(boost_dir, axis=1, keepdims=True)
        boosts = boost_dir * (rng.uniform(0.0, 2.0, size=m) / width_scale)[:, None]
        amplitudes = rng.normal(size=m) + 1j * rng.normal(size=m)
        return cls(amplitudes, centers, widths, boosts)

    @property
    def envelope(self) -> float:
        # Cauchy-Schwarz: |Σ_j a_j φ_j|² <= m Σ_j |a_j φ_j|²
        return self.widths.size * self._incoherent_mass

    def value(self, x: FloatArray) -> ComplexArray:
        xx = np.asarray(x, dtype=float)[..., None, :]
        d2 = np.sum((xx - self.centers) ** 2, axis=-1)
        phase = np.sum(xx * self.boosts, axis=-1)
        return np.sum(self.amplitudes * np.exp(-d2 / (4.0 * self.widths**2) + 1j * phase), axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> FloatArray:
        comp = rng.choice(self.widths.size, size=n, p=self._mix)
        return self.centers[comp] + self.widths[comp, None] * rng.normal(size=(n, 3))

    def proposal_density(self, x: FloatArray) -> FloatArray:
        xx = np.asarray(x, dtype=float)[..., None, :]
        d2 = np.sum((xx - self.centers) ** 2, axis=-1)
        s2 = self.widths**2
        return np.sum(self._mix * (2.0 * math.pi * s2) ** -1.5 * np.exp(-d2 / (2.0 * s2)), axis=-1)


class CoherentStatePacket(WavePacket):
    """F_{p,q}(x) = g_R(x − q) e^{ip·x}."""

    def __init__(self, momentum: ArrayLike, position: ArrayLike, profile: CoherentProfile) -> None:
        self.momentum = np.asarray(momentum, dtype=float).reshape(3)
        self.position = np.asarray(position, dtype=float).reshape(3)
        self.profile = profile
        self.norm_squared = profile.norm

    @property
    def envelope(self) -> float:
        return self.norm_squared

    def value(self, x: FloatArray) -> ComplexArray:
        xx = np.asarray(x, dtype=float)
        dist = np.linalg.norm(xx - self.position, axis=-1)
        return self.profile.g(dist) * np.exp(1j * (xx @ self.momentum))

    def sample(self, rng: np.random.Generator, n: int) -> FloatArray:
        return self.position + sample_profile_offsets(rng, n, self.profile.R)

    def proposal_density(self, x: FloatArray) -> FloatArray:
        dist = np.linalg.norm(np.asarray(x, dtype=float) - self.position, axis=-1)
        return self.profile.g(dist) ** 2 / self.norm_squared


def coherent_overlap(
    profile: CoherentProfile,
    p: ArrayLike,
    q: ArrayLike,
    packet: WavePacket,
    *,
    radial_nodes: int = 48,
    polar_nodes: int = 32,
) -> complex:
    """
    中文: 直接在以 q 为心的球上做三维求积 ⟨F_{p,q}, u⟩ = ∫ g_R(x − q) e^{−ip·x} u(x) dx。
    English: Direct spherical cubature of the coherent-state overlap.
    """
    pp = np.asarray(p, dtype=float).reshape(3)
    qq = np.asarray(q, dtype=float).reshape(3)
    r, wr = gauss_legendre(0.0, profile.R, radial_nodes)
    mu, wmu = gauss_legendre(-1.0, 1.0, polar_nodes)
    n_phi = 2 * polar_nodes
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1.0 - mu**2)
    dirs = np.stack(
        [sin_t[:, None] * np.cos(phi)[None, :], sin_t[:, None] * np.sin(phi)[None, :], np.broadcast_to(mu[:, None], (mu.size, n_phi))],
        axis=-1,
    )
    x = qq + r[:, None, None, None] * dirs[None, :, :, :]
    integrand = profile.g(r)[:, None, None] * np.exp(-1j * (x @ pp)) * packet.value(x)
    weights = (r * r * wr)[:, None, None] * wmu[None, :, None] * (2.0 * math.pi / n_phi)
    return complex(np.sum(integrand * weights))


def _node_weights(p_norm: FloatArray, P: float, dp: float) -> FloatArray:
    # 每个 FFT 动量格点代表体积 Δp³ 的小球，按球被 P 截取的比例近似计权
    a = dp * (3.0 / (4.0 * math.pi)) ** (1.0 / 3.0)
    w = np.clip((P - p_norm) / (2.0 * a) + 0.5, 0.0, 1.0)
    w[p_norm == 0] = min(1.0, (P / a) ** 3)
    return w


@dataclass(frozen=True)
class LocalPower:
    """
    中文: 固定 q 处 |⟨F_{p,q}, u⟩|² 的动量积分（含 (2π)^{-3}）：占据球内、全动量空间，以及位置空间的 ∫|g_R(x − q)u(x)|²dx。
    English: Occupied and total momentum power of g_R(x - q) u(x), plus its position-space norm.
    """

    occupied: float
    momentum: float
    position: float

    @property
    def parseval_residual(self) -> float:
        if self.position <= 0:
            return 0.0
        return abs(self.momentum - self.position) / self.position


def local_power(spec: TrialSpec, packet: WavePacket, q: FloatArray, box_points: int = 32) -> LocalPower:
    """
    中文:
      在边长 4R 的盒子上对 g_R(x − q)u(x) 做 FFT：⟨F_{p,q}, u⟩ ≈ Δx³·FFT，每个格点代表动量体积 (2π/L)³，
      故 ∫ dp/(2π)³ |⟨F_{p,q}, u⟩|² ≈ Δx⁶/L³ Σ|FFT|²。占据部分按 |p| ≤ P(q) 计权，不做任何归一化。
    English:
      Absolutely normalized FFT estimate of the occupied momentum power at q.
    """
    R = spec.R
    length = 4.0 * R
    dx = length / box_points
    offsets = (np.arange(box_points) - 0.5 * (box_points - 1)) * dx
    grid = np.stack(np.meshgrid(offsets, offsets, offsets, indexing="ij"), axis=-1)
    window = spec.profile.g(np.linalg.norm(grid, axis=-1))
    field = window * packet.value(q + grid)
    cell = dx**3
    spectrum = np.abs(np.fft.fftn(field)) ** 2 * (cell * cell / length**3)
    position = float(cell * np.sum(np.abs(field) ** 2))
    P = float(spec.atom.momentum_radius(np.asarray([np.linalg.norm(q)]))[0])
    occupied = 0.0
    if P > 0:
        freq = 2.0 * math.pi * np.fft.fftfreq(box_points, d=dx)
        px, py, pz = np.meshgrid(freq, freq, freq, indexing="ij")
        p_norm = np.sqrt(px**2 + py**2 + pz**2)
        occupied = float(np.sum(_node_weights(p_norm, P, 2.0 * math.pi / length) * spectrum))
    return LocalPower(occupied=occupied, momentum=float(spectrum.sum()), position=position)


def _sampled_powers(
    spec: TrialSpec,
    packet: WavePacket,
    rng: np.random.Generator,
    q_samples: int,
    box_points: int,
) -> list[LocalPower]:
    if q_samples < 1:
        raise ValueError("q_samples 必须 >= 1")
    # q = x + y，x ~ |u|²/‖u‖²，y ~ g_R²，故 q 的密度为 (|u|² ∗ g_R²)(q)/‖u‖²
    q = packet.sample_density(rng, q_samples) + sample_profile_offsets(rng, q_samples, spec.R)
    return [local_power(spec, packet, qi, box_points) for qi in q]


def _expectation(packet: WavePacket, powers: Sequence[LocalPower]) -> float:
    terms = [pw.occupied / pw.position for pw in powers if pw.position > 0]
    return packet.norm_squared * float(np.sum(terms)) / len(powers)


def packet_expectation(
    spec: TrialSpec,
    packet: WavePacket,
    rng: np.random.Generator,
    *,
    q_samples: int = 48,
    box_points: int = 32,
) -> float:
    """
    中文:
      (u, γ₁u) = ∫ dq ∫_{|p|≤P(q)} dp/(2π)³ |⟨F_{p,q}, u⟩|²。q 从密度 t(q)/‖u‖² 精确抽取，其中
      t(q) = ∫|g_R(x − q)u(x)|²dx 为位置空间局部功率，估计量为 ‖u‖²·mean(occupied/t)；结果随 ‖u‖² 线性缩放。
    English: Importance-sampling estimate of (u, gamma_1 u) with q drawn exactly from the local-power density.
    """
    return _expectation(packet, _sampled_powers(spec, packet, rng, q_samples, box_points))


@dataclass(frozen=True)
class PositivityReport:
    minimum: float
    maximum: float
    values: tuple[float, ...]
    seed: int
    trial_count: int
    parseval_residual: float = 0.0

    def within(self, tolerance: float = 1e-8) -> bool:
        return self.minimum >= -tolerance and self.maximum <= 1.0 + tolerance


def positivity_sample(
    spec: TrialSpec,
    trial_count: int,
    seed: int,
    *,
    q_samples: int = 48,
    box_points: int = 32,
    packets: Sequence[WavePacket] | None = None,
) -> PositivityReport:
    """
    中文: 随机归一化高斯混合波包上的 (u, γ₁u)，返回最小/最大值与最大 Parseval 残差；同一 seed 结果可复现。
    English: Worst-case expectations of gamma_1 over seeded random wave packets (or the given ones).
    """
    if trial_count < 1:
        raise ValueError(f"trial_count 必须 >= 1，当前 {trial_count}")
    rng = np.random.default_rng(seed)
    length = spec.atom.sys.Z ** (-1.0 / 3.0)
    if packets is None:
        packets = [GaussianMixturePacket.random(rng, length, spec.R) for _ in range(trial_count)]
    values: list[float] = []
    residual = 0.0
    for u in packets:
        powers = _sampled_powers(spec, u, rng, q_samples, box_points)
        values.append(_expectation(u, powers))
        residual = max(residual, max(pw.parseval_residual for pw in powers))
    logger.debug("正性抽样: %d 个波包, min=%.6f, max=%.6f, Parseval 残差 %.3e", len(values), min(values), max(values), residual)
    return PositivityReport(
        minimum=min(values),
        maximum=max(values),
        values=tuple(values),
        seed=seed,
        trial_count=len(values),
        parseval_residual=residual,
    )
