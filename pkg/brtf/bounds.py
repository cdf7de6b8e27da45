"""
文件名: bounds.py
作者: JQQ
创建日期: 2025/10/15
最后修改日期: 2025/10/17
版权: 2023 JQQ. All rights reserved.
依赖: pydantic, numpy, scipy
描述:
  中文: 能量上下界的组装：试探态上界（含 γ₂ 与相对论修正松弛项）、以 Weyl 相空间迹为替代的半经典下界表达式、
        Z 扫描上的夹逼报告与余项指数拟合、δ 扫描与指数包络。
  English: Assembly of the upper bound from the trial state, the semiclassical lower-bound expression built on the
    Weyl phase-space trace, sandwich reports over Z sweeps, delta scans and the exponent envelope.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, computed_field
from scipy.optimize import minimize_scalar

from brtf.coherent_states import TrialSpec, build_trial_spec, external_upper, gamma2_diagnostics, hartree_upper, kinetic_upper
from brtf.exchange_hole import default_scan_grid, mollify, sup_norm_scan
from brtf.model import DELTA_MAX, DELTA_MIN, AtomSystem
from brtf.radial import gauss_legendre, newton_potential, self_energy, volume_integral
from brtf.rel_corrections import (
    SWEEP_MIN_POINTS,
    CorrectionSettings,
    ExponentFit,
    SweepPointOptions,
    correction_terms,
    fit_exponent,
)
from brtf.tf_solver import TFAtom, solve_atom
from brtf.utils.logger import get_logger
from brtf.utils.parallel import parallel_map

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

UPPER_EXPONENT: float = 20.0 / 9.0
OPTIMAL_DELTA: float = 5.0 / 9.0
DEFAULT_DELTA_GRID: tuple[float, ...] = (0.40, 0.50, 5.0 / 9.0, 0.60)
EXPONENT_MARGIN: float = 0.1
HARTREE_EXPONENT_MARGIN: float = 0.05
MIN_SWEEP_POINTS: int = 4


class SweepTooShortError(ValueError):
    """扫描点数不足或跨度不足一个数量级 / Sweep too short for an exponent fit."""

    def __init__(self, *args: Any, points: int | None = None, span: float | None = None) -> None:
        super().__init__(*args)
        self.points = points
        self.span = span


# ------------------------------
# 半经典迹 / semiclassical trace
# ------------------------------


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """网格上的径向势 V(|q|) / Radial potential tabulated on a log grid."""

    r: FloatArray
    values: FloatArray

    def __post_init__(self) -> None:
        if self.r.ndim != 1 or self.values.shape != self.r.shape:
            raise ValueError("RadialPotential 需要一维且形状一致的 r 与 values")

    def shifted(self, amount: float) -> RadialPotential:
        """V − amount."""
        return RadialPotential(self.r, self.values - amount)

    def capped(self, cap: float) -> RadialPotential:
        return RadialPotential(self.r, np.minimum(self.values, cap))


def _ball_integral(V: FloatArray, c: float, nodes: int) -> FloatArray:
    """J(V) = 4π∫_{T(p) <= V} p²(T(p) − V) dp with T = E_c − c², on p = P·u."""
    out = np.zeros_like(V)
    pos = V > 0
    if not np.any(pos):
        return out
    v = V[pos]
    P = np.sqrt(v * v / (c * c) + 2.0 * v)
    u, w = gauss_legendre(0.0, 1.0, nodes)
    p = P[:, None] * u[None, :]
    cp = c * p
    kinetic = cp * cp / (np.sqrt(cp * cp + c**4) + c * c)
    out[pos] = 4.0 * math.pi * P * np.sum(w[None, :] * p * p * (kinetic - v[:, None]), axis=1)
    return out


def weyl_negative_trace(sys: AtomSystem, V: RadialPotential, *, nonrelativistic: bool = False, nodes: int = 32) -> float:
    """
    中文:
      2(2π)^{-3}∬ min(E_c(p) − c² − V(q), 0) dp dq。内层动量积分在球 {E_c − c² ≤ V} 上做 Gauss 求积，
      外层为径向体积分。nonrelativistic=True 时以 p²/2 代替，闭式 −(4π/15)(2V)^{5/2}。
      该量是负迹的渐近替代，并非有限 Z 下的严格下界。
    English:
      Semiclassical negative trace of E_c(p) - c^2 - V(q) with spin factor 2; the nonrelativistic variant
      uses p^2/2 and its closed form.
    """
    v = V.values
    if nonrelativistic:
        J = -(4.0 * math.pi / 15.0) * (2.0 * np.maximum(v, 0.0)) ** 2.5
    else:
        J = _ball_integral(v, sys.c, nodes)
    return 2.0 / (2.0 * math.pi) ** 3 * volume_integral(V.r, J)


def regularized_potential(atom: TFAtom, *, width: float | None = None, cap_factor: float = 1.0) -> RadialPotential:
    """
    中文: V_δ = Z/|x| − ρ_δ ∗ |x|^{-1}，ρ_δ 为宽度 R = Z^{-δ} 的磨光密度；上限截断为 cap_factor·c²。
    English: Potential of the nucleus screened by the mollified TF density, capped at cap_factor c^2.
    """
    if cap_factor <= 0:
        raise ValueError(f"cap_factor 必须为正，当前 {cap_factor}")
    sys = atom.sys
    rho_delta = mollify(atom.profile, atom.sys.R if width is None else width)
    values = sys.Z / atom.r - newton_potential(atom.r, rho_delta.values)
    return RadialPotential(atom.r, np.minimum(values, cap_factor * sys.c**2))


# ------------------------------
# 上下界 / bounds
# ------------------------------


@dataclass(frozen=True)
class UpperBound:
    terms: dict[str, float]

    @property
    def total(self) -> float:
        return float(sum(self.terms.values()))


@dataclass(frozen=True)
class LowerBound:
    terms: dict[str, float]
    sup_L: float
    k_hole: float
    boundary_flag: bool

    @property
    def total(self) -> float:
        return float(sum(self.terms.values()))


def upper_bound(spec: TrialSpec, settings: CorrectionSettings | None = None) -> UpperBound:
    """
    中文:
      e_upper = 相空间动能 + 局域化代价 + 外势 + Hartree + γ₂ 诊断界（N > Z）+ 三个相对论修正量（非负松弛）。
      N < Z 时只使用 γ₁。
    English:
      Upper value of the trial state with every term in the ledger.
    """
    sys = spec.atom.sys
    kin = kinetic_upper(spec)
    terms = {
        "phase_space": kin.phase_space,
        "penalty": kin.penalty,
        "external": external_upper(spec),
        "hartree": hartree_upper(spec),
        "gamma2_kinetic": 0.0,
        "gamma2_interaction": 0.0,
    }
    if sys.N > sys.Z:
        diag = gamma2_diagnostics(spec)
        terms["gamma2_kinetic"] = diag.kinetic_bound
        terms["gamma2_interaction"] = diag.interaction_bound
    corrections = correction_terms(spec, settings)
    terms["phi2_term"] = abs(corrections.phi2_term)
    terms["phi1_deficit"] = abs(corrections.phi1_deficit)
    terms["hartree_lift"] = abs(corrections.hartree_lift)
    return UpperBound(terms=terms)


def lower_bound(atom: TFAtom, *, cap_factor: float = 1.0, hole_points: int = 96, width: float | None = None) -> LowerBound:
    """
    中文:
      e_lower = Tr_Weyl(V_δ − u') − u'N − D(ρ_Z, ρ_Z) − sup L_{ρ_δ}·min(N, 2Z + 1)。
      k_hole = sup L_{ρ_δ}/Z 为测得的常数。
    English:
      Semiclassical lower expression; the hole term uses the measured sup of the hole potential of the
      mollified density and caps the electron count at 2Z + 1.
    """
    sys = atom.sys
    R = sys.R if width is None else width
    V = regularized_potential(atom, width=R, cap_factor=cap_factor).shifted(atom.u_prime)
    trace = weyl_negative_trace(sys, V)
    hartree = self_energy(atom.r, atom.rho)
    scan = sup_norm_scan(mollify(atom.profile, R), default_scan_grid(sys.Z, hole_points), Z=sys.Z)
    count = min(sys.N, 2.0 * sys.Z + 1.0)
    terms = {
        "weyl_trace": trace,
        "chemical": -atom.u_prime * sys.N,
        "hartree": -hartree,
        "hole": -scan.sup_L * count,
    }
    return LowerBound(terms=terms, sup_L=scan.sup_L, k_hole=scan.sup_L / sys.Z, boundary_flag=scan.boundary_flag)


class EnergyReport(BaseModel):
    """
    中文: 单个 (Z, λ, κ, δ) 的能量台账；e_lower 为渐近替代表达式。
    English: Energy ledger of one configuration.
    """

    model_config = ConfigDict(frozen=True)

    Z: float
    N: float
    lam: float
    kappa: float
    delta: float
    e_tf: float
    e_upper: float
    e_lower: float
    upper_terms: dict[str, float]
    lower_terms: dict[str, float]
    corrections: dict[str, float]
    k_hole: float
    hole_boundary_flag: bool = False

    @computed_field  # type: ignore[prop-decorator]
    @property
    def remainder_upper(self) -> float:
        return self.e_upper - self.e_tf

    @computed_field  # type: ignore[prop-decorator]
    @property
    def remainder_lower(self) -> float:
        return self.e_tf - self.e_lower

    @computed_field  # type: ignore[prop-decorator]
    @property
    def sandwich_upper(self) -> float:
        return self.remainder_upper / self.Z ** (7.0 / 3.0)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def sandwich_lower(self) -> float:
        return self.remainder_lower / self.Z ** (7.0 / 3.0)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def upper_constant(self) -> float:
        """(e_upper − e_tf)/Z^{20/9}."""
        return self.remainder_upper / self.Z**UPPER_EXPONENT


@dataclass(frozen=True)
class BoundsOptions:
    point: SweepPointOptions = field(default_factory=SweepPointOptions)
    settings: CorrectionSettings = field(default_factory=CorrectionSettings)
    cap_factor: float = 1.0
    hole_points: int = 96

    def with_physics(self, *, lam: float | None = None, kappa: float | None = None, delta: float | None = None) -> BoundsOptions:
        changes = {k: v for k, v in (("lam", lam), ("kappa", kappa), ("delta", delta)) if v is not None}
        return dataclasses.replace(self, point=dataclasses.replace(self.point, **changes))


def energy_report(atom: TFAtom, spec: TrialSpec, options: BoundsOptions) -> EnergyReport:
    sys = atom.sys
    upper = upper_bound(spec, options.settings)
    lower = lower_bound(atom, cap_factor=options.cap_factor, hole_points=options.hole_points)
    corrections = correction_terms(spec, options.settings)
    report = EnergyReport(
        Z=sys.Z,
        N=sys.N,
        lam=sys.lam,
        kappa=sys.kappa,
        delta=sys.delta,
        e_tf=atom.energy.total,
        e_upper=upper.total,
        e_lower=lower.total,
        upper_terms=upper.terms,
        lower_terms=lower.terms,
        corrections={
            "phi2_term": corrections.phi2_term,
            "phi1_deficit": corrections.phi1_deficit,
            "hartree_lift": corrections.hartree_lift,
        },
        k_hole=lower.k_hole,
        hole_boundary_flag=lower.boundary_flag,
    )
    logger.info(
        "能量台账 Z=%.4g λ=%.3g: e_tf=%.6e, e_upper=%.6e, e_lower=%.6e",
        sys.Z,
        sys.lam,
        report.e_tf,
        report.e_upper,
        report.e_lower,
    )
    return report


def energy_point(Z: float, options: BoundsOptions) -> EnergyReport:
    p = options.point
    sys = AtomSystem.from_lambda(p.lam, Z, p.kappa, p.delta)
    atom = solve_atom(sys, p.tolerance, **dict(p.tf_grid))
    spec = build_trial_spec(
        atom,
        R_tilde_factor=p.R_tilde_factor,
        K=p.K,
        decades=p.momentum_decades,
        points_per_decade=p.points_per_decade,
    )
    return energy_report(atom, spec, options)


def _energy_point_args(args: tuple[float, BoundsOptions]) -> EnergyReport:
    return energy_point(*args)


# ------------------------------
# 扫描与拟合 / sweeps and fits
# ------------------------------


def count_inversions(values: Sequence[float]) -> int:
    """Number of consecutive increases in a sequence expected to decrease."""
    return sum(1 for a, b in zip(values[:-1], values[1:], strict=True) if b > a)


def _safe_fit(records: Sequence[tuple[float, float]]) -> ExponentFit | None:
    if any(v <= 0 for _, v in records):
        return None
    return fit_exponent(records, min_points=SWEEP_MIN_POINTS)


def validate_sweep(Z_values: Sequence[float]) -> list[float]:
    """
    Raises:
        SweepTooShortError: 少于 4 个点或跨度不足一个数量级
    """
    zs = sorted(float(z) for z in Z_values)
    if len(zs) < MIN_SWEEP_POINTS:
        raise SweepTooShortError(f"扫描至少需要 {MIN_SWEEP_POINTS} 个 Z，当前 {len(zs)}", points=len(zs))
    span = zs[-1] / zs[0]
    if span < 10.0:
        raise SweepTooShortError(f"扫描跨度 {span:.3g} 不足一个数量级", points=len(zs), span=span)
    return zs


@dataclass(frozen=True)
class SandwichReport:
    records: tuple[EnergyReport, ...]
    lam: float
    upper_fit: ExponentFit | None
    hartree_fit: ExponentFit | None
    hole_fit: ExponentFit | None
    inversions: dict[str, int]

    @property
    def upper_constant(self) -> float:
        """Smallest k with e_upper − e_tf <= k Z^{20/9} over the sweep."""
        return max(r.upper_constant for r in self.records)

    @property
    def band_constant(self) -> float | None:
        """
        中文: 拟合的次主导系数 k：e_upper − e_tf ≈ k·Z^{20/9}，取各点 (e_upper − e_tf)/Z^{20/9} 的几何平均；上界拟合缺失时为 None。
        English: Fitted subleading constant of the tolerance band, or None without a positive upper fit.
        """
        constants = [r.upper_constant for r in self.records]
        if self.upper_fit is None or min(constants) <= 0:
            return None
        return float(np.exp(np.mean(np.log(constants))))

    @property
    def band_violations(self) -> list[float]:
        """Z values with e_lower > e_tf + band or e_upper < e_tf − band, band = k·Z^{20/9}."""
        k = self.band_constant
        if k is None:
            return [r.Z for r in self.records]
        out = []
        for r in self.records:
            band = k * r.Z**UPPER_EXPONENT
            if r.e_lower > r.e_tf + band or r.e_upper < r.e_tf - band:
                out.append(r.Z)
        return out

    @property
    def checks(self) -> dict[str, bool]:
        return {
            "upper_exponent": self.upper_fit is not None and self.upper_fit.slope <= UPPER_EXPONENT + EXPONENT_MARGIN,
            "tolerance_band": not self.band_violations,
            "upper_ratio_trend": self.inversions["sandwich_upper"] <= 1,
            "lower_ratio_trend": self.inversions["sandwich_lower"] <= 1,
            "hartree_exponent": self.hartree_fit is not None and abs(self.hartree_fit.slope - 7.0 / 3.0) <= HARTREE_EXPONENT_MARGIN,
            "hole_exponent": self.hole_fit is not None and self.hole_fit.slope <= 2.0 + EXPONENT_MARGIN,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def sandwich_report(
    lam: float,
    Z_sweep: Sequence[float],
    kappa: float = 0.5,
    delta: float = OPTIMAL_DELTA,
    options: BoundsOptions | None = None,
    *,
    workers: int = 1,
) -> SandwichReport:
    """
    中文:
      逐 Z 组装能量台账，拟合 e_upper − e_tf 的指数（应 ≤ 20/9 + 0.1）以及下界扣除项 D 与空穴项的指数；
      两个夹逼比值的非单调处记为反转并告警，不做删改。
    English:
      Sandwich report over a Z sweep with exponent fits and trend checks; inversions are flagged, never erased.
    """
    zs = validate_sweep(Z_sweep)
    opts = (options or BoundsOptions()).with_physics(lam=lam, kappa=kappa, delta=delta)
    records = tuple(parallel_map(_energy_point_args, [(Z, opts) for Z in zs], workers))
    inversions = {
        "sandwich_upper": count_inversions([r.sandwich_upper for r in records]),
        "sandwich_lower": count_inversions([r.sandwich_lower for r in records]),
    }
    for name, count in inversions.items():
        if count:
            logger.warning("λ=%.3g: %s 在扫描中出现 %d 次反转", lam, name, count)
    upper_fit = _safe_fit([(r.Z, r.remainder_upper) for r in records])
    if upper_fit is None:
        logger.warning("λ=%.3g: 存在非正的上界余项，跳过指数拟合", lam)
    report = SandwichReport(
        records=records,
        lam=lam,
        upper_fit=upper_fit,
        hartree_fit=_safe_fit([(r.Z, -r.lower_terms["hartree"]) for r in records]),
        hole_fit=_safe_fit([(r.Z, -r.lower_terms["hole"]) for r in records]),
        inversions=inversions,
    )
    if report.band_violations:
        logger.warning("λ=%.3g: 以下 Z 落在容差带之外: %s", lam, report.band_violations)
    return report


def exponent_envelope(delta: ArrayLike) -> FloatArray:
    """max(1 + 2δ, 5/2 − δ/2, 5/3 + δ): the largest remainder exponent of the upper bound at scale Z^{-δ}."""
    d = np.asarray(delta, dtype=float)
    return np.maximum.reduce([1.0 + 2.0 * d, 2.5 - 0.5 * d, 5.0 / 3.0 + d])


def optimal_delta() -> float:
    """Minimizer of the exponent envelope over (1/3, 2/3); equals 5/9."""
    res = minimize_scalar(lambda d: float(exponent_envelope(d)), bounds=(DELTA_MIN, DELTA_MAX), method="bounded", options={"xatol": 1e-8})
    return float(res.x)


@dataclass(frozen=True)
class DeltaScan:
    Z: float
    deltas: tuple[float, ...]
    records: tuple[EnergyReport, ...]

    @property
    def remainders(self) -> tuple[float, ...]:
        return tuple(r.sandwich_upper for r in self.records)

    @property
    def best_delta(self) -> float:
        return self.deltas[int(np.argmin(self.remainders))]

    @property
    def optimum_in_cell(self) -> bool:
        """argmin is the grid node nearest to 5/9 or one of its neighbours."""
        grid = np.sort(np.asarray(self.deltas))
        nearest = int(np.argmin(np.abs(grid - OPTIMAL_DELTA)))
        best = int(np.argmin(np.abs(grid - self.best_delta)))
        return abs(best - nearest) <= 1


def delta_scan(
    Z: float,
    lam: float = 1.0,
    kappa: float = 0.5,
    deltas: Sequence[float] = DEFAULT_DELTA_GRID,
    options: BoundsOptions | None = None,
    *,
    workers: int = 1,
) -> DeltaScan:
    """
    中文: 固定 Z 在 δ 网格上比较 (e_upper − e_tf)/Z^{7/3}。
    English: Upper remainder at fixed Z over a grid of coherent-state exponents.
    """
    if not deltas:
        raise ValueError("δ 网格不能为空")
    base = options or BoundsOptions()
    args = [(float(Z), base.with_physics(lam=lam, kappa=kappa, delta=float(d))) for d in deltas]
    records = tuple(parallel_map(_energy_point_args, args, workers))
    scan = DeltaScan(Z=float(Z), deltas=tuple(float(d) for d in deltas), records=records)
    logger.info("δ 扫描 Z=%.4g: 最优 δ=%.4f", Z, scan.best_delta)
    return scan
