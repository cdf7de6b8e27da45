"""
文件名: exchange_hole.py
作者: JQQ
创建日期: 2025/10/14
最后修改日期: 2025/10/16
版权: 2023 JQQ. All rights reserved.
依赖: numpy
描述:
  中文: 交换空穴：空穴半径 R_σ(x)（球内质量达到 1/2 的最小半径）、空穴势 L_σ(x)、A₁/A₂ 拆分、
        磨光密度 ρ_δ = σ ∗ g²_δ 以及 sup 范数扫描与 Z 扫描常数。
  English: Exchange-hole radius and potential of spherically symmetric densities via bipolar shell factors,
    mollified densities and sup-norm scans.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from brtf.model import AtomSystem
from brtf.radial import GridDensity, RadialProfile, composite_gauss, log_grid, smear_with_profile
from brtf.tf_solver import solve_atom
from brtf.utils.logger import get_logger
from brtf.utils.parallel import parallel_map

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

HOLE_MASS: float = 0.5
MASS_TOLERANCE: float = 1e-8
MAX_BISECTIONS: int = 200
PLATEAU_TOLERANCE: float = 1e-3


class HoleUndefinedError(ValueError):
    """总质量不足 1/2，空穴半径不存在 / Total mass below 1/2: the hole is undefined."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


class MollifierResolutionError(ValueError):
    """磨光宽度低于网格分辨率 / Mollifier width below the grid resolution."""

    def __init__(self, *args: Any, suggested_width: float | None = None) -> None:
        super().__init__(*args)
        self.suggested_width = suggested_width


def _segment_nodes(
    sigma: RadialProfile,
    lo: float,
    hi: float,
    extra: Sequence[float] = (),
    panels: int = 16,
    nodes: int = 16,
) -> tuple[FloatArray, FloatArray]:
    """Gauss nodes on [lo, hi] split at the profile breakpoints, with s = a + (b − a)u² on each piece."""
    if hi <= lo:
        return np.zeros(0), np.zeros(0)
    cuts = sorted({lo, hi, *(b for b in (*sigma.breakpoints, *extra) if lo < b < hi)})
    u, wu = composite_gauss(np.linspace(0.0, 1.0, panels + 1), nodes)
    s_all: list[FloatArray] = []
    w_all: list[FloatArray] = []
    for a, b in zip(cuts[:-1], cuts[1:], strict=True):
        span = b - a
        s_all.append(a + span * u * u)
        w_all.append(2.0 * span * u * wu)
    return np.concatenate(s_all), np.concatenate(w_all)


def ball_mass(sigma: RadialProfile, d: float, R: float) -> float:
    """
    中文: M(d, R) = ∫_{B_R(x)} σ，|x| = d。完全落入球内的壳层贡献 mass_within(R − d)，部分壳层贡献 2πs²(1 − μ₀)σ(s)，
      μ₀ = (s² + d² − R²)/(2sd)。
    English: Mass of a radial density inside a ball of radius R centred at distance d from the origin.
    """
    if R <= 0:
        return 0.0
    if d <= 0:
        return float(sigma.mass_within(np.asarray(R)))
    full = float(sigma.mass_within(np.asarray(R - d))) if R > d else 0.0
    lo, hi = abs(R - d), min(R + d, sigma.support_radius)
    s, w = _segment_nodes(sigma, lo, hi)
    if s.size == 0:
        return full
    mu0 = np.clip((s * s + d * d - R * R) / (2.0 * s * d), -1.0, 1.0)
    partial = float(np.sum(2.0 * math.pi * s * s * (1.0 - mu0) * sigma.density(s) * w))
    return full + partial


def ball_potential(sigma: RadialProfile, d: float, R: float) -> float:
    """
    中文: ∫_{|y − x| < R} σ(y)/|x − y| dy。完全落入的壳层贡献 4πs²σ/max(s, d)，部分壳层贡献 (2πs/d)(R − |s − d|)σ(s)。
    English: Coulomb potential at x of the part of the density inside B_R(x).
    """
    if R <= 0:
        return 0.0
    if d <= 0:
        s, w = _segment_nodes(sigma, 0.0, min(R, sigma.support_radius))
        return float(np.sum(4.0 * math.pi * s * sigma.density(s) * w))
    total = 0.0
    if R > d:
        inner = R - d
        total += float(sigma.mass_within(np.asarray(min(d, inner)))) / d
        s, w = _segment_nodes(sigma, d, min(inner, sigma.support_radius))
        total += float(np.sum(4.0 * math.pi * s * sigma.density(s) * w))
    lo, hi = abs(R - d), min(R + d, sigma.support_radius)
    s, w = _segment_nodes(sigma, lo, hi, extra=(d,))
    if s.size:
        total += float(np.sum((2.0 * math.pi * s / d) * (R - np.abs(s - d)) * sigma.density(s) * w))
    return total


def hole_radius(sigma: RadialProfile, x: float, tolerance: float = MASS_TOLERANCE) -> float:
    """
    中文: 使 ∫_{B_R(x)} σ = 1/2 的最小 R；区间 [0, x + s_max] 上二分。
    English: Smallest radius whose ball around x carries mass 1/2.

    Raises:
        HoleUndefinedError: σ 的总质量 < 1/2
        ValueError: x < 0
    """
    if x < 0:
        raise ValueError(f"x 必须非负，当前 {x}")
    if sigma.total_mass < HOLE_MASS - tolerance:
        raise HoleUndefinedError(f"空穴无定义: 总质量 {sigma.total_mass:.6g} < 1/2")
    lo, hi = 0.0, x + sigma.support_radius
    m_hi = ball_mass(sigma, x, hi)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= 1e-13 * hi:
            break
        m_mid = ball_mass(sigma, x, mid)
        if m_mid >= HOLE_MASS:
            hi, m_hi = mid, m_mid
        else:
            lo = mid
    if abs(m_hi - HOLE_MASS) > tolerance:
        logger.debug("空穴半径 x=%.4e: 质量残差 %.3e 超过容差（质量函数在此处跳变）", x, m_hi - HOLE_MASS)
    return hi


def hole_potential(sigma: RadialProfile, x: float, tolerance: float = MASS_TOLERANCE) -> float:
    """L_σ(x) = ∫_{|x − y| < R_σ(x)} σ(y)/|x − y| dy."""
    return ball_potential(sigma, x, hole_radius(sigma, x, tolerance))


@dataclass(frozen=True, eq=False)
class HoleField:
    """
    中文: 扫描网格上的 R_σ(x)、L_σ(x) 及 A₁/A₂ 拆分；sup_L 为网格最大值，boundary_flag 标记最大值落在端点且未收敛。
    English: Hole radius and potential over a scan grid with the A1/A2 split and the sup.
    """

    x: FloatArray
    radius: FloatArray
    potential: FloatArray
    A1: FloatArray
    A2: FloatArray
    Z: float
    sup_L: float
    argmax_x: float
    boundary_flag: bool

    @property
    def a2_bound_holds(self) -> bool:
        return bool(np.all(self.A2 <= 0.5 * self.Z * (1.0 + 1e-9)))

    def radius_nondecreasing_beyond(self, x0: float) -> bool:
        sel = self.x >= x0
        return bool(np.all(np.diff(self.radius[sel]) >= -1e-9 * self.radius[sel][1:]))


def default_scan_grid(Z: float, points: int = 96) -> FloatArray:
    """Log grid on [1e-3/Z, 1e3 Z^{-1/3}]."""
    return log_grid(1e-3 / Z, 1e3 * Z ** (-1.0 / 3.0), points)


def sup_norm_scan(sigma: RadialProfile, grid: ArrayLike | None = None, *, Z: float) -> HoleField:
    """
    中文:
      在网格上计算 L_σ 并取最大值。最大值落在网格端点时，若端点处相邻两点相对变化超过 1e-3 则置 boundary_flag。
      A₁ 为 |y| ≤ 1/Z 球内的势，A₂ = L − A₁ 的剩余部分（理论上 ≤ Z/2）。
    English:
      Sup of the hole potential over a log grid, flagging an unconverged supremum at a grid end.
    """
    xs = default_scan_grid(Z) if grid is None else np.asarray(grid, dtype=float)
    if xs.size == 0:
        raise ValueError("扫描网格不能为空")
    radius = np.array([hole_radius(sigma, float(x)) for x in xs])
    potential = np.array([ball_potential(sigma, float(x), float(R)) for x, R in zip(xs, radius, strict=True)])
    A1 = np.array([ball_potential(sigma, float(x), 1.0 / Z) for x in xs])
    inner = np.array([ball_potential(sigma, float(x), min(float(R), 1.0 / Z)) for x, R in zip(xs, radius, strict=True)])
    A2 = np.maximum(potential - inner, 0.0)
    k = int(np.argmax(potential))
    flag = False
    if xs.size > 1 and k in (0, xs.size - 1):
        neighbour = potential[1] if k == 0 else potential[-2]
        flag = bool(abs(potential[k] - neighbour) > PLATEAU_TOLERANCE * potential[k])
    if flag:
        logger.warning("L_σ 的最大值位于扫描网格端点 x=%.4e 且未收敛", xs[k])
    return HoleField(
        x=xs,
        radius=radius,
        potential=potential,
        A1=A1,
        A2=A2,
        Z=Z,
        sup_L=float(potential[k]),
        argmax_x=float(xs[k]),
        boundary_flag=flag,
    )


def mollify(sigma: GridDensity, width: float) -> GridDensity:
    """
    中文: ρ_δ = σ ∗ g²_width，在 σ 的径向网格上给出；总质量守恒。
    English: Radial convolution with the squared coherent profile of radius ``width``.

    Raises:
        ValueError: width <= 0
        MollifierResolutionError: width 小于网格首个间距
    """
    if width <= 0:
        raise ValueError(f"磨光宽度必须为正，当前 {width}")
    spacing = float(sigma.r[1] - sigma.r[0])
    if width < spacing:
        raise MollifierResolutionError(
            f"磨光宽度 {width:.3e} 小于网格间距 {spacing:.3e}，请降低网格下限 r_min 或增大宽度",
            suggested_width=spacing,
        )
    return GridDensity(sigma.r, smear_with_profile(sigma, sigma.r, width))


@dataclass(frozen=True)
class HoleSweepRecord:
    Z: float
    sup_raw: float
    sup_mollified: float
    argmax_raw: float
    argmax_mollified: float
    a2_max: float
    boundary_flag: bool

    @classmethod
    def from_fields(cls, raw: HoleField, smooth: HoleField) -> HoleSweepRecord:
        return cls(
            Z=raw.Z,
            sup_raw=raw.sup_L,
            sup_mollified=smooth.sup_L,
            argmax_raw=raw.argmax_x,
            argmax_mollified=smooth.argmax_x,
            a2_max=float(max(raw.A2.max(), smooth.A2.max())),
            boundary_flag=raw.boundary_flag or smooth.boundary_flag,
        )

    @property
    def k_raw(self) -> float:
        return self.sup_raw / self.Z

    @property
    def k_mollified(self) -> float:
        return self.sup_mollified / self.Z


@dataclass(frozen=True)
class HoleSweep:
    records: tuple[HoleSweepRecord, ...]

    @property
    def k_hole(self) -> float:
        """Measured constant: max over the sweep of sup L / Z for raw and mollified densities."""
        return max(max(r.k_raw, r.k_mollified) for r in self.records)

    @property
    def spread(self) -> float:
        """max/min of sup L/Z across the sweep."""
        ks = [r.k_raw for r in self.records]
        return max(ks) / min(ks)


def hole_point(
    Z: float,
    lam: float = 1.0,
    kappa: float = 0.5,
    delta: float = 5.0 / 9.0,
    points: int = 96,
    tf_grid: dict[str, Any] | None = None,
) -> tuple[HoleField, HoleField]:
    """Scans of the TF density and of its mollification at width Z^{-δ}."""
    atom = solve_atom(AtomSystem.from_lambda(lam, Z, kappa, delta), **(tf_grid or {}))
    grid = default_scan_grid(Z, points)
    raw = sup_norm_scan(atom.profile, grid, Z=Z)
    smooth = sup_norm_scan(mollify(atom.profile, atom.sys.R), grid, Z=Z)
    logger.info("空穴扫描 Z=%.4g: sup L/Z = %.4f (原始), %.4f (磨光)", Z, raw.sup_L / Z, smooth.sup_L / Z)
    return raw, smooth


def hole_point_args(args: tuple[float, float, float, float, int, dict[str, Any]]) -> tuple[HoleField, HoleField]:
    return hole_point(*args)


def _hole_record(args: tuple[float, float, float, float, int, dict[str, Any]]) -> HoleSweepRecord:
    return HoleSweepRecord.from_fields(*hole_point(*args))


def hole_constant_sweep(
    Z_values: Sequence[float],
    *,
    lam: float = 1.0,
    kappa: float = 0.5,
    delta: float = 5.0 / 9.0,
    points: int = 96,
    tf_grid: dict[str, Any] | None = None,
    workers: int = 1,
) -> HoleSweep:
    """
    中文: 在 Z 序列上测量 sup L_{ρ_Z}/Z 与 sup L_{ρ_δ}/Z（ρ_δ 的磨光宽度 Z^{-δ}）。
    English: Measured hole constants over a Z sweep, raw and mollified.
    """
    if not Z_values:
        raise ValueError("Z 序列不能为空")
    args = [(float(Z), lam, kappa, delta, points, dict(tf_grid or {})) for Z in Z_values]
    return HoleSweep(records=tuple(parallel_map(_hole_record, args, workers)))
