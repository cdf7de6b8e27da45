"""
文件名: model.py
作者: JQQ
创建日期: 2025/10/12
最后修改日期: 2025/10/14
版权: 2023 JQQ. All rights reserved.
依赖: pydantic, numpy, scipy
描述:
  中文: 原子体系参数、相对论色散与乘子函数（E_c, N_c, φ1, φ2）、Pauli 旋量约化恒等式残差，以及 Coulomb 核的角向约化。
  English: Atomic configuration, relativistic dispersion and multipliers (E_c, N_c, phi1, phi2),
    the Pauli-spinor reduction residual and the angular reduction of the Coulomb kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.special import spence

# 两个文献中出现的临界耦合常数；校验取较小者
KAPPA_CRIT_REDUCED: float = 2.0 / (math.pi / 2.0 + 2.0 / math.pi)
KAPPA_CRIT_COULOMB: float = 2.0 / math.pi
KAPPA_CRIT: float = min(KAPPA_CRIT_REDUCED, KAPPA_CRIT_COULOMB)

DELTA_MIN: float = 1.0 / 3.0
DELTA_MAX: float = 2.0 / 3.0

FloatOrArray = float | NDArray[np.float64]


class NegativeMomentumError(ValueError):
    """动量幅值为负 / Negative momentum magnitude."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


class KernelUndefinedError(ValueError):
    """ξ = ξ' = 0 时角向核无定义 / Angular kernel undefined at the double origin."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


class AtomSystem(BaseModel):
    """
    中文: 原子体系的物理配置。c = Z/κ，R = Z^{-δ}，λ = N/Z 均为派生量。
    English: Physical configuration of the atom; c, R and lambda are derived.
    """

    Z: float = Field(title="核电荷", description="核电荷 Z（原子单位，正实数）", gt=0)
    N: float = Field(title="电子数", description="电子数 N（正实数，可非整数）", gt=0)
    kappa: float = Field(default=0.5, title="耦合常数", description="κ = Z/c，需严格小于临界耦合")
    delta: float = Field(default=5.0 / 9.0, title="相干态尺度指数", description="R = Z^{-δ}，δ ∈ (1/3, 2/3)")

    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid", frozen=True)

    @field_validator("kappa")
    @classmethod
    def _check_kappa(cls, v: float) -> float:
        if not 0.0 < v < KAPPA_CRIT:
            raise ValueError(f"kappa 必须位于 (0, {KAPPA_CRIT:.6f}) 内，当前 {v}")
        return v

    @field_validator("delta")
    @classmethod
    def _check_delta(cls, v: float) -> float:
        if not DELTA_MIN < v < DELTA_MAX:
            raise ValueError(f"delta 必须位于 (1/3, 2/3) 内，当前 {v}")
        return v

    @classmethod
    def from_lambda(cls, lam: float, Z: float, kappa: float = 0.5, delta: float = 5.0 / 9.0) -> AtomSystem:
        if lam <= 0:
            raise ValueError(f"lambda 必须为正，当前 {lam}")
        return cls(Z=Z, N=lam * Z, kappa=kappa, delta=delta)

    @property
    def lam(self) -> float:
        return self.N / self.Z

    @property
    def c(self) -> float:
        return self.Z / self.kappa

    @property
    def R(self) -> float:
        return self.Z ** (-self.delta)

    def replace(self, **changes: Any) -> AtomSystem:
        """返回修改若干字段后的新体系（重新校验） / Copy with changed fields, re-validated."""
        return AtomSystem(**{**self.model_dump(), **changes})


@dataclass(frozen=True)
class DispersionValues:
    """Closed-form dispersion quantities at momentum magnitude(s) p for speed of light c."""

    p: FloatOrArray
    c: float
    Ec: FloatOrArray
    Nc: FloatOrArray
    phi1: FloatOrArray
    phi2: FloatOrArray

    @property
    def kinetic(self) -> FloatOrArray:
        """E_c - c^2 without cancellation."""
        return kinetic_energy(self.p, self.c)

    @property
    def phi1_deficit(self) -> FloatOrArray:
        """1 - phi1 without cancellation."""
        return self.phi2**2 / (1.0 + self.phi1)


def _as_momentum(p: ArrayLike) -> FloatOrArray:
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise NegativeMomentumError(f"动量幅值必须非负，最小值 {np.nanmin(arr) if arr.size else arr}")
    return float(arr) if arr.ndim == 0 else arr


def energy(p: ArrayLike, c: float) -> FloatOrArray:
    """E_c(p) = (c^2 p^2 + c^4)^{1/2}."""
    q = np.asarray(p, dtype=float)
    return c * np.sqrt(q * q + c * c)


def kinetic_energy(p: ArrayLike, c: float) -> FloatOrArray:
    """E_c(p) - c^2 = c^2 p^2 / (E_c + c^2)."""
    q = np.asarray(p, dtype=float)
    return c * c * q * q / (energy(q, c) + c * c)


def phi1_deficit(p: ArrayLike, c: float) -> FloatOrArray:
    """1 - phi1(p) = phi2^2 / (1 + phi1)."""
    vals = dispersion_values(p, c)
    return vals.phi1_deficit


def dispersion_values(p: ArrayLike, c: float) -> DispersionValues:
    q = _as_momentum(p)
    e = energy(q, c)
    nc = np.sqrt(2.0 * e * (e + c * c))
    phi1 = (e + c * c) / nc
    phi2 = c * np.asarray(q) / nc
    if np.ndim(q) == 0:
        return DispersionValues(p=q, c=c, Ec=float(e), Nc=float(nc), phi1=float(phi1), phi2=float(phi2))
    return DispersionValues(p=q, c=c, Ec=e, Nc=nc, phi1=phi1, phi2=phi2)


def dispersion(p: ArrayLike, sys: AtomSystem) -> DispersionValues:
    """
    中文: 计算动量 p 处的 E_c、N_c、φ1、φ2（支持 numpy 数组向量化）。
    English: Dispersion and multipliers at momentum p for the system's speed of light.

    Raises:
        NegativeMomentumError: p < 0
    """
    return dispersion_values(p, sys.c)


def reduction_identity_residual(p: ArrayLike, sys: AtomSystem) -> FloatOrArray:
    """
    中文: 旋量约化的标量内容 |c²φ1² + 2cpφ1φ2 − c²φ2² − E_c| 。
    English: Scalar content of the spinor reduction, zero up to round-off.
    """
    v = dispersion(p, sys)
    c = sys.c
    lhs = c * c * v.phi1**2 + 2.0 * c * np.asarray(v.p) * v.phi1 * v.phi2 - c * c * v.phi2**2
    res = np.abs(lhs - np.asarray(v.Ec))
    return float(res) if np.ndim(res) == 0 else res


def dispersion_bounds(p: ArrayLike, sys: AtomSystem) -> dict[str, float]:
    """
    中文: 返回三条色散不等式的最大违反量（精确算术下均为 0）。
    English: Largest violations of E_c - c^2 <= p^2/2, E_c - c^2 <= c p and N_c >= sqrt(2) c^2.
    """
    v = dispersion(p, sys)
    c = sys.c
    q = np.atleast_1d(np.asarray(v.p, dtype=float))
    kin = np.atleast_1d(v.kinetic)
    nc = np.atleast_1d(v.Nc)
    return {
        "concavity": float(np.max(np.maximum(kin - 0.5 * q * q, 0.0))),
        "linear": float(np.max(np.maximum(kin - c * q, 0.0))),
        "normalization": float(np.max(np.maximum(math.sqrt(2.0) * c * c - nc, 0.0))),
    }


def dilog_real(x: ArrayLike) -> FloatOrArray:
    """Real part of Li2(x) for real x; scipy's spence(z) is Li2(1 - z) for z >= 0."""
    u = np.asarray(x, dtype=float)
    out = np.empty_like(u)
    low = u <= 1.0
    out[low] = spence(1.0 - u[low])
    hi = ~low
    if np.any(hi):
        uh = u[hi]
        out[hi] = math.pi**2 / 6.0 - np.log(uh) * np.log(uh - 1.0) - spence(uh)
    return float(out) if out.ndim == 0 else out


def _kernel_antiderivative(u: ArrayLike) -> FloatOrArray:
    # d/du F(u) = (ln(1+u) - ln|1-u|)/u, F(0) = 0
    uu = np.asarray(u, dtype=float)
    return -dilog_real(-uu) + dilog_real(uu)


def coulomb_angular_kernel(xi: ArrayLike, xi_prime: ArrayLike, shell_width: float | None = None) -> FloatOrArray:
    """
    中文:
      |ξ−ξ'|⁻² 对相对角度的积分 (π/(ξξ'))·ln((ξ+ξ')²/(ξ−ξ')²)。对角线 ξ = ξ' 处取以 ξ 为中心、
      宽度为 shell_width·ξ（对数宽度）的壳层平均值；未给出时使用默认对数网格宽度。
    English:
      Angular integral of |xi - xi'|^{-2}. On the diagonal the value is the average over a radial
      shell of logarithmic width ``shell_width`` centred at xi (default: 64 points per decade).

    Raises:
        KernelUndefinedError: xi = xi' = 0
    """
    a = np.asarray(xi, dtype=float)
    b = np.asarray(xi_prime, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    if np.any((a == 0) & (b == 0)):
        raise KernelUndefinedError("ξ = ξ' = 0 时角向核无定义")
    if np.any(a < 0) or np.any(b < 0):
        raise NegativeMomentumError("动量幅值必须非负")
    width = math.log(10.0) / 64.0 if shell_width is None else shell_width
    out = np.empty(a.shape, dtype=float)
    zero = (a == 0) | (b == 0)
    if np.any(zero):
        other = np.where(a[zero] == 0, b[zero], a[zero])
        out[zero] = 4.0 * math.pi / other**2
    diag = (a == b) & ~zero
    if np.any(diag):
        s = a[diag]
        lo = s * math.exp(-0.5 * width)
        hi = s * math.exp(0.5 * width)
        out[diag] = shell_kernel_integral(s, lo, hi) / (hi - lo)
    off = ~(zero | diag)
    if np.any(off):
        x, y = a[off], b[off]
        ratio = np.minimum(x, y) / np.maximum(x, y)
        out[off] = (2.0 * math.pi / (x * y)) * (np.log1p(ratio) - np.log1p(-ratio))
    return float(out) if out.ndim == 0 else out


def shell_kernel_integral(xi: ArrayLike, a: ArrayLike, b: ArrayLike) -> FloatOrArray:
    """
    中文: 闭式计算 ∫_a^b K(ξ, t) dt（二重对数），用于奇异对角单元的精确权重。
    English: Closed-form integral of the angular kernel over t in [a, b] via the dilogarithm.
    """
    x = np.asarray(xi, dtype=float)
    lo = np.asarray(a, dtype=float)
    hi = np.asarray(b, dtype=float)
    if np.any(x <= 0):
        raise KernelUndefinedError("壳层积分需要 ξ > 0")
    val = (2.0 * math.pi / x) * (_kernel_antiderivative(hi / x) - _kernel_antiderivative(lo / x))
    return float(val) if np.ndim(val) == 0 else val


def log_momentum_grid(center: float, decades: float = 8.0, points_per_decade: int = 64) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    中文: 以 center 为中心的对数动量网格，返回中点节点与对应壳层宽度（节点永不重合于壳层边界）。
    English: Log momentum grid centred at ``center``: midpoint nodes and their shell widths.
    """
    if center <= 0 or decades <= 0 or points_per_decade < 1:
        raise ValueError("动量网格参数必须为正")
    n = int(round(decades * points_per_decade))
    edges = center * np.logspace(-decades / 2.0, decades / 2.0, n + 1)
    nodes = np.sqrt(edges[:-1] * edges[1:])
    return nodes, np.diff(edges)
