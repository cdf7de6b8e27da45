"""
文件名: radial.py
作者: JQQ
创建日期: 2025/10/12
最后修改日期: 2025/10/15
版权: 2023 JQQ. All rights reserved.
依赖: numpy, scipy
描述:
  中文: 球对称径向函数工具：对数网格上的 Simpson 积分（含幂律头尾解析修正）、Newton 壳层势与 Hartree 能、
        径向密度抽象（网格样条/均匀球）以及与相干态轮廓平方 g_w² 的径向卷积。
  English: Radial utilities: Simpson quadrature in ln r with power-law head/tail caps, Newton-shell potentials,
    the Hartree self-energy, radial density profiles and radial convolution with the squared coherent profile.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.special import sici

from brtf.utils.logger import get_logger

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]
EULER_GAMMA: float = 0.5772156649015329


class NonIntegrableError(ValueError):
    """幂律端点不可积 / Power-law end behaviour is not integrable."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


def log_grid(r_min: float, r_max: float, n: int) -> FloatArray:
    if not 0 < r_min < r_max or n < 3:
        raise ValueError(f"无效对数网格: r_min={r_min}, r_max={r_max}, n={n}")
    return np.geomspace(r_min, r_max, n)


@lru_cache(maxsize=16)
def _unit_gauss(n: int) -> tuple[FloatArray, FloatArray]:
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_legendre(a: float, b: float, n: int) -> tuple[FloatArray, FloatArray]:
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _unit_gauss(n)
    return a + (b - a) * x, (b - a) * w


def composite_gauss(edges: ArrayLike, n: int) -> tuple[FloatArray, FloatArray]:
    """Composite Gauss-Legendre rule over consecutive panels given by ``edges``."""
    e = np.asarray(edges, dtype=float)
    x, w = _unit_gauss(n)
    widths = np.diff(e)
    nodes = e[:-1, None] + widths[:, None] * x[None, :]
    weights = widths[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def _power_exponent(r0: float, r1: float, f0: float, f1: float) -> float | None:
    if f0 == 0.0 or f1 == 0.0 or (f0 > 0) != (f1 > 0):
        return None
    return math.log(f1 / f0) / math.log(r1 / r0)


def head_integral(r: FloatArray, f: FloatArray) -> float:
    """∫_0^{r[0]} f dr assuming f ~ A r^a below the grid."""
    a = _power_exponent(r[0], r[1], f[0], f[1])
    if a is None:
        return 0.0
    if a <= -1.0:
        raise NonIntegrableError(f"原点附近被积函数 ~ r^{a:.3f}，不可积")
    return float(f[0] * r[0] / (a + 1.0))


def tail_integral(r: FloatArray, f: FloatArray) -> float:
    """∫_{r[-1]}^∞ f dr assuming f ~ A r^a beyond the grid; zero when the tail does not decay fast enough."""
    a = _power_exponent(r[-2], r[-1], f[-2], f[-1])
    if a is None:
        return 0.0
    if a >= -1.0:
        logger.debug("尾部指数 %.3f 不满足可积条件，截断于网格末端", a)
        return 0.0
    return float(-f[-1] * r[-1] / (a + 1.0))


def radial_integral(r: ArrayLike, f: ArrayLike, *, head: bool = True, tail: bool = True) -> float:
    """
    中文: 对数网格上 ∫ f(r) dr：在 ln r 变量下 Simpson 积分，并加上幂律外推的头尾贡献。
    English: ∫ f dr on a log grid, Simpson in ln r plus power-law head and tail caps.
    """
    rr = np.asarray(r, dtype=float)
    ff = np.asarray(f, dtype=float)
    if rr.ndim != 1 or rr.shape != ff.shape:
        raise ValueError("径向积分需要一维且形状一致的网格与函数值")
    total = float(simpson(ff * rr, x=np.log(rr)))
    if head:
        total += head_integral(rr, ff)
    if tail:
        total += tail_integral(rr, ff)
    return total


def volume_integral(r: ArrayLike, f: ArrayLike, **kwargs: bool) -> float:
    """∫ f d³x = 4π ∫ r² f dr for radial f."""
    rr = np.asarray(r, dtype=float)
    return 4.0 * math.pi * radial_integral(rr, rr * rr * np.asarray(f, dtype=float), **kwargs)


def cumulative_radial(r: FloatArray, f: FloatArray) -> FloatArray:
    """Running ∫_0^r f dr including the head below the grid."""
    body = cumulative_simpson(f * r, x=np.log(r), initial=0.0)
    return body + head_integral(r, f)


def enclosed_mass(r: ArrayLike, rho: ArrayLike) -> FloatArray:
    rr = np.asarray(r, dtype=float)
    return cumulative_radial(rr, 4.0 * math.pi * rr * rr * np.asarray(rho, dtype=float))


def newton_potential(r: ArrayLike, rho: ArrayLike) -> FloatArray:
    """
    中文: 球对称密度的 Coulomb 势 U(r) = Q(r)/r + ∫_r^∞ 4π s ρ(s) ds（Newton 壳层定理）。
    English: Potential of a radial density by Newton's shell theorem.
    """
    rr = np.asarray(r, dtype=float)
    rh = np.asarray(rho, dtype=float)
    inner = enclosed_mass(rr, rh)
    g = 4.0 * math.pi * rr * rh
    running = cumulative_radial(rr, g)
    outer = running[-1] + tail_integral(rr, g) - running
    return inner / rr + outer


def self_energy(r: ArrayLike, rho: ArrayLike) -> float:
    """D(ρ, ρ) = ½∬ρρ/|x−y| = ∫ 4π r ρ(r) Q(r) dr."""
    rr = np.asarray(r, dtype=float)
    rh = np.asarray(rho, dtype=float)
    q = enclosed_mass(rr, rh)
    return radial_integral(rr, 4.0 * math.pi * rr * rh * q)


class RadialProfile(ABC):
    """
    中文: 球对称密度抽象：密度、球内质量、总质量、支撑半径与非光滑点。
    English: Spherically symmetric density with enclosed mass and support information.
    """

    @abstractmethod
    def density(self, s: ArrayLike) -> FloatArray: ...

    @abstractmethod
    def mass_within(self, r: ArrayLike) -> FloatArray: ...

    @property
    @abstractmethod
    def total_mass(self) -> float: ...

    @property
    @abstractmethod
    def support_radius(self) -> float: ...

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def scaled(self, s: float) -> RadialProfile:
        """σ_s(x) = s³ σ(s x)."""
        return ScaledProfile(self, s)


class ScaledProfile(RadialProfile):
    def __init__(self, base: RadialProfile, s: float) -> None:
        if s <= 0:
            raise ValueError(f"缩放因子必须为正，当前 {s}")
        self.base = base
        self.s = s

    def density(self, s: ArrayLike) -> FloatArray:
        return self.s**3 * self.base.density(self.s * np.asarray(s, dtype=float))

    def mass_within(self, r: ArrayLike) -> FloatArray:
        return self.base.mass_within(self.s * np.asarray(r, dtype=float))

    @property
    def total_mass(self) -> float:
        return self.base.total_mass

    @property
    def support_radius(self) -> float:
        return self.base.support_radius / self.s

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(b / self.s for b in self.base.breakpoints)


class UniformBall(RadialProfile):
    def __init__(self, mass: float = 1.0, radius: float = 1.0) -> None:
        if mass <= 0 or radius <= 0:
            raise ValueError("均匀球的质量与半径必须为正")
        self.mass = mass
        self.radius = radius

    def density(self, s: ArrayLike) -> FloatArray:
        ss = np.asarray(s, dtype=float)
        return np.where(ss <= self.radius, 3.0 * self.mass / (4.0 * math.pi * self.radius**3), 0.0)

    def mass_within(self, r: ArrayLike) -> FloatArray:
        rr = np.asarray(r, dtype=float)
        return self.mass * np.minimum(rr / self.radius, 1.0) ** 3

    @property
    def total_mass(self) -> float:
        return self.mass

    @property
    def support_radius(self) -> float:
        return self.radius

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.radius,)


class GridDensity(RadialProfile):
    """
    中文:
      网格上给出的径向密度。以 ln r 为自变量对 r^{3/2}σ 做三次样条插值；网格下方按幂律外推，
      网格上方视为零。球内质量由累积 Simpson 表单调插值得到。
    English:
      Tabulated radial density: cubic spline of r^{3/2} sigma in ln r, power law below the grid, zero above it.
    """

    def __init__(self, r: ArrayLike, values: ArrayLike) -> None:
        rr = np.asarray(r, dtype=float)
        vv = np.asarray(values, dtype=float)
        if rr.ndim != 1 or vv.shape != rr.shape:
            raise ValueError("GridDensity 需要一维且形状一致的 r 与 values")
        if np.any(np.diff(rr) <= 0) or rr[0] <= 0:
            raise ValueError("径向网格必须严格递增且为正")
        if np.any(vv < 0):
            raise ValueError("密度必须非负")
        self.r = rr
        self.values = vv
        self._log_r = np.log(rr)
        self._spline = CubicSpline(self._log_r, rr**1.5 * vv)
        self._head_exp = _power_exponent(rr[0], rr[1], vv[0], vv[1])
        if self._head_exp is not None and self._head_exp <= -3.0:
            raise NonIntegrableError(f"原点附近密度 ~ r^{self._head_exp:.3f}，质量发散")
        self._mass_table = enclosed_mass(rr, vv)
        self._mass_interp = PchipInterpolator(self._log_r, self._mass_table)
        positive = np.nonzero(vv > 0)[0]
        last = int(positive[-1]) if positive.size else 0
        self._support = float(rr[min(last + 1, rr.size - 1)])

    def density(self, s: ArrayLike) -> FloatArray:
        ss = np.asarray(s, dtype=float)
        out = np.zeros_like(ss)
        inside = (ss >= self.r[0]) & (ss <= self.r[-1])
        if np.any(inside):
            si = ss[inside]
            out[inside] = np.maximum(self._spline(np.log(si)) / si**1.5, 0.0)
        below = (ss < self.r[0]) & (ss > 0)
        if np.any(below) and self._head_exp is not None:
            out[below] = self.values[0] * (ss[below] / self.r[0]) ** self._head_exp
        return out

    def mass_within(self, r: ArrayLike) -> FloatArray:
        rr = np.asarray(r, dtype=float)
        out = np.full_like(rr, self._mass_table[-1])
        inside = (rr >= self.r[0]) & (rr <= self.r[-1])
        if np.any(inside):
            out[inside] = self._mass_interp(np.log(rr[inside]))
        below = rr < self.r[0]
        if np.any(below):
            if self._head_exp is None:
                out[below] = 0.0
            else:
                out[below] = self._mass_table[0] * (np.maximum(rr[below], 0.0) / self.r[0]) ** (self._head_exp + 3.0)
        return out

    @property
    def total_mass(self) -> float:
        return float(self._mass_table[-1])

    @property
    def support_radius(self) -> float:
        return self._support

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self._support,) if self._support < self.r[-1] else ()


def _cin(z: FloatArray) -> FloatArray:
    """Cin(z) = γ + ln z − Ci(z), with its series for small z."""
    out = np.empty_like(z)
    small = z < 1e-2
    zs = z[small]
    out[small] = zs**2 / 4.0 - zs**4 / 96.0 + zs**6 / 4320.0
    zl = z[~small]
    out[~small] = EULER_GAMMA + np.log(zl) - sici(zl)[1]
    return out


def coherent_square_primitive(v: ArrayLike, width: float) -> FloatArray:
    """G(v) = ∫_0^v g_w(u)² u du for the squared coherent profile of radius ``width``."""
    vv = np.asarray(v, dtype=float)
    x = math.pi * np.minimum(np.abs(vv), width) / width
    return _cin(2.0 * x) / (4.0 * math.pi * width)


def smear_with_profile(
    sigma: RadialProfile,
    r_out: ArrayLike,
    width: float,
    *,
    panels: int = 8,
    nodes: int = 16,
) -> FloatArray:
    """
    中文:
      径向卷积 (σ ∗ g_w²)(r) = (2π/r)∫ σ(s) s [G(r+s) − G(|r−s|)] ds，积分区间为 [max(0, r−w), r+w]，
      采用 s = lo + (hi−lo)u² 代换以吸收原点附近 s^{-1/2} 型奇异性。
    English:
      Radial convolution with g_w^2 through the primitive G of u g_w(u)^2; the substitution s = lo + (hi - lo) u^2
      absorbs the s^{-1/2} behaviour of Coulomb-like densities at the origin.
    """
    if width <= 0:
        raise ValueError(f"卷积宽度必须为正，当前 {width}")
    r = np.asarray(r_out, dtype=float)
    u, wu = composite_gauss(np.linspace(0.0, 1.0, panels + 1), nodes)
    lo = np.maximum(r - width, 0.0)[:, None]
    hi = (r + width)[:, None]
    span = hi - lo
    s = lo + span * u[None, :] ** 2
    jac = 2.0 * span * u[None, :] * wu[None, :]
    kernel = coherent_square_primitive(r[:, None] + s, width) - coherent_square_primitive(r[:, None] - s, width)
    integrand = sigma.density(s) * s * kernel * jac
    return 2.0 * math.pi * integrand.sum(axis=1) / r
