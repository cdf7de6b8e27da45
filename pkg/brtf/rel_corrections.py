"""
文件名: rel_corrections.py
作者: JQQ
创建日期: 2025/10/14
最后修改日期: 2025/10/17
版权: 2023 JQQ. All rights reserved.
依赖: numpy, scipy
描述:
  中文: 相对论修正积分：φ₂ 项、φ₁ 亏损项与 Hartree 提升项的上界积分，核不等式链校验，以及 Z 标度指数拟合。
  English: Relativistic correction integrals (phi_2 term, phi_1 deficit, Hartree lift), the kernel inequality
    chain and log-log exponent fits over a Z sweep.

  对每个相干态动量 p，令 η = ξ − p，|F̂_α(ξ)| = |ĝ_R(η)| 只依赖 |η|；|η − η'|^{-2} 按 Legendre 多极展开，
  1/|η−η'|² = (1/(2ss')) Σ_l (2l+1) Q_l(z) P_l(cos θ)，z = (s² + s'²)/(2ss')。对数网格上 z 只依赖指标差，
  各阶 Q_l 矩阵为 Toeplitz 矩阵；乘子函数只通过 |η + p| 依赖角度，先对 cos(η, p) 做 Legendre 投影。
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_simpson
from scipy.linalg import toeplitz
from scipy.special import eval_legendre, gammaln, hyp2f1
from scipy.stats import linregress
from scipy.stats import t as student_t

from brtf.coherent_states import TrialSpec, build_trial_spec
from brtf.model import AtomSystem, coulomb_angular_kernel, dispersion_values, kinetic_energy, shell_kernel_integral
from brtf.radial import gauss_legendre, volume_integral
from brtf.tf_solver import solve_atom
from brtf.utils.logger import get_logger
from brtf.utils.parallel import parallel_map

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

HARTREE_LIFT_PREFACTOR: float = 2.0**-1.5 * math.pi**-2.5
# 上行递推在 z 接近 1 时稳定；更远处改用超几何表示
Q_RECURRENCE_LIMIT: float = 1.1
NEAR_BAND: int = 2
TERM_NAMES: tuple[str, ...] = ("phi2_term", "phi1_deficit", "hartree_lift")
KERNEL_TOLERANCE: float = 1e-10
# 扫描拟合至少三点，才能给出残差与 t 区间
SWEEP_MIN_POINTS: int = 3


class QuadratureConvergenceError(Exception):
    """多极展开尾项未达到容差 / The multipole tail did not meet the tolerance."""

    def __init__(self, *args: Any, trace: Sequence[float] | None = None) -> None:
        super().__init__(*args)
        self.trace = list(trace) if trace is not None else []


class KernelInequalityError(Exception):
    """核不等式链在某个求积节点被破坏 / The kernel inequality chain failed at a node."""

    def __init__(self, *args: Any, worst: tuple[float, float] | None = None) -> None:
        super().__init__(*args)
        self.worst = worst


@dataclass(frozen=True)
class CorrectionSettings:
    multipole_order: int = 16
    angular_nodes: int = 48
    p_points_per_decade: int = 12
    multipole_tolerance: float = 1e-3

    def __post_init__(self) -> None:
        if self.multipole_order < 1 or self.angular_nodes < 2 or self.p_points_per_decade < 1:
            raise ValueError("多极阶数、角向节点与动量网格密度必须为正")
        if not 0 < self.multipole_tolerance < 1:
            raise ValueError(f"multipole_tolerance 必须位于 (0, 1)，当前 {self.multipole_tolerance}")


# ------------------------------
# 核函数 / kernels
# ------------------------------


def phi2_kernel(xi: ArrayLike, xi_prime: ArrayLike, c: float) -> FloatArray:
    """c²|ξ||ξ'|/(N_c(ξ)N_c(ξ')) = φ₂(ξ)φ₂(ξ')."""
    return dispersion_values(xi, c).phi2 * dispersion_values(xi_prime, c).phi2


def deficit_kernel(xi: ArrayLike, xi_prime: ArrayLike, c: float) -> FloatArray:
    """
    中文: |1 − (E_c + c²)(E_c' + c²)/(N_c N_c')| = d + d' − dd'，d = 1 − φ₁ 采用稳定形式。
    English: Deficit kernel written through the stable deficits d = 1 - phi_1.
    """
    d = dispersion_values(xi, c).phi1_deficit
    dp = dispersion_values(xi_prime, c).phi1_deficit
    return d + dp - d * dp


def kernel_chain(xi: ArrayLike, xi_prime: ArrayLike, c: float) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """
    中文: 返回不等式链的四个层级：核本身、|3EE' − c²(E + E' + c²)|/(NN')、(3c²ξξ' + 2c³(ξ + ξ'))/(NN') 与除以 2c⁴ 的形式。
    English: The four members of the kernel inequality chain, each expected to dominate the previous.
    """
    a = np.asarray(xi, dtype=float)
    b = np.asarray(xi_prime, dtype=float)
    va = dispersion_values(a, c)
    vb = dispersion_values(b, c)
    nn = va.Nc * vb.Nc
    ea = kinetic_energy(a, c)
    eb = kinetic_energy(b, c)
    # 3EE' − c²(E + E' + c²) = 2c²(e + e') + 3ee'，e = E − c²
    middle = np.abs(2.0 * c * c * (ea + eb) + 3.0 * ea * eb) / nn
    numerator = 3.0 * c * c * a * b + 2.0 * c**3 * (a + b)
    return deficit_kernel(a, b, c), middle, numerator / nn, numerator / (2.0 * c**4)


def kernel_chain_violation(xi: ArrayLike, c: float) -> tuple[float, tuple[float, float]]:
    """Largest relative violation of the chain over all pairs of ``xi`` and the pair attaining it."""
    x = np.asarray(xi, dtype=float)
    a, b = np.meshgrid(x, x, indexing="ij")
    links = kernel_chain(a, b, c)
    worst = np.zeros_like(a)
    for lhs, rhs in zip(links[:-1], links[1:], strict=True):
        scale = np.maximum(np.abs(rhs), np.finfo(float).tiny)
        worst = np.maximum(worst, (lhs - rhs) / scale)
    idx = np.unravel_index(int(np.argmax(worst)), worst.shape)
    return float(worst[idx]), (float(a[idx]), float(b[idx]))


def kernel_chain_node_violation(xi: ArrayLike, c: float) -> tuple[float, float]:
    """
    中文:
      链的三个环节分别等价于 NN' <= 4EE'、c²ξξ' − ee' + (2/3)c²[(cξ − e) + (cξ' − e')] >= 0 与 NN' >= 2c⁴，
      即逐节点条件 N <= 2E、e <= cξ、N >= √2c² 的乘积形式；故对节点集合中全部 (ξ, ξ') 成立当且仅当对每个对角对 (ξ, ξ) 成立。
      在全部节点的对角对上求值即覆盖全部节点对，代价 O(n)。
    English:
      Worst relative chain violation over every pair of the given nodes, evaluated exactly through the diagonal pairs.
    """
    x = np.asarray(xi, dtype=float).ravel()
    if x.size == 0:
        return 0.0, math.nan
    links = kernel_chain(x, x, c)
    worst = np.zeros_like(x)
    for lhs, rhs in zip(links[:-1], links[1:], strict=True):
        scale = np.maximum(np.abs(rhs), np.finfo(float).tiny)
        worst = np.maximum(worst, (lhs - rhs) / scale)
    idx = int(np.argmax(worst))
    return float(worst[idx]), float(x[idx])


def check_kernel_chain(xi: ArrayLike, c: float, tolerance: float = KERNEL_TOLERANCE) -> float:
    """
    中文: 对 xi 中全部节点对检查不等式链（经对角对精确归约，不做抽样）。

    Raises:
        KernelInequalityError: 任一节点对违反不等式链
    """
    violation, node = kernel_chain_node_violation(xi, c)
    if violation > tolerance:
        raise KernelInequalityError(f"核不等式在节点 ξ = {node:.6e} 处被破坏，相对超出 {violation:.3e}", worst=(node, node))
    return violation


# ------------------------------
# 多极矩阵 / multipole matrices
# ------------------------------


def legendre_q_table(z: ArrayLike, l_max: int) -> FloatArray:
    """
    中文: 第二类 Legendre 函数 Q_0..Q_lmax 在 z > 1 处的值；z < 1.1 用上行递推，其余用超几何表示。
    English: Legendre functions of the second kind for z > 1, shape (l_max + 1, len(z)).
    """
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(zz <= 1.0):
        raise ValueError("Q_l(z) 仅对 z > 1 计算")
    out = np.empty((l_max + 1, zz.size))
    out[0] = np.arctanh(1.0 / zz)
    near = zz < Q_RECURRENCE_LIMIT
    far = ~near
    if np.any(near):
        zn = zz[near]
        if l_max >= 1:
            out[1, near] = zn * out[0, near] - 1.0
        for ell in range(2, l_max + 1):
            out[ell, near] = ((2 * ell - 1) * zn * out[ell - 1, near] - (ell - 1) * out[ell - 2, near]) / ell
    if np.any(far):
        zf = zz[far]
        for ell in range(1, l_max + 1):
            log_coef = 0.5 * math.log(math.pi) + gammaln(ell + 1.0) - gammaln(ell + 1.5) - (ell + 1) * np.log(2.0 * zf)
            out[ell, far] = np.exp(log_coef) * hyp2f1(0.5 * (ell + 1), 0.5 * (ell + 2), ell + 1.5, 1.0 / zf**2)
    return out


def _cell_average_q0(offset: int, h: float) -> float:
    """Q_0 averaged over the log cell ``offset`` steps from the diagonal, in units where s = 1."""
    center = math.exp(offset * h)
    if offset == 0:
        return coulomb_angular_kernel(1.0, 1.0, shell_width=h) / (2.0 * math.pi)
    lo = math.exp((offset - 0.5) * h)
    hi = math.exp((offset + 0.5) * h)
    return center * shell_kernel_integral(1.0, lo, hi) / (hi - lo) / (2.0 * math.pi)


@lru_cache(maxsize=4)
def multipole_matrices(n: int, h: float, l_max: int) -> FloatArray:
    """
    中文:
      对数步长为 h 的 n 点网格上的 Toeplitz 矩阵 Q_l(z_ij)，z_ij = cosh((i − j)h)。对角线及近邻带使用 Q_0 的
      解析壳层平均，高阶相对 Q_0 的正则差按点值计入；对角线上 Q_0 − Q_l → H_l（调和数）。
    English:
      Toeplitz multipole matrices with product-integration weights near the logarithmic diagonal singularity.
    """
    offsets = np.arange(1, n)
    column = np.empty((l_max + 1, n))
    column[:, 1:] = legendre_q_table(np.cosh(offsets * h), l_max)
    harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, l_max + 1))])
    column[:, 0] = _cell_average_q0(0, h) - harmonic
    for k in range(1, min(NEAR_BAND, n - 1) + 1):
        avg = 0.5 * (_cell_average_q0(k, h) + _cell_average_q0(-k, h))
        column[:, k] += avg - column[0, k]
    mats = np.stack([toeplitz(column[ell]) for ell in range(l_max + 1)])
    mats.setflags(write=False)
    return mats


# ------------------------------
# 动量积分 / momentum integrals
# ------------------------------


@dataclass(frozen=True, eq=False)
class MomentumIntegrals:
    """I(p) for each kernel on the coherent-state momentum grid, with the worst multipole tail."""

    p: FloatArray
    phi2: FloatArray
    deficit: FloatArray
    tail: float
    trace: tuple[float, ...] = ()
    kernel_violation: float = 0.0


def _bilinear(v: FloatArray, mats: FloatArray, w: FloatArray | None = None) -> FloatArray:
    """Per-order Σ_l ((2l+1)/2) v_lᵀ Q_l w_l, returned unsummed, shape (l_max + 1,)."""
    other = v if w is None else w
    orders = np.arange(mats.shape[0])
    return 0.5 * (2 * orders + 1) * np.einsum("li,lij,lj->l", v, mats, other)


def _momentum_grid(spec: TrialSpec, settings: CorrectionSettings, p_top: float) -> FloatArray:
    c = spec.atom.sys.c
    p_lo = 1e-2 / spec.R
    p_hi = min(1e3 * max(c, 1.0 / spec.R), p_top)
    p_hi = max(p_hi, 10.0 * p_lo)
    n = max(4, int(math.ceil(math.log10(p_hi / p_lo) * settings.p_points_per_decade)) + 1)
    return np.geomspace(p_lo, p_hi, n)


def momentum_integrals(spec: TrialSpec, settings: CorrectionSettings | None = None) -> MomentumIntegrals:
    """
    中文:
      对网格上的每个 p 计算 I_φ₂(p) = ∬ φ₂φ₂'|ĝ_R(η)||ĝ_R(η')|/|η − η'|² 与亏损核的对应积分；
      后者按 d + d' − dd' 拆成可分离项：2B(d, 1) − B(d, d)，其中常数 1 只有 l = 0 分量。
    English:
      Shifted-profile double integrals per coherent-state momentum p via multipole expansion.

    Raises:
        QuadratureConvergenceError: 最高阶多极贡献超过容差
        KernelInequalityError: 任一求积节点对违反核不等式链
    """
    settings = settings or CorrectionSettings()
    c = spec.atom.sys.c
    prof = spec.profile
    s = prof.momenta
    base = prof.momentum_widths * s * np.abs(prof.g_hat)
    h = math.log(prof.kappa[1] / prof.kappa[0])
    l_max = settings.multipole_order
    mats = multipole_matrices(s.size, round(h, 15), l_max)
    t, wt = gauss_legendre(-1.0, 1.0, settings.angular_nodes)
    legendre = np.stack([eval_legendre(ell, t) for ell in range(l_max + 1)])
    proj = 2.0 * math.pi * wt[None, :] * legendre

    p_top = float(np.max(spec.atom.momentum_radius(spec.r))) if spec.r.size else 0.0
    if p_top <= 0:
        return MomentumIntegrals(p=np.array([1.0]), phi2=np.zeros(1), deficit=np.zeros(1), tail=0.0)
    p_grid = _momentum_grid(spec, settings, 1.01 * p_top)
    phi2_vals = np.empty_like(p_grid)
    deficit_vals = np.empty_like(p_grid)
    worst_tail = 0.0
    worst_trace: tuple[float, ...] = ()
    kernel_violation = 0.0
    one = np.zeros((l_max + 1, s.size))
    one[0] = 4.0 * math.pi * base
    for i, p in enumerate(p_grid):
        xi = np.sqrt(np.maximum(s[:, None] ** 2 + p * p + 2.0 * p * s[:, None] * t[None, :], 0.0))
        vals = dispersion_values(xi, c)
        v_phi2 = (vals.phi2 @ proj.T).T * base
        v_def = (vals.phi1_deficit @ proj.T).T * base
        orders_phi2 = _bilinear(v_phi2, mats)
        orders_dd = _bilinear(v_def, mats)
        cross = _bilinear(v_def[:1], mats[:1], one[:1])[0]
        phi2_vals[i] = float(orders_phi2.sum())
        deficit_vals[i] = 2.0 * cross - float(orders_dd.sum())
        for orders in (orders_phi2, orders_dd):
            total = abs(float(orders.sum()))
            if total > 0:
                tail = abs(float(orders[-1])) / total
                if tail > worst_tail:
                    worst_tail = tail
                    worst_trace = tuple(float(x) for x in orders)
        kernel_violation = max(kernel_violation, check_kernel_chain(xi, c))
    logger.debug("多极展开: p 点数=%d, 最大尾项相对值=%.3e", p_grid.size, worst_tail)
    if worst_tail > settings.multipole_tolerance:
        raise QuadratureConvergenceError(
            f"多极展开至 l={l_max} 尾项相对值 {worst_tail:.3e} 超过容差 {settings.multipole_tolerance:.1e}",
            trace=worst_trace,
        )
    return MomentumIntegrals(
        p=p_grid,
        phi2=phi2_vals,
        deficit=deficit_vals,
        tail=worst_tail,
        trace=worst_trace,
        kernel_violation=kernel_violation,
    )


def ball_average(p: FloatArray, values: FloatArray, P: ArrayLike) -> FloatArray:
    """
    中文: J(P) = ∫_0^P p² I(p) dp；网格下方 I 取首值，网格上方 I 取末值。
    English: Cumulative momentum-ball integral of I(p).
    """
    PP = np.asarray(P, dtype=float)
    if p.size < 2:
        return np.zeros_like(PP)
    logp = np.log(p)
    head = values[0] * p[0] ** 3 / 3.0
    J = head + cumulative_simpson(values * p**3, x=logp, initial=0.0)
    out = np.zeros_like(PP)
    low = (PP > 0) & (PP < p[0])
    out[low] = values[0] * PP[low] ** 3 / 3.0
    mid = (PP >= p[0]) & (PP <= p[-1])
    out[mid] = np.interp(np.log(PP[mid]), logp, J / p**3) * PP[mid] ** 3
    high = PP > p[-1]
    out[high] = J[-1] + values[-1] * (PP[high] ** 3 - p[-1] ** 3) / 3.0
    return out


def phase_space_average(spec: TrialSpec, p: FloatArray, values: FloatArray) -> float:
    """Z∫dΩ A(α) I(|p|) = Z (1/π²) ∫ J(P(q)) dq."""
    P = spec.atom.momentum_radius(spec.r)
    J = ball_average(p, values, P)
    return spec.atom.sys.Z * volume_integral(spec.r, J) / math.pi**2


# ------------------------------
# 修正项 / correction terms
# ------------------------------


@dataclass(frozen=True)
class CorrectionTerms:
    Z: float
    lam: float
    kappa: float
    delta: float
    c: float
    R: float
    phi2_term: float
    phi1_deficit: float
    hartree_lift: float
    multipole_tail: float
    kernel_violation: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def scaled(self) -> dict[str, float]:
        """Each term divided by Z^{7/3}."""
        z73 = self.Z ** (7.0 / 3.0)
        return {name: getattr(self, name) / z73 for name in TERM_NAMES}


@lru_cache(maxsize=16)
def _correction_terms_cached(spec: TrialSpec, settings: CorrectionSettings) -> CorrectionTerms:
    sys = spec.atom.sys
    integrals = momentum_integrals(spec, settings)
    violation = integrals.kernel_violation
    phi2 = phase_space_average(spec, integrals.p, integrals.phi2)
    deficit = phase_space_average(spec, integrals.p, integrals.deficit)
    terms = CorrectionTerms(
        Z=sys.Z,
        lam=sys.lam,
        kappa=sys.kappa,
        delta=sys.delta,
        c=sys.c,
        R=sys.R,
        phi2_term=phi2,
        phi1_deficit=deficit,
        hartree_lift=HARTREE_LIFT_PREFACTOR * (deficit + phi2),
        multipole_tail=integrals.tail,
        kernel_violation=violation,
    )
    logger.debug("修正项 Z=%.4g: φ₂=%.6e, 亏损=%.6e, Hartree=%.6e", sys.Z, phi2, deficit, terms.hartree_lift)
    return terms


def correction_terms(spec: TrialSpec, settings: CorrectionSettings | None = None) -> CorrectionTerms:
    """
    中文: 一次计算三个修正积分（共享同一组动量积分），结果按 (spec, settings) 缓存。
    English: All three correction integrals for one trial state.

    Raises:
        QuadratureConvergenceError: 多极尾项超差
        KernelInequalityError: 核不等式链被破坏
    """
    return _correction_terms_cached(spec, settings or CorrectionSettings())


def phi2_bound(spec: TrialSpec, settings: CorrectionSettings | None = None) -> float:
    """Z∫dΩ A ∬ c²|ξ||ξ'||F̂_α(ξ)||F̂_α(ξ')|/(|ξ − ξ'|² N_c N_c')."""
    return correction_terms(spec, settings).phi2_term


def phi1_deficit_bound(spec: TrialSpec, settings: CorrectionSettings | None = None) -> float:
    """Z∫dΩ A ∬ |1 − (E_c + c²)(E_c' + c²)/(N_c N_c')||F̂_α||F̂_α'|/|ξ − ξ'|²."""
    return correction_terms(spec, settings).phi1_deficit


def hartree_lift_bound(spec: TrialSpec, settings: CorrectionSettings | None = None) -> float:
    """2^{-3/2}π^{-5/2} Z∫dΩ A ∬ K(ξ, ξ')|F̂_α||F̂_α'|/|ξ − ξ'|², K the sum of both kernels."""
    return correction_terms(spec, settings).hartree_lift


# ------------------------------
# 指数拟合 / exponent fits
# ------------------------------


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float
    stderr: float
    ci_low: float
    ci_high: float
    n: int

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def fit_exponent(records: Iterable[tuple[float, float]], confidence: float = 0.95, *, min_points: int = 2) -> ExponentFit:
    """
    中文: 对 (log Z, log value) 做最小二乘直线拟合；residual 为最大绝对对数偏差，置信区间按 t 分布（n ≥ 3）。
    扫描中的拟合传 min_points=SWEEP_MIN_POINTS。
    English: Least-squares log-log fit with a Student-t confidence interval on the slope.

    Raises:
        ValueError: 记录少于 min_points 条、值非正或 Z 重复
    """
    data = [(float(z), float(v)) for z, v in records]
    if len(data) < max(min_points, 2):
        raise ValueError(f"拟合至少需要 {max(min_points, 2)} 条记录，当前 {len(data)}")
    zs = np.array([z for z, _ in data])
    vs = np.array([v for _, v in data])
    if np.any(vs <= 0) or np.any(zs <= 0):
        raise ValueError("拟合要求 Z 与取值均为正")
    if np.unique(zs).size != zs.size:
        raise ValueError("拟合要求 Z 互不相同")
    x, y = np.log(zs), np.log(vs)
    res = linregress(x, y)
    slope, intercept = float(res.slope), float(res.intercept)
    residual = float(np.max(np.abs(y - (intercept + slope * x))))
    stderr = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    if len(data) >= 3:
        half = float(student_t.ppf(0.5 + 0.5 * confidence, len(data) - 2)) * stderr
    else:
        half = 0.0
    return ExponentFit(
        slope=slope,
        intercept=intercept,
        residual=residual,
        stderr=stderr,
        ci_low=slope - half,
        ci_high=slope + half,
        n=len(data),
    )


def claimed_exponents(delta: float) -> dict[str, float]:
    return {"phi2_term": 4.0 / 3.0 + delta, "phi1_deficit": 5.0 / 3.0 + delta, "hartree_lift": 5.0 / 3.0 + delta}


@dataclass(frozen=True)
class CorrectionSweep:
    records: tuple[CorrectionTerms, ...]
    fits: dict[str, ExponentFit]
    delta: float

    def check_claims(self, margin: float = 0.1) -> dict[str, bool]:
        """Fitted slope <= claimed exponent + margin for every term."""
        claims = claimed_exponents(self.delta)
        return {name: self.fits[name].slope <= claims[name] + margin for name in TERM_NAMES}


@dataclass(frozen=True)
class SweepPointOptions:
    lam: float = 1.0
    kappa: float = 0.5
    delta: float = 5.0 / 9.0
    R_tilde_factor: float = 100.0
    K: int = 20
    momentum_decades: float = 8.0
    points_per_decade: int = 64
    tolerance: float = 1e-10
    tf_grid: tuple[tuple[str, float], ...] = ()


def correction_point(Z: float, options: SweepPointOptions, settings: CorrectionSettings) -> CorrectionTerms:
    sys = AtomSystem.from_lambda(options.lam, Z, options.kappa, options.delta)
    atom = solve_atom(sys, options.tolerance, **dict(options.tf_grid))
    spec = build_trial_spec(
        atom,
        R_tilde_factor=options.R_tilde_factor,
        K=options.K,
        decades=options.momentum_decades,
        points_per_decade=options.points_per_decade,
    )
    return correction_terms(spec, settings)


def _correction_point_args(args: tuple[float, SweepPointOptions, CorrectionSettings]) -> CorrectionTerms:
    return correction_point(*args)


def correction_sweep(
    Z_values: Sequence[float],
    options: SweepPointOptions | None = None,
    settings: CorrectionSettings | None = None,
    *,
    workers: int = 1,
) -> CorrectionSweep:
    """
    中文: 在 Z 序列上计算三个修正项并分别拟合 log-log 斜率；记录顺序与输入一致。
    English: Correction terms over a Z sweep with a slope fit per term.
    """
    options = options or SweepPointOptions()
    settings = settings or CorrectionSettings()
    if len(Z_values) < SWEEP_MIN_POINTS:
        raise ValueError(f"修正项扫描至少需要 {SWEEP_MIN_POINTS} 个 Z")
    records = tuple(parallel_map(_correction_point_args, [(float(Z), options, settings) for Z in Z_values], workers))
    fits = {name: fit_exponent(((r.Z, getattr(r, name)) for r in records), min_points=SWEEP_MIN_POINTS) for name in TERM_NAMES}
    for name, fit in fits.items():
        logger.info("修正项 %s: 拟合斜率 %.4f (声称 ≤ %.4f)", name, fit.slope, claimed_exponents(options.delta)[name])
    return CorrectionSweep(records=records, fits=fits, delta=options.delta)
