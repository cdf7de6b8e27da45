"""
文件名: tf_solver.py
作者: JQQ
创建日期: 2025/10/12
最后修改日期: 2025/10/16
版权: 2023 JQQ. All rights reserved.
依赖: numpy, scipy
描述:
  中文: Thomas-Fermi 方程求解（中性原子、正离子；负离子冻结于中性解），TF 能量泛函及其标度律。
  English: Thomas-Fermi solver for neutral atoms and positive ions (negative ions frozen at the neutral
    minimizer), the TF energy functional and its scaling law.

  普适方程 y'' = y^{3/2}/sqrt(t)，y(0) = 1。中性解的尾部对初始斜率指数敏感，双精度下单次打靶只能到达
  t ~ 20，因此采用分段打靶：每段二分到机器精度后，在上下两条轨道仍一致的最远点重新起步，继续二分该点的导数。
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp

from brtf.model import AtomSystem
from brtf.radial import GridDensity, newton_potential, self_energy, volume_integral
from brtf.utils.logger import get_logger

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

GAMMA_TF: float = (3.0 * math.pi**2) ** (2.0 / 3.0) / 2.0
# r = TF_LENGTH * Z^{-1/3} * t
TF_LENGTH: float = 0.5 * (3.0 * math.pi / 4.0) ** (2.0 / 3.0)

SLOPE_BRACKET: tuple[float, float] = (-2.0, -1.0)
MAX_BISECTIONS: int = 200
MAX_EXPANSIONS: int = 60
MAX_STAGES: int = 64
MATCH_TOLERANCE: float = 1e-8
ODE_RTOL: float = 1e-12


class ShootingBracketError(Exception):
    """打靶区间无法包住目标 / The slope bracket does not enclose the target."""

    def __init__(self, *args: Any, bracket: tuple[float, float] | None = None) -> None:
        super().__init__(*args)
        self.bracket = bracket


class ShootingConvergenceError(Exception):
    """打靶在迭代上限内未收敛 / Shooting did not converge within the iteration cap."""

    def __init__(self, *args: Any, residual: float | None = None) -> None:
        super().__init__(*args)
        self.residual = residual


class GridRangeError(Exception):
    """网格在极端 Z 下溢出/下溢 / Grid underflow or overflow at extreme Z."""

    def __init__(self, *args: Any, suggested_t_min: float | None = None, suggested_t_max: float | None = None) -> None:
        super().__init__(*args)
        self.suggested_t_min = suggested_t_min
        self.suggested_t_max = suggested_t_max


class UnsupportedDensityError(Exception):
    """仅支持球对称径向密度 / Only spherically symmetric radial densities are supported."""

    def __init__(self, *args: Any) -> None:
        super().__init__(*args)


@dataclass(frozen=True, eq=False)
class TFUniversalSolution:
    """
    中文: 普适屏蔽函数 y(t)。lambda_eff = min(λ, 1)；中性解 t0 = inf。
    English: Universal screening function on a log grid in t.
    """

    lambda_eff: float
    t: FloatArray
    y: FloatArray
    yp: FloatArray
    slope0: float
    t0: float
    boundary_residual: float
    stages: int = 1

    @property
    def is_neutral(self) -> bool:
        return math.isinf(self.t0)


@dataclass(frozen=True)
class TFEnergy:
    kinetic: float
    external: float
    hartree: float

    @property
    def total(self) -> float:
        return self.kinetic + self.external + self.hartree

    def as_dict(self) -> dict[str, float]:
        return {"kinetic": self.kinetic, "external": self.external, "hartree": self.hartree, "total": self.total}


@dataclass(frozen=True, eq=False)
class TFAtom:
    """
    中文: 已求解的 TF 原子：径向网格上的密度 ρ、势 V_Z、化学势 u' 与能量分解。
    English: Solved Thomas-Fermi atom on a radial log grid.
    """

    sys: AtomSystem
    universal: TFUniversalSolution
    r: FloatArray
    rho: FloatArray
    V: FloatArray
    u_prime: float
    energy: TFEnergy

    @cached_property
    def profile(self) -> GridDensity:
        return GridDensity(self.r, self.rho)

    @property
    def electron_count(self) -> float:
        return volume_integral(self.r, self.rho)

    @property
    def effective_potential(self) -> FloatArray:
        """[V - u']_+ on the grid."""
        return np.maximum(self.V - self.u_prime, 0.0)

    def momentum_radius(self, q: ArrayLike) -> FloatArray:
        """
        中文: 占据相空间球半径 P(|q|) = (2[V_Z − u']₊)^{1/2}；网格下方按 |q|^{-1/2} 外推，网格上方为零。
        English: Radius of the occupied momentum ball at distance |q|.
        """
        qq = np.abs(np.asarray(q, dtype=float))
        p_grid = np.sqrt(2.0 * self.effective_potential)
        scaled = np.sqrt(self.r) * p_grid
        out = np.zeros_like(qq)
        inside = (qq >= self.r[0]) & (qq <= self.r[-1])
        if np.any(inside):
            out[inside] = np.interp(np.log(qq[inside]), np.log(self.r), scaled) / np.sqrt(qq[inside])
        below = (qq < self.r[0]) & (qq > 0)
        if np.any(below):
            out[below] = scaled[0] / np.sqrt(qq[below])
        return out

    def euler_lagrange_residual(self) -> float:
        """
        中文: sup |γ_TF ρ^{2/3} − [V − u']₊| / sup V，其中 V 由 ρ 经 Newton 壳层重新计算（网格内部 5%–95%）。
        English: Euler-Lagrange residual with V recomputed from rho through the Newton-shell potential.
        """
        v_check = self.sys.Z / self.r - newton_potential(self.r, self.rho)
        lhs = GAMMA_TF * self.rho ** (2.0 / 3.0)
        rhs = np.maximum(v_check - self.u_prime, 0.0)
        n = self.r.size
        interior = slice(n // 20, n - n // 20)
        return float(np.max(np.abs(lhs - rhs)[interior]) / np.max(self.V))

    def pointwise_bound_ratio(self) -> float:
        """max over nodes of ρ / ((Z/γ_TF)^{3/2} r^{-3/2}); at most 1."""
        bound = (self.sys.Z / GAMMA_TF) ** 1.5 * self.r**-1.5
        return float(np.max(self.rho / bound))


class _Event:
    """Terminal event on one component of the state (0: y crosses zero, 1: y' turns positive)."""

    def __init__(self, index: int, direction: float) -> None:
        self.index = index
        self.direction = direction
        self.terminal = True

    def __call__(self, t: float, z: FloatArray) -> float:
        return float(z[self.index])


_CROSSING = _Event(0, -1.0)
_UPTURN = _Event(1, 1.0)


def _rhs(t: float, z: FloatArray) -> list[float]:
    y = z[0] if z[0] > 0.0 else 0.0
    return [z[1], y**1.5 / math.sqrt(t)]


def _series_start(t: float, slope: float) -> tuple[float, float]:
    """Small-t expansion y = 1 + s t + (4/3) t^{3/2} + (2/5) s t^{5/2} + t^3/3."""
    st = math.sqrt(t)
    y = 1.0 + slope * t + (4.0 / 3.0) * t * st + 0.4 * slope * t * t * st + t**3 / 3.0
    yp = slope + 2.0 * st + slope * t * st + t * t
    return y, yp


@dataclass
class _Shot:
    param: float
    sol: Any
    t_end: float
    outcome: Literal["cross", "turn", "survive"]
    y_end: float
    yp_end: float


def _shoot(t_a: float, y_a: float, yp_a: float, t_max: float, param: float) -> _Shot:
    scale = max(abs(y_a), 1e-300)
    atol = [ODE_RTOL * 1e-3 * scale, ODE_RTOL * 1e-3 * max(abs(yp_a), 1e-300)]
    res = solve_ivp(
        _rhs,
        (t_a, t_max),
        [y_a, yp_a],
        method="DOP853",
        rtol=ODE_RTOL,
        atol=atol,
        dense_output=True,
        events=[_CROSSING, _UPTURN],
    )
    if res.status == -1:
        raise ShootingConvergenceError(f"ODE 积分失败: {res.message}")
    outcome: Literal["cross", "turn", "survive"]
    if res.t_events[0].size:
        outcome = "cross"
        t_end = float(res.t_events[0][0])
        y_end, yp_end = (float(v) for v in res.y_events[0][0])
    elif res.t_events[1].size:
        outcome = "turn"
        t_end = float(res.t_events[1][0])
        y_end, yp_end = (float(v) for v in res.y_events[1][0])
    else:
        outcome = "survive"
        t_end = float(res.t[-1])
        y_end, yp_end = float(res.y[0, -1]), float(res.y[1, -1])
    return _Shot(param=param, sol=res.sol, t_end=t_end, outcome=outcome, y_end=y_end, yp_end=yp_end)


@dataclass
class _Piece:
    t_a: float
    t_b: float
    sol: Any


def _neutral_stage(t_a: float, init: Any, bracket: tuple[float, float], t_max: float) -> tuple[_Shot, _Shot | None]:
    """
    Bisect one stage. Returns (lower, upper) trajectories, or (survivor, None) when a trajectory reaches t_max.
    ``init`` maps the stage parameter to the initial state at t_a.
    """
    lo, hi = bracket
    width = hi - lo

    def run(param: float) -> _Shot:
        y_a, yp_a = init(param)
        return _shoot(t_a, y_a, yp_a, t_max, param)

    shot_lo = run(lo)
    for _ in range(MAX_EXPANSIONS):
        if shot_lo.outcome != "turn":
            break
        lo -= width
        shot_lo = run(lo)
    else:
        raise ShootingBracketError(f"下端斜率无法使解穿零: [{lo}, {hi}]", bracket=(lo, hi))
    shot_hi = run(hi)
    for _ in range(MAX_EXPANSIONS):
        if shot_hi.outcome != "cross":
            break
        hi += width
        shot_hi = run(hi)
    else:
        raise ShootingBracketError(f"上端斜率无法使解回升: [{lo}, {hi}]", bracket=(lo, hi))
    if shot_lo.outcome == "survive":
        return shot_lo, None
    if shot_hi.outcome == "survive":
        return shot_hi, None

    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (shot_lo.param + shot_hi.param)
        if mid in (shot_lo.param, shot_hi.param):
            break
        shot = run(mid)
        if shot.outcome == "survive":
            return shot, None
        if shot.outcome == "cross":
            shot_lo = shot
        else:
            shot_hi = shot
    return shot_lo, shot_hi


def _solve_neutral(t_min: float, t_max: float) -> tuple[list[_Piece], float, int]:
    pieces: list[_Piece] = []
    t_a = t_min
    slope0 = math.nan

    def first_init(s: float) -> tuple[float, float]:
        return _series_start(t_min, s)

    init: Any = first_init
    bracket = SLOPE_BRACKET
    for stage in range(MAX_STAGES):
        lower, upper = _neutral_stage(t_a, init, bracket, t_max)
        if stage == 0:
            slope0 = lower.param if upper is None else 0.5 * (lower.param + upper.param)
        if upper is None:
            pieces.append(_Piece(t_a, t_max, lower.sol))
            logger.debug("中性打靶第 %d 段直接到达 t_max=%.3g", stage, t_max)
            return pieces, slope0, stage + 1

        t_end = min(lower.t_end, upper.t_end)
        tt = np.geomspace(t_a, t_end, 4001)[1:]
        y_lo = lower.sol(tt)[0]
        y_hi = upper.sol(tt)[0]
        agree = np.abs(y_lo - y_hi) <= MATCH_TOLERANCE * np.abs(0.5 * (y_lo + y_hi))
        first_bad = int(np.argmin(agree)) if not np.all(agree) else tt.size - 1
        if first_bad < 1:
            raise ShootingConvergenceError(f"分段打靶在 t={t_a:.6g} 处无法继续推进")
        t_m = float(tt[first_bad - 1])
        pieces.append(_Piece(t_a, t_m, upper.sol))

        z_lo = lower.sol(t_m)
        z_hi = upper.sol(t_m)
        y_m = 0.5 * float(z_lo[0] + z_hi[0])
        center = 0.5 * float(z_lo[1] + z_hi[1])
        half = 8.0 * max(abs(float(z_hi[1] - z_lo[1])), 1e-10 * abs(center))
        bracket = (center - half, center + half)
        logger.debug("中性打靶第 %d 段: t %.4g -> %.4g, y=%.4e", stage, t_a, t_m, y_m)

        def stage_init(s: float, y_m: float = y_m) -> tuple[float, float]:
            return y_m, s

        init = stage_init
        t_a = t_m
        if t_a >= t_max * (1.0 - 1e-12):
            return pieces, slope0, stage + 1
    raise ShootingConvergenceError(f"分段打靶超过 {MAX_STAGES} 段仍未到达 t_max={t_max}")


def _ionic_charge(shot: _Shot) -> float:
    """-t0 y'(t0) for a crossing trajectory, zero otherwise."""
    if shot.outcome != "cross":
        return 0.0
    return -shot.t_end * shot.yp_end


def _solve_ionic(lam: float, tolerance: float, t_min: float) -> tuple[_Shot, float]:
    target = 1.0 - lam
    t_cap = 1e8

    def run(s: float) -> _Shot:
        y0, yp0 = _series_start(t_min, s)
        return _shoot(t_min, y0, yp0, t_cap, s)

    lo, hi = SLOPE_BRACKET
    shot_lo = run(lo)
    for _ in range(MAX_EXPANSIONS):
        if _ionic_charge(shot_lo) > target:
            break
        lo *= 2.0
        shot_lo = run(lo)
    else:
        raise ShootingBracketError(f"离子边界条件无法被包住: [{lo}, {hi}]", bracket=(lo, hi))
    shot_hi = run(hi)
    if _ionic_charge(shot_hi) > target:
        raise ShootingBracketError(f"上端斜率 {hi} 已超出目标电荷", bracket=(lo, hi))

    best = shot_lo
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (shot_lo.param + shot_hi.param)
        shot = run(mid)
        q = _ionic_charge(shot)
        if shot.outcome == "cross" and abs(q - target) <= tolerance * target:
            return shot, abs(q - target)
        if q > target:
            shot_lo = shot
            best = shot
        else:
            shot_hi = shot
        if shot_hi.param - shot_lo.param <= 4.0 * np.finfo(float).eps * abs(mid):
            break
    residual = abs(_ionic_charge(best) - target)
    raise ShootingConvergenceError(f"离子打靶未收敛，边界残差 {residual:.3e}", residual=residual)


def _validate_tolerance(tolerance: float) -> None:
    if not 1e-14 < tolerance < 1e-3:
        raise ValueError(f"tolerance 必须位于 (1e-14, 1e-3) 内，当前 {tolerance}")


@lru_cache(maxsize=32)
def _solve_universal_cached(lam_eff: float, tolerance: float, t_min: float, t_max: float, n_nodes: int) -> TFUniversalSolution:
    if lam_eff >= 1.0:
        pieces, slope0, stages = _solve_neutral(t_min, t_max)
        t = np.geomspace(t_min, t_max, n_nodes)
        y = np.empty_like(t)
        yp = np.empty_like(t)
        for i, piece in enumerate(pieces):
            last = i == len(pieces) - 1
            mask = (t >= piece.t_a) if last else ((t >= piece.t_a) & (t < piece.t_b))
            if np.any(mask):
                z = piece.sol(t[mask])
                y[mask] = z[0]
                yp[mask] = z[1]
        y = np.maximum(y, 0.0)
        residual = float(t[-1] * y[-1])
        logger.info("中性 TF 解: slope0=%.10f, 分段数=%d, t_max·y(t_max)=%.3e", slope0, stages, residual)
        sol = TFUniversalSolution(1.0, t, y, yp, slope0, math.inf, residual, stages)
    else:
        shot, residual = _solve_ionic(lam_eff, tolerance, t_min)
        t0 = shot.t_end
        t = np.geomspace(t_min, 1.5 * t0, n_nodes)
        inside = t <= t0
        z = shot.sol(t[inside])
        y = np.zeros_like(t)
        yp = np.full_like(t, shot.yp_end)
        y[inside] = np.maximum(z[0], 0.0)
        yp[inside] = z[1]
        logger.info("离子 TF 解: λ=%.4f, slope0=%.10f, t0=%.6f, 边界残差=%.3e", lam_eff, shot.param, t0, residual)
        sol = TFUniversalSolution(lam_eff, t, y, yp, shot.param, t0, residual, 1)
    for arr in (sol.t, sol.y, sol.yp):
        arr.setflags(write=False)
    return sol


def solve_universal(
    lam: float,
    tolerance: float = 1e-10,
    *,
    t_min: float = 1e-6,
    t_max: float = 1e4,
    n_nodes: int = 4000,
) -> TFUniversalSolution:
    """
    中文:
      求解普适 TF 方程 y'' = y^{3/2}/√t。λ ≥ 1 返回中性解（同一缓存对象），λ < 1 满足离子边界条件
      y(t0) = 0, −t0 y'(t0) = 1 − λ。
    English:
      Solve the universal TF equation by shooting on y'(0). Results are cached per (lambda_eff, grid).

    Raises:
        ValueError: lam <= 0 或 tolerance 越界
        ShootingBracketError: 斜率区间扩展后仍无法包住目标
        ShootingConvergenceError: 迭代上限内未收敛
    """
    if lam <= 0:
        raise ValueError(f"lambda 必须为正，当前 {lam}")
    _validate_tolerance(tolerance)
    if not 0 < t_min < t_max or n_nodes < 16:
        raise ValueError(f"无效网格参数: t_min={t_min}, t_max={t_max}, n_nodes={n_nodes}")
    return _solve_universal_cached(min(float(lam), 1.0), float(tolerance), float(t_min), float(t_max), int(n_nodes))


def _check_grid(sys: AtomSystem, r: FloatArray, rho: FloatArray, universal: TFUniversalSolution) -> None:
    tiny = np.finfo(float).tiny * 1e10
    if r[0] <= tiny or not np.all(np.isfinite(rho)) or not np.isfinite(r[-1]):
        b = TF_LENGTH * sys.Z ** (-1.0 / 3.0)
        suggested_min = max(universal.t[0], 1e-250 / b)
        suggested_max = min(universal.t[-1], 1e250 / b)
        raise GridRangeError(
            f"Z={sys.Z:.6g} 时径向网格越界 [{r[0]:.3e}, {r[-1]:.3e}]，建议 t ∈ [{suggested_min:.3e}, {suggested_max:.3e}]",
            suggested_t_min=suggested_min,
            suggested_t_max=suggested_max,
        )


def build_atom(sys: AtomSystem, universal: TFUniversalSolution) -> TFAtom:
    """
    中文: 将普适解按 Z^{4/3}/Z^{1/3} 标度得到体系的 ρ、V_Z 与 u'。
    English: Rescale the universal profile to the system's charge.

    Raises:
        ValueError: universal 的 λ_eff 与体系不符
        GridRangeError: 极端 Z 下网格溢出
    """
    lam_eff = min(sys.lam, 1.0)
    if not math.isclose(universal.lambda_eff, lam_eff, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"普适解 λ_eff={universal.lambda_eff} 与体系 λ_eff={lam_eff} 不一致")
    Z = sys.Z
    b = TF_LENGTH * Z ** (-1.0 / 3.0)
    t = universal.t
    r = b * t
    if universal.is_neutral:
        u_prime = 0.0
        V = Z * universal.y / r
    else:
        r0 = b * universal.t0
        u_prime = (Z - sys.N) / r0
        V = np.where(t <= universal.t0, Z * universal.y / r + u_prime, (Z - sys.N) / r)
    rho = (Z * universal.y / (GAMMA_TF * r)) ** 1.5
    _check_grid(sys, r, rho, universal)
    energy = tf_energy(GridDensity(r, rho), sys)
    return TFAtom(sys=sys, universal=universal, r=r, rho=rho, V=V, u_prime=u_prime, energy=energy)


def solve_atom(sys: AtomSystem, tolerance: float = 1e-10, **grid: Any) -> TFAtom:
    """solve_universal + build_atom."""
    return build_atom(sys, solve_universal(sys.lam, tolerance, **grid))


def tf_energy(rho: GridDensity, sys: AtomSystem) -> TFEnergy:
    """
    中文: TF 泛函 (3/5)γ∫ρ^{5/3} − Z∫ρ/|x| + D(ρ,ρ)，D 由 Newton 壳层公式计算。
    English: Thomas-Fermi functional of a radial density.

    Raises:
        UnsupportedDensityError: 非球对称（非 GridDensity）输入
    """
    if not isinstance(rho, GridDensity):
        raise UnsupportedDensityError(f"仅支持径向网格密度 GridDensity，收到 {type(rho).__name__}")
    r, values = rho.r, rho.values
    kinetic = 0.6 * GAMMA_TF * volume_integral(r, values ** (5.0 / 3.0))
    external = -sys.Z * volume_integral(r, values / r)
    hartree = self_energy(r, values)
    return TFEnergy(kinetic=kinetic, external=external, hartree=hartree)


def scaling_check(lam: float, Z1: float, Z2: float, *, kappa: float = 0.5, delta: float = 5.0 / 9.0, **grid: Any) -> float:
    """
    中文: |E(λZ1,Z1)/Z1^{7/3} − E(λZ2,Z2)/Z2^{7/3}| / |E(λZ1,Z1)/Z1^{7/3}|。
    English: Relative deviation from the Z^{7/3} scaling law.
    """
    if Z1 < 1 or Z2 < 1:
        raise ValueError("scaling_check 需要 Z1, Z2 >= 1")
    e1 = solve_atom(AtomSystem.from_lambda(lam, Z1, kappa, delta), **grid).energy.total / Z1 ** (7.0 / 3.0)
    e2 = solve_atom(AtomSystem.from_lambda(lam, Z2, kappa, delta), **grid).energy.total / Z2 ** (7.0 / 3.0)
    return abs(e1 - e2) / abs(e1)
