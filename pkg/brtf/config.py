"""
文件名: config.py
作者: JQQ
创建日期: 2025/10/16
最后修改日期: 2025/10/17
版权: 2023 JQQ. All rights reserved.
依赖: pydantic
描述:
  中文: 运行配置 RunConfig（JSON 文件 + --set 覆盖 + 命令行参数覆盖），以及由其派生的各模块选项。
  English: Run configuration loaded from JSON, overridden by key-value pairs and CLI flags.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from brtf.bounds import DEFAULT_DELTA_GRID, BoundsOptions
from brtf.model import DELTA_MAX, DELTA_MIN, AtomSystem
from brtf.rel_corrections import CorrectionSettings, SweepPointOptions

OutputFormat = Literal["csv", "json", "svg"]


class ConfigLoadError(Exception):
    """配置文件不可读 / Config file cannot be read."""

    def __init__(self, *args: Any, path: str | None = None) -> None:
        super().__init__(*args)
        self.path = path


class RunConfig(BaseModel):
    """
    中文: 一次运行的全部参数；物理字段须满足 AtomSystem 的约束，Z_sweep 严格递增。
    English: Every parameter of a run; echoed verbatim into the manifest.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    lam: float = Field(default=1.0, alias="lambda", gt=0, description="λ = N/Z")
    Z: float = Field(default=10.0, gt=0, description="单点命令使用的核电荷")
    kappa: float = Field(default=0.5, description="κ = Z/c")
    delta: float = Field(default=5.0 / 9.0, description="相干态尺度指数 δ")
    Z_sweep: tuple[float, ...] = Field(default=(20.0, 40.0, 80.0, 160.0, 320.0))
    R_tilde_factor: float = Field(default=100.0, gt=0)
    K: int = Field(default=20, ge=1)

    t_min: float = Field(default=1e-6, gt=0)
    t_max: float = Field(default=1e4, gt=0)
    n_nodes: int = Field(default=4000, ge=16)
    shooting_tolerance: float = Field(default=1e-10, gt=0)

    momentum_decades: float = Field(default=8.0, gt=0)
    points_per_decade: int = Field(default=64, ge=4)
    multipole_order: int = Field(default=16, ge=1)
    angular_nodes: int = Field(default=48, ge=2)
    p_points_per_decade: int = Field(default=12, ge=1)
    multipole_tolerance: float = Field(default=1e-3, gt=0, lt=1)

    trial_count: int = Field(default=200, ge=1)
    q_samples: int = Field(default=48, ge=1)
    box_points: int = Field(default=32, ge=8)
    seed: int = Field(default=0, ge=0)

    hole_scan_points: int = Field(default=96, ge=3)
    delta_grid: tuple[float, ...] = Field(default=DEFAULT_DELTA_GRID)
    run_delta_scan: bool = Field(default=False, description="sweep 时在固定 Z 上追加 δ 扫描")
    identity_tolerance: float | None = Field(default=None, gt=0, description="覆盖所有恒等式检查的容差")
    potential_cap_factor: float = Field(default=1.0, gt=0)
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Field(default=Path("brtf-out"))
    formats: tuple[OutputFormat, ...] = Field(default=("csv", "json", "svg"))

    @field_validator("delta_grid")
    @classmethod
    def _check_delta_grid(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v or any(not DELTA_MIN < d < DELTA_MAX for d in v):
            raise ValueError(f"delta_grid 必须非空且位于 (1/3, 2/3)，当前 {list(v)}")
        return v

    @field_validator("Z_sweep")
    @classmethod
    def _check_sweep(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(z <= 0 for z in v):
            raise ValueError("Z_sweep 必须全部为正")
        if any(b <= a for a, b in zip(v[:-1], v[1:], strict=True)):
            raise ValueError(f"Z_sweep 必须严格递增且互不相同，当前 {list(v)}")
        return v

    @model_validator(mode="after")
    def _check_physics(self) -> RunConfig:
        # 复用 AtomSystem 的 κ、δ 校验
        AtomSystem.from_lambda(self.lam, self.Z, self.kappa, self.delta)
        if self.t_max <= self.t_min:
            raise ValueError(f"t_max 必须大于 t_min，当前 t_min={self.t_min}, t_max={self.t_max}")
        return self

    def system(self, Z: float | None = None) -> AtomSystem:
        return AtomSystem.from_lambda(self.lam, self.Z if Z is None else Z, self.kappa, self.delta)

    def tf_grid(self) -> dict[str, Any]:
        return {"t_min": self.t_min, "t_max": self.t_max, "n_nodes": self.n_nodes}

    def point_options(self) -> SweepPointOptions:
        return SweepPointOptions(
            lam=self.lam,
            kappa=self.kappa,
            delta=self.delta,
            R_tilde_factor=self.R_tilde_factor,
            K=self.K,
            momentum_decades=self.momentum_decades,
            points_per_decade=self.points_per_decade,
            tolerance=self.shooting_tolerance,
            tf_grid=tuple(self.tf_grid().items()),
        )

    def correction_settings(self) -> CorrectionSettings:
        return CorrectionSettings(
            multipole_order=self.multipole_order,
            angular_nodes=self.angular_nodes,
            p_points_per_decade=self.p_points_per_decade,
            multipole_tolerance=self.multipole_tolerance,
        )

    def bounds_options(self) -> BoundsOptions:
        return BoundsOptions(
            point=self.point_options(),
            settings=self.correction_settings(),
            cap_factor=self.potential_cap_factor,
            hole_points=self.hole_scan_points,
        )

    def echo(self) -> dict[str, Any]:
        """JSON-ready dump with the public field names."""
        return self.model_dump(mode="json", by_alias=True)


def read_config_file(path: str | Path) -> dict[str, Any]:
    """
    中文: 读取 JSON 配置文件，支持 @file 语法。
    English: Read a JSON object from a file path, accepting the @file form.

    Raises:
        ConfigLoadError: 文件不存在或不可读
        ValueError: 内容不是 JSON 对象
    """
    raw = str(path)
    fpath = Path(raw[1:] if raw.startswith("@") else raw)
    try:
        text = fpath.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigLoadError(f"无法读取配置文件 {fpath}: {e}", path=str(fpath)) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"配置文件 {fpath} 不是合法 JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValueError(f"配置文件 {fpath} 必须是 JSON 对象")
    return data


def load_config(path: str | Path | None = None, *overrides: dict[str, Any] | None) -> RunConfig:
    """
    中文: 依次合并配置文件与若干覆盖字典（后者优先，值为 None 的键忽略），再统一校验。
    English: Merge the config file with override mappings, later ones winning, then validate once.
    """
    data: dict[str, Any] = read_config_file(path) if path else {}
    for extra in overrides:
        for key, value in (extra or {}).items():
            if value is None:
                continue
            # lambda 与 lam 互为别名，覆盖时去掉旧键
            if key in ("lambda", "lam"):
                data.pop("lambda", None)
                data.pop("lam", None)
            data[key] = value
    return RunConfig.model_validate(data)
