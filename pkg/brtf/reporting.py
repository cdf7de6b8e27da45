"""
文件名: reporting.py
作者: JQQ
创建日期: 2025/10/16
最后修改日期: 2025/10/17
版权: 2023 JQQ. All rights reserved.
依赖: pydantic, pandas, matplotlib
描述:
  中文: 输出层：带版本号的 JSON 模式、CSV 表、SVG 折线图与 manifest.json（配置回显、版本、种子、各文件 SHA-256）。
        所有输出不含时间戳，同一配置与种子可逐字节复现。
  English: Versioned JSON schemas, CSV tables, SVG plots and the run manifest; outputs carry no timestamps.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
from pydantic import BaseModel, ConfigDict, Field  # noqa: E402

from brtf import __version__  # noqa: E402
from brtf.utils.logger import get_logger  # noqa: E402

logger = get_logger(__name__)

SCHEMA_VERSION: str = "1"
FLOAT_FORMAT: str = "%.12e"


class OutputError(Exception):
    """输出目录不可写或写入失败 / Output directory not writable."""

    def __init__(self, *args: Any, path: str | None = None) -> None:
        super().__init__(*args)
        self.path = path


class IdentityRecord(BaseModel):
    """单条恒等式检查 / One identity check of the verification suite."""

    model_config = ConfigDict(frozen=True)

    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


class VerifyLedger(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: str = SCHEMA_VERSION
    seed: int
    records: list[IdentityRecord]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[IdentityRecord]:
        return [r for r in self.records if not r.passed]


class FitSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    slope: float | None
    intercept: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    claimed: float | None = None
    passed: bool | None = None


class SweepSummary(BaseModel):
    """
    中文: sweep 命令的 JSON 报告。records 为 EnergyReport 的序列化结果。
    English: JSON report of a sandwich sweep.
    """

    model_config = ConfigDict(frozen=True)

    schema_version: str = SCHEMA_VERSION
    lam: float = Field(serialization_alias="lambda")
    Z_sweep: list[float]
    records: list[dict[str, Any]]
    fits: list[FitSummary]
    inversions: dict[str, int]
    checks: dict[str, bool]
    upper_constant: float
    k_hole: float
    band_constant: float | None = None
    lower_is_surrogate: bool = True
    delta_scan: dict[str, Any] | None = None


class Manifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: str = SCHEMA_VERSION
    toolkit_version: str = __version__
    command: str
    config: dict[str, Any]
    seeds: dict[str, int]
    files: dict[str, str]


def ensure_output_dir(path: Path) -> Path:
    """
    Raises:
        OutputError: 无法创建或写入目录
    """
    try:
        path.mkdir(parents=True, exist_ok=True)
        marker = path / ".brtf-write-check"
        marker.write_text("", encoding="utf-8")
        marker.unlink()
    except OSError as e:
        raise OutputError(f"输出目录不可写: {path}: {e}", path=str(path)) from e
    return path


def _guard(path: Path) -> None:
    if not path.parent.is_dir():
        raise OutputError(f"输出目录不存在: {path.parent}", path=str(path))


def write_json(path: Path, payload: BaseModel | Mapping[str, Any]) -> Path:
    _guard(path)
    data = payload.model_dump(mode="json", by_alias=True) if isinstance(payload, BaseModel) else dict(payload)
    try:
        path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"写入 {path} 失败: {e}", path=str(path)) from e
    logger.debug("写入 JSON %s", path)
    return path


def write_csv(path: Path, rows: pd.DataFrame | Sequence[Mapping[str, Any]], header: str | None = None) -> Path:
    """
    中文: 以固定浮点格式写 CSV；header 非空时以 '# ' 注释行写在表头之前。
    English: Write a table with a fixed float format and an optional comment header.
    """
    _guard(path)
    df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            if header:
                for line in header.splitlines():
                    fh.write(f"# {line}\n")
            df.to_csv(fh, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise OutputError(f"写入 {path} 失败: {e}", path=str(path)) from e
    logger.debug("写入 CSV %s (%d 行)", path, len(df))
    return path


def write_svg_plot(
    path: Path,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    *,
    xlabel: str,
    ylabel: str,
    title: str = "",
    logx: bool = True,
    logy: bool = False,
) -> Path:
    """
    中文: 静态 SVG 折线图；固定 hashsalt 并去掉 Date 元数据以保证逐字节复现。
    English: Static SVG line chart, deterministic across runs.
    """
    _guard(path)
    with plt.rc_context({"svg.hashsalt": "brtf", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for label, ys in series.items():
            ax.plot(list(x), list(ys), marker="o", label=label)
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(True, ls=":", alpha=0.4)
        if len(series) > 1:
            ax.legend()
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise OutputError(f"写入 {path} 失败: {e}", path=str(path)) from e
        finally:
            plt.close(fig)
    logger.debug("写入 SVG %s", path)
    return path


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, config: Mapping[str, Any], seeds: Mapping[str, int], files: Iterable[Path]) -> Path:
    """manifest.json: config echo, toolkit version, seeds and the SHA-256 of every written file."""
    digests = {p.relative_to(out_dir).as_posix(): sha256_file(p) for p in sorted(files)}
    manifest = Manifest(command=command, config=dict(config), seeds=dict(seeds), files=digests)
    return write_json(out_dir / "manifest.json", manifest)
