"""
文件名: utils.py
作者: JQQ
创建日期: 2025/10/16
最后修改日期: 2025/10/17
版权: 2023 JQQ. All rights reserved.
依赖: rich
描述:
  中文: CLI 层通用工具：键值解析、浮点列表解析与表格打印，统一 Console 管理。
  English: Common CLI utilities: key-value and float-list parsing and table printers with unified Console management.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from typing import Any

from rich.table import Table

from brtf.bounds import EnergyReport
from brtf.exchange_hole import HoleSweepRecord
from brtf.rel_corrections import CorrectionTerms, ExponentFit
from brtf.reporting import IdentityRecord
from brtf.tf_solver import TFAtom
from brtf.utils import console as console_util


def parse_kv_pairs(text: str | None) -> dict[str, Any] | None:
    """
    中文: 将形如 "k1:v1,k2:v2" 的字符串解析为 dict；容错处理空格。也接受 JSON 对象字符串。
    English: Parse a string like "k1:v1,k2:v2" into a dict; tolerant to spaces. JSON objects are accepted as well.

    Args:
        text: 原始输入字符串；None 或空字符串时返回 None。

    Returns:
        dict 或 None / dict or None
    """
    if text is None:
        return None
    s = text.strip()
    if s == "":
        return None
    # 优先尝试 JSON 反序列化：支持直接传入合法的 JSON 对象字符串（例如列表值 Z_sweep）
    try:
        parsed = json.loads(s)
    except Exception:
        pass
    else:
        if isinstance(parsed, dict):
            return parsed
        raise ValueError('JSON 字符串必须是对象类型（例如 {"k":"v"}）')
    result: dict[str, Any] = {}
    for seg in s.split(","):
        seg = seg.strip()
        if seg == "":
            continue
        if ":" not in seg:
            raise ValueError(f"无效的键值对: {seg}，应为 key:value 形式")
        k, v = seg.split(":", 1)
        k = k.strip()
        v = v.strip()
        if not k:
            raise ValueError(f"无效的键名: '{seg}'")
        result[k] = v
    return result if result else None


def parse_float_list(text: str | None) -> tuple[float, ...] | None:
    """
    中文: 解析 "20,40,80" 或 JSON 数组为浮点元组；None 或空字符串返回 None。
    English: Parse a comma separated or JSON list of numbers.
    """
    if text is None or text.strip() == "":
        return None
    s = text.strip()
    if s.startswith("["):
        data = json.loads(s)
        if not isinstance(data, list):
            raise ValueError("JSON 字符串必须是数组类型")
        return tuple(float(v) for v in data)
    try:
        return tuple(float(seg) for seg in s.split(",") if seg.strip())
    except ValueError as e:
        raise ValueError(f"无效的数值列表: {text!r}") from e


def print_tf_energy(atom: TFAtom) -> None:
    """
    中文: 打印 TF 能量分解。
    English: Print the TF energy ledger.
    """
    table = Table(title=f"TF 能量 / TF energy (Z={atom.sys.Z:g}, λ={atom.sys.lam:g})")
    table.add_column("Term")
    table.add_column("Value", justify="right")
    for name, value in atom.energy.as_dict().items():
        table.add_row(name, f"{value:.10g}")
    table.add_row("u_prime", f"{atom.u_prime:.10g}")
    table.add_row("slope0", f"{atom.universal.slope0:.10g}")
    console_util.console.print(table)


def print_identity_ledger(records: Iterable[IdentityRecord]) -> None:
    table = Table(title="恒等式检查 / Identity ledger")
    table.add_column("Identity")
    table.add_column("Value", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Pass")
    for r in records:
        table.add_row(r.name, f"{r.value:.3e}", f"{r.tolerance:.1e}", "[green]Yes[/green]" if r.passed else "[red]No[/red]")
    console_util.console.print(table)


def print_energy_reports(records: Sequence[EnergyReport]) -> None:
    """
    中文: 打印夹逼台账。
    English: Print the sandwich ledger.
    """
    table = Table(title="能量夹逼 / Energy sandwich")
    for col in ("Z", "λ", "e_tf", "e_upper", "e_lower", "(up−tf)/Z^7/3", "(tf−low)/Z^7/3"):
        table.add_column(col, justify="right")
    for r in records:
        table.add_row(
            f"{r.Z:g}",
            f"{r.lam:g}",
            f"{r.e_tf:.6e}",
            f"{r.e_upper:.6e}",
            f"{r.e_lower:.6e}",
            f"{r.sandwich_upper:.4e}",
            f"{r.sandwich_lower:.4e}",
        )
    console_util.console.print(table)


def print_fits(fits: Mapping[str, ExponentFit | None], claims: Mapping[str, float] | None = None) -> None:
    table = Table(title="指数拟合 / Exponent fits")
    table.add_column("Term")
    table.add_column("Slope", justify="right")
    table.add_column("CI", justify="right")
    table.add_column("Claim", justify="right")
    for name, fit in fits.items():
        claim = f"{claims[name]:.4f}" if claims and name in claims else "-"
        if fit is None:
            table.add_row(name, "-", "-", claim)
            continue
        table.add_row(name, f"{fit.slope:.4f}", f"[{fit.ci_low:.3f}, {fit.ci_high:.3f}]", claim)
    console_util.console.print(table)


def print_corrections(records: Sequence[CorrectionTerms]) -> None:
    table = Table(title="相对论修正 / Relativistic corrections")
    for col in ("Z", "φ₂ term", "φ₁ deficit", "Hartree lift", "tail"):
        table.add_column(col, justify="right")
    for r in records:
        table.add_row(f"{r.Z:g}", f"{r.phi2_term:.4e}", f"{r.phi1_deficit:.4e}", f"{r.hartree_lift:.4e}", f"{r.multipole_tail:.1e}")
    console_util.console.print(table)


def print_hole_records(records: Sequence[HoleSweepRecord]) -> None:
    table = Table(title="交换空穴 / Exchange hole")
    for col in ("Z", "sup L/Z", "sup L_δ/Z", "argmax", "max A₂", "Boundary"):
        table.add_column(col, justify="right")
    for r in records:
        table.add_row(
            f"{r.Z:g}",
            f"{r.k_raw:.5f}",
            f"{r.k_mollified:.5f}",
            f"{r.argmax_raw:.3e}",
            f"{r.a2_max:.4e}",
            "[yellow]Yes[/yellow]" if r.boundary_flag else "No",
        )
    console_util.console.print(table)
