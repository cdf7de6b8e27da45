"""
文件名: main.py
作者: JQQ
创建日期: 2025/10/16
最后修改日期: 2025/10/18
版权: 2023 JQQ. All rights reserved.
依赖: typer, rich, pandas
描述:
  中文: brtf 命令行入口：tf、verify、sweep、hole、corrections 五个子命令。
        退出码：0 成功，1 断言或恒等式失败，2 用法或配置错误，3 I/O 错误。
  English: CLI entry with the tf, verify, sweep, hole and corrections subcommands.
    Exit codes: 0 success, 1 assertion failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import typer

from brtf.bounds import delta_scan, exponent_envelope, sandwich_report
from brtf.cli.utils import (
    parse_float_list,
    parse_kv_pairs,
    print_corrections,
    print_energy_reports,
    print_fits,
    print_hole_records,
    print_identity_ledger,
    print_tf_energy,
)
from brtf.coherent_states import build_trial_spec, kinetic_upper, positivity_sample, trace_gamma1, trace_gamma_total
from brtf.config import ConfigLoadError, RunConfig, load_config
from brtf.exchange_hole import HoleSweep, HoleSweepRecord, HoleUndefinedError, hole_point_args, hole_potential, hole_radius, mollify
from brtf.model import AtomSystem, dispersion_bounds, dispersion_values, reduction_identity_residual
from brtf.radial import UniformBall
from brtf.rel_corrections import (
    TERM_NAMES,
    ExponentFit,
    KernelInequalityError,
    QuadratureConvergenceError,
    claimed_exponents,
    correction_sweep,
    kernel_chain_violation,
)
from brtf.reporting import (
    FitSummary,
    IdentityRecord,
    OutputError,
    SweepSummary,
    VerifyLedger,
    ensure_output_dir,
    write_csv,
    write_json,
    write_manifest,
    write_svg_plot,
)
from brtf.tf_solver import GridRangeError, ShootingBracketError, ShootingConvergenceError, scaling_check, solve_atom, solve_universal
from brtf.utils import console as console_util
from brtf.utils.logger import get_logger, set_level
from brtf.utils.parallel import parallel_map

logger = get_logger(__name__)

app = typer.Typer(
    add_completion=False,
    help=(
        "Brown-Ravenhall / Thomas-Fermi 数值工具包 / numerical toolkit.\n\n"
        "CSV 列 / CSV columns: tf_density.csv: r, rho, V, V_minus_u; sweep_summary.csv: Z, lambda, e_tf, e_upper, e_lower, "
        "sandwich_upper, sandwich_lower, upper_constant, k_hole; corrections.csv: Z, lam, kappa, delta, c, R, "
        "phi2_term, phi1_deficit, hartree_lift, multipole_tail, kernel_violation; "
        "hole_summary.csv: Z, k_raw, k_mollified, argmax_raw, a2_max, boundary_flag; "
        "hole_scan_Z*.csv: x, R_raw, L_raw, R_mollified, L_mollified, A1, A2; delta_scan.csv: delta, sandwich_upper, envelope."
    ),
)
# 使用全局 Console（引用模块属性，便于后续动态切换）
console = console_util.console

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2
EXIT_IO = 3

NEUTRAL_SLOPE: float = -1.588071
UNIT_TF_ENERGY: float = -0.768745

# 各恒等式的默认容差；identity_tolerance 非空时统一覆盖
IDENTITY_TOLERANCES: dict[str, float] = {
    "unitarity": 1e-12,
    "reduction": 1e-12,
    "dispersion_bounds": 1e-12,
    "tf_neutral_slope": 1e-4,
    "tf_unit_energy": 1e-3,
    "tf_ionic_boundary": 1e-6,
    "scaling": 1e-6,
    "trace_gamma1": 1e-6,
    "trace_gamma_total": 1e-6,
    "kinetic_identity": 1e-6,
    "positivity": 1e-8,
    "positivity_parseval": 1e-10,
    "kernel_chain": 1e-10,
    "hole_uniform_ball": 1e-8,
    "mollifier_mass": 1e-6,
}


class AssertionFailure(Exception):
    """断言台账中存在失败项 / Some ledger checks failed."""

    def __init__(self, *args: Any, failed: list[str] | None = None) -> None:
        super().__init__(*args)
        self.failed = failed or []


@app.callback()
def _root(
    no_color: bool = typer.Option(
        False,
        "--no-color",
        help="关闭彩色输出（PyCharm控制台不渲染ANSI时可使用） / Disable ANSI colors",
    ),
    log_level: str | None = typer.Option(None, "--log-level", help="覆盖 BRTF_LOG_LEVEL / Override the log level"),
) -> None:
    """
    根级入口：仅处理全局选项，具体工作交给子命令。
    """
    if log_level:
        try:
            set_level(log_level)
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--log-level") from e
    if no_color:
        global console
        console_util.set_no_color(True)
        # 重新绑定本地引用
        console = console_util.console


def _guarded(fn: Callable[[], None]) -> None:
    """
    中文: 执行子命令实现并把异常映射为退出码。
    English: Run a command implementation and map failures to exit codes.
    """
    try:
        fn()
    except AssertionFailure as e:
        console_util.console.print(f"[red]检查失败 / Checks failed: {', '.join(e.failed)}[/red]")
        raise typer.Exit(EXIT_ASSERTION) from e
    except (ConfigLoadError, OutputError) as e:
        console_util.console.print(f"[red]I/O 错误 / I/O error: {e}[/red]")
        raise typer.Exit(EXIT_IO) from e
    except (
        ShootingBracketError,
        ShootingConvergenceError,
        GridRangeError,
        QuadratureConvergenceError,
        KernelInequalityError,
        HoleUndefinedError,
    ) as e:
        console_util.console.print(f"[red]求解失败 / Solver failure: {type(e).__name__}: {e}[/red]")
        raise typer.Exit(EXIT_ASSERTION) from e
    except ValueError as e:
        console_util.console.print(f"[red]参数错误 / Invalid parameters: {e}[/red]")
        raise typer.Exit(EXIT_USAGE) from e
    except OSError as e:
        console_util.console.print(f"[red]I/O 错误 / I/O error: {e}[/red]")
        raise typer.Exit(EXIT_IO) from e


def _build_config(config: str | None, set_: str | None, **flags: Any) -> RunConfig:
    """配置文件 < --set < 显式命令行参数 / file < --set pairs < explicit flags."""
    return load_config(config, parse_kv_pairs(set_), flags)


def _finish(cfg: RunConfig, command: str, out_dir: Path, files: list[Path]) -> None:
    manifest = write_manifest(out_dir, command, cfg.echo(), {"seed": cfg.seed}, files)
    logger.info("%s: 写入 %d 个文件到 %s", command, len(files), out_dir)
    console_util.console.print(f"[green]已写入 {len(files)} 个文件与 {manifest.name} / Outputs written to {out_dir}[/green]")


# ------------------------------
# tf
# ------------------------------


def _tf_impl(cfg: RunConfig) -> None:
    out_dir = ensure_output_dir(cfg.output_dir)
    atom = solve_atom(cfg.system(), cfg.shooting_tolerance, **cfg.tf_grid())
    print_tf_energy(atom)
    files: list[Path] = []
    if "csv" in cfg.formats:
        rows = {"r": atom.r, "rho": atom.rho, "V": atom.V, "V_minus_u": atom.effective_potential}
        header = "units: atomic (hartree); r [bohr], rho [bohr^-3], V and V_minus_u [hartree]"
        files.append(write_csv(out_dir / "tf_density.csv", _frame(rows), header=header))
    if "json" in cfg.formats:
        payload = {
            "schema_version": "1",
            "Z": atom.sys.Z,
            "N": atom.sys.N,
            "lambda": atom.sys.lam,
            "u_prime": atom.u_prime,
            "slope0": atom.universal.slope0,
            "t0": atom.universal.t0 if math.isfinite(atom.universal.t0) else None,
            "boundary_residual": atom.universal.boundary_residual,
            "electron_count": atom.electron_count,
            "energy": atom.energy.as_dict(),
        }
        files.append(write_json(out_dir / "energy.json", payload))
    if "svg" in cfg.formats:
        radial = 4.0 * math.pi * atom.r**2 * atom.rho
        files.append(write_svg_plot(out_dir / "tf_density.svg", atom.r, {"4πr²ρ": radial}, xlabel="r", ylabel="4πr²ρ(r)"))
    _finish(cfg, "tf", out_dir, files)


def _frame(columns: dict[str, Any]) -> pd.DataFrame:
    return pd.DataFrame({k: np.asarray(v) for k, v in columns.items()})


@app.command()
def tf(
    lam: float = typer.Option(..., "--lambda", help="λ = N/Z"),
    Z: float = typer.Option(..., "--Z", help="核电荷 / Nuclear charge"),
    kappa: float | None = typer.Option(None, "--kappa", help="κ = Z/c"),
    delta: float | None = typer.Option(None, "--delta", help="相干态尺度指数 / coherent-state exponent"),
    t_min: float | None = typer.Option(None, "--t-min"),
    t_max: float | None = typer.Option(None, "--t-max"),
    n_nodes: int | None = typer.Option(None, "--n-nodes"),
    config: str | None = typer.Option(None, "--config", "-c", help="JSON 配置文件（支持 @file 语法） / JSON config file"),
    set_: str | None = typer.Option(None, "--set", help="覆盖配置，形如 key:value,foo:bar 或 JSON 对象"),
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o"),
) -> None:
    """
    中文: 求解 TF 原子，写出密度/势 CSV 与能量 JSON。
    English: Solve the TF atom and write the density table and the energy record.
    """

    def run() -> None:
        cfg = _build_config(
            config,
            set_,
            **{"lambda": lam, "Z": Z, "kappa": kappa, "delta": delta, "t_min": t_min, "t_max": t_max, "n_nodes": n_nodes},
            output_dir=output_dir,
        )
        _tf_impl(cfg)

    _guarded(run)


# ------------------------------
# verify
# ------------------------------


def _record(name: str, value: float, cfg: RunConfig, detail: str = "") -> IdentityRecord:
    tol = cfg.identity_tolerance if cfg.identity_tolerance is not None else IDENTITY_TOLERANCES[name]
    value = float(value)
    return IdentityRecord(name=name, value=value, tolerance=tol, passed=bool(math.isfinite(value) and value <= tol), detail=detail)


def _identity_records(cfg: RunConfig) -> list[IdentityRecord]:
    """
    中文: 恒等式套件：色散幺正性与约化、TF 基准、标度律、迹、动能恒等式、正性抽样、核不等式链、空穴闭式解与磨光质量守恒。
    English: The identity suite run by ``verify``.
    """
    sys = cfg.system()
    grid = cfg.tf_grid()
    records: list[IdentityRecord] = []

    unitarity = reduction = bounds = 0.0
    for scale in (1.0, 10.0, 100.0):
        scaled = sys.replace(kappa=sys.kappa / scale)
        c = scaled.c
        p = np.geomspace(1e-4 * c, 1e4 * c, 512)
        v = dispersion_values(p, c)
        unitarity = max(unitarity, float(np.max(np.abs(v.phi1**2 + v.phi2**2 - 1.0))))
        reduction = max(reduction, float(np.max(reduction_identity_residual(p, scaled) / v.Ec)))
        bounds = max(bounds, max(dispersion_bounds(p, scaled).values()) / c**2)
    records.append(_record("unitarity", unitarity, cfg, "max |φ1² + φ2² − 1|"))
    records.append(_record("reduction", reduction, cfg, "max residual / E_c"))
    records.append(_record("dispersion_bounds", bounds, cfg, "max violation / c²"))

    neutral = solve_universal(1.0, cfg.shooting_tolerance, **grid)
    records.append(_record("tf_neutral_slope", abs(neutral.slope0 - NEUTRAL_SLOPE), cfg, f"slope0 = {neutral.slope0:.8f}"))
    unit = solve_atom(AtomSystem.from_lambda(1.0, 1.0, sys.kappa, sys.delta), cfg.shooting_tolerance, **grid)
    records.append(_record("tf_unit_energy", abs(unit.energy.total - UNIT_TF_ENERGY), cfg, f"E_TF(1,1) = {unit.energy.total:.8f}"))
    if cfg.lam < 1.0:
        ionic = solve_universal(cfg.lam, cfg.shooting_tolerance, **grid)
        records.append(_record("tf_ionic_boundary", ionic.boundary_residual, cfg))
    records.append(_record("scaling", scaling_check(cfg.lam, 1.0, 100.0, kappa=sys.kappa, delta=sys.delta, **grid), cfg))

    atom = solve_atom(sys, cfg.shooting_tolerance, **grid)
    spec = build_trial_spec(
        atom,
        R_tilde_factor=cfg.R_tilde_factor,
        K=cfg.K,
        decades=cfg.momentum_decades,
        points_per_decade=cfg.points_per_decade,
    )
    expected = min(sys.N, sys.Z)
    records.append(_record("trace_gamma1", abs(trace_gamma1(spec) - expected) / expected, cfg))
    if sys.N > sys.Z:
        records.append(_record("trace_gamma_total", abs(trace_gamma_total(spec) - sys.N) / sys.N, cfg))
    kinetic = kinetic_upper(spec).phase_space
    records.append(_record("kinetic_identity", abs(kinetic - atom.energy.kinetic) / atom.energy.kinetic, cfg))

    positivity = positivity_sample(spec, cfg.trial_count, cfg.seed, q_samples=cfg.q_samples, box_points=cfg.box_points)
    excess = max(-positivity.minimum, positivity.maximum - 1.0, 0.0)
    records.append(_record("positivity", excess, cfg, f"range [{positivity.minimum:.6f}, {positivity.maximum:.6f}]"))
    records.append(_record("positivity_parseval", positivity.parseval_residual, cfg, "max |∫dp|⟨F,u⟩|² − ∫dx|g u|²| / ∫dx|g u|²"))

    xi = np.geomspace(1e-3 * sys.c, 1e3 * sys.c, 64)
    violation, pair = kernel_chain_violation(xi, sys.c)
    records.append(_record("kernel_chain", max(violation, 0.0), cfg, f"worst pair {pair}"))

    ball = UniformBall()
    r_err = abs(hole_radius(ball, 0.0) - 2.0 ** (-1.0 / 3.0))
    l_err = abs(hole_potential(ball, 0.0) - 1.5 * 2.0 ** (-2.0 / 3.0))
    records.append(_record("hole_uniform_ball", max(r_err, l_err), cfg))

    smooth = mollify(atom.profile, sys.R)
    records.append(_record("mollifier_mass", abs(smooth.total_mass - atom.profile.total_mass) / atom.profile.total_mass, cfg))
    return records


def _verify_impl(cfg: RunConfig) -> None:
    out_dir = ensure_output_dir(cfg.output_dir)
    ledger = VerifyLedger(seed=cfg.seed, records=_identity_records(cfg))
    print_identity_ledger(ledger.records)
    files = [write_json(out_dir / "verify_ledger.json", ledger)]
    if "csv" in cfg.formats:
        files.append(write_csv(out_dir / "verify_ledger.csv", [r.model_dump() for r in ledger.records]))
    _finish(cfg, "verify", out_dir, files)
    if not ledger.passed:
        for r in ledger.failures:
            console_util.console.print(f"[red]{r.name}: value={r.value:.3e} > tolerance={r.tolerance:.1e} {r.detail}[/red]")
        raise AssertionFailure("恒等式检查失败", failed=[r.name for r in ledger.failures])


@app.command()
def verify(
    lam: float | None = typer.Option(None, "--lambda", help="λ = N/Z"),
    Z: float | None = typer.Option(None, "--Z"),
    kappa: float | None = typer.Option(None, "--kappa"),
    delta: float | None = typer.Option(None, "--delta"),
    seed: int | None = typer.Option(None, "--seed", help="正性抽样随机种子 / positivity sampling seed"),
    trial_count: int | None = typer.Option(None, "--trial-count"),
    identity_tolerance: float | None = typer.Option(None, "--identity-tolerance", help="覆盖所有恒等式的容差"),
    config: str | None = typer.Option(None, "--config", "-c", help="JSON 配置文件（支持 @file 语法） / JSON config file"),
    set_: str | None = typer.Option(None, "--set", help="覆盖配置，形如 key:value,foo:bar 或 JSON 对象"),
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o"),
) -> None:
    """
    中文: 运行恒等式套件并写出通过/失败台账；任一恒等式超差时退出码为 1。
    English: Run the identity suite; exit code 1 names the failing identities.
    """

    def run() -> None:
        cfg = _build_config(
            config,
            set_,
            **{"lambda": lam},
            Z=Z,
            kappa=kappa,
            delta=delta,
            seed=seed,
            trial_count=trial_count,
            identity_tolerance=identity_tolerance,
            output_dir=output_dir,
        )
        _verify_impl(cfg)

    _guarded(run)


# ------------------------------
# sweep
# ------------------------------


def _sweep_impl(cfg: RunConfig) -> None:
    out_dir = ensure_output_dir(cfg.output_dir)
    report = sandwich_report(cfg.lam, cfg.Z_sweep, cfg.kappa, cfg.delta, cfg.bounds_options(), workers=cfg.workers)
    print_energy_reports(report.records)
    fits = {"remainder_upper": report.upper_fit, "hartree": report.hartree_fit, "hole": report.hole_fit}
    print_fits(fits, {"remainder_upper": 20.0 / 9.0, "hartree": 7.0 / 3.0, "hole": 2.0})
    checks = report.checks
    scan = None
    if cfg.run_delta_scan:
        scan = delta_scan(cfg.Z, cfg.lam, cfg.kappa, cfg.delta_grid, cfg.bounds_options(), workers=cfg.workers)
        print_energy_reports(scan.records)
        checks = {**checks, "delta_optimum": scan.optimum_in_cell}
    files: list[Path] = []
    if scan is not None and "csv" in cfg.formats:
        scan_rows = [
            {"delta": d, "sandwich_upper": r.sandwich_upper, "envelope": float(exponent_envelope(d))}
            for d, r in zip(scan.deltas, scan.records, strict=True)
        ]
        header = f"Z={scan.Z:g}, lambda={cfg.lam:g}, best_delta={scan.best_delta:.6f}"
        files.append(write_csv(out_dir / "delta_scan.csv", scan_rows, header=header))
    if "csv" in cfg.formats:
        rows = [
            {
                "Z": r.Z,
                "lambda": r.lam,
                "e_tf": r.e_tf,
                "e_upper": r.e_upper,
                "e_lower": r.e_lower,
                "sandwich_upper": r.sandwich_upper,
                "sandwich_lower": r.sandwich_lower,
                "upper_constant": r.upper_constant,
                "k_hole": r.k_hole,
            }
            for r in report.records
        ]
        files.append(write_csv(out_dir / "sweep_summary.csv", rows))
    if "json" in cfg.formats:
        claims = {"remainder_upper": 20.0 / 9.0, "hartree": 7.0 / 3.0, "hole": 2.0}
        check_of = {"remainder_upper": "upper_exponent", "hartree": "hartree_exponent", "hole": "hole_exponent"}
        summary = SweepSummary(
            lam=cfg.lam,
            Z_sweep=list(cfg.Z_sweep),
            records=[r.model_dump(mode="json") for r in report.records],
            fits=[_fit_summary(name, fit, claims[name], checks[check_of[name]]) for name, fit in fits.items()],
            inversions=report.inversions,
            checks=checks,
            upper_constant=report.upper_constant,
            band_constant=report.band_constant,
            k_hole=max(r.k_hole for r in report.records),
            delta_scan=None
            if scan is None
            else {"Z": scan.Z, "deltas": list(scan.deltas), "remainders": list(scan.remainders), "best_delta": scan.best_delta},
        )
        files.append(write_json(out_dir / "sweep_report.json", summary))
    if "svg" in cfg.formats:
        zs = [r.Z for r in report.records]
        files.append(
            write_svg_plot(
                out_dir / "sandwich.svg",
                zs,
                {
                    "(e_upper − e_tf)/Z^7/3": [r.sandwich_upper for r in report.records],
                    "(e_tf − e_lower)/Z^7/3": [r.sandwich_lower for r in report.records],
                },
                xlabel="Z",
                ylabel="remainder / Z^7/3",
            )
        )
        scaled = {name: [r.corrections[name] / r.Z ** (7.0 / 3.0) for r in report.records] for name in TERM_NAMES}
        files.append(write_svg_plot(out_dir / "corrections.svg", zs, scaled, xlabel="Z", ylabel="term / Z^7/3", logy=True))
    _finish(cfg, "sweep", out_dir, files)
    if not all(checks.values()):
        raise AssertionFailure("夹逼检查失败", failed=[k for k, ok in checks.items() if not ok])


def _fit_summary(name: str, fit: ExponentFit | None, claim: float | None, passed: bool | None) -> FitSummary:
    if fit is None:
        return FitSummary(name=name, slope=None, claimed=claim, passed=passed)
    return FitSummary(
        name=name,
        slope=fit.slope,
        intercept=fit.intercept,
        ci_low=fit.ci_low,
        ci_high=fit.ci_high,
        claimed=claim,
        passed=passed,
    )


@app.command()
def sweep(
    lam: float | None = typer.Option(None, "--lambda", help="λ = N/Z"),
    kappa: float | None = typer.Option(None, "--kappa"),
    delta: float | None = typer.Option(None, "--delta"),
    Z_sweep: str | None = typer.Option(None, "--Z-sweep", help="Z 序列，如 20,40,80,160,320（至少 4 点且跨一个数量级）"),
    run_delta_scan: bool | None = typer.Option(
        None,
        "--delta-scan/--no-delta-scan",
        help="在 --Z 处追加 δ 网格扫描 / also scan delta_grid at fixed Z",
    ),
    Z: float | None = typer.Option(None, "--Z", help="δ 扫描使用的核电荷 / charge for the delta scan"),
    workers: int | None = typer.Option(None, "--workers", help="并行进程数 / parallel workers"),
    config: str | None = typer.Option(None, "--config", "-c", help="JSON 配置文件（支持 @file 语法） / JSON config file"),
    set_: str | None = typer.Option(None, "--set", help="覆盖配置，形如 key:value,foo:bar 或 JSON 对象"),
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o"),
) -> None:
    """
    中文: Z 扫描上的能量夹逼：CSV 汇总、JSON 拟合报告与 SVG 图。少于 4 个点时退出码为 2。
    English: Sandwich sweep with CSV summary, JSON fit report and SVG plots.
    """

    def run() -> None:
        cfg = _build_config(
            config,
            set_,
            **{"lambda": lam},
            kappa=kappa,
            delta=delta,
            Z_sweep=parse_float_list(Z_sweep),
            run_delta_scan=run_delta_scan,
            Z=Z,
            workers=workers,
            output_dir=output_dir,
        )
        _sweep_impl(cfg)

    _guarded(run)


# ------------------------------
# hole
# ------------------------------


def _hole_impl(cfg: RunConfig) -> None:
    if not cfg.Z_sweep:
        raise ValueError("Z_sweep 不能为空")
    out_dir = ensure_output_dir(cfg.output_dir)
    args = [(Z, cfg.lam, cfg.kappa, cfg.delta, cfg.hole_scan_points, cfg.tf_grid()) for Z in cfg.Z_sweep]
    fields = parallel_map(hole_point_args, args, cfg.workers)
    sweep_result = HoleSweep(records=tuple(HoleSweepRecord.from_fields(raw, smooth) for raw, smooth in fields))
    print_hole_records(sweep_result.records)
    files: list[Path] = []
    if "csv" in cfg.formats:
        for raw, smooth in fields:
            columns = {
                "x": raw.x,
                "R_raw": raw.radius,
                "L_raw": raw.potential,
                "R_mollified": smooth.radius,
                "L_mollified": smooth.potential,
                "A1": raw.A1,
                "A2": raw.A2,
            }
            files.append(write_csv(out_dir / f"hole_scan_Z{raw.Z:g}.csv", _frame(columns), header=f"Z={raw.Z:g}, lambda={cfg.lam:g}"))
        rows = [
            {
                "Z": r.Z,
                "k_raw": r.k_raw,
                "k_mollified": r.k_mollified,
                "argmax_raw": r.argmax_raw,
                "a2_max": r.a2_max,
                "boundary_flag": r.boundary_flag,
            }
            for r in sweep_result.records
        ]
        files.append(write_csv(out_dir / "hole_summary.csv", rows))
    a2_ok = all(raw.a2_bound_holds and smooth.a2_bound_holds for raw, smooth in fields)
    if "json" in cfg.formats:
        payload = {
            "schema_version": "1",
            "lambda": cfg.lam,
            "k_hole": sweep_result.k_hole,
            "spread": sweep_result.spread,
            "a2_bound_holds": a2_ok,
            "boundary_flags": [r.boundary_flag for r in sweep_result.records],
        }
        files.append(write_json(out_dir / "hole_report.json", payload))
    if "svg" in cfg.formats:
        zs = [r.Z for r in sweep_result.records]
        series = {"sup L/Z": [r.k_raw for r in sweep_result.records], "sup L_δ/Z": [r.k_mollified for r in sweep_result.records]}
        files.append(write_svg_plot(out_dir / "hole_constant.svg", zs, series, xlabel="Z", ylabel="sup L / Z"))
    _finish(cfg, "hole", out_dir, files)
    if not a2_ok:
        raise AssertionFailure("A₂ ≤ Z/2 不成立", failed=["a2_bound"])


@app.command()
def hole(
    lam: float | None = typer.Option(None, "--lambda", help="λ = N/Z"),
    kappa: float | None = typer.Option(None, "--kappa"),
    delta: float | None = typer.Option(None, "--delta"),
    Z_sweep: str | None = typer.Option(None, "--Z-sweep", help="Z 序列，如 10,100,1000"),
    points: int | None = typer.Option(None, "--points", help="扫描网格点数 / scan grid points"),
    workers: int | None = typer.Option(None, "--workers"),
    config: str | None = typer.Option(None, "--config", "-c", help="JSON 配置文件（支持 @file 语法） / JSON config file"),
    set_: str | None = typer.Option(None, "--set", help="覆盖配置，形如 key:value,foo:bar 或 JSON 对象"),
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o"),
) -> None:
    """
    中文: 交换空穴的 sup 范数扫描（原始与磨光密度），写出每个 Z 的 (x, R, L) 表与测得常数。
    English: Exchange-hole sup-norm scans with per-Z tables and the measured constant.
    """

    def run() -> None:
        cfg = _build_config(
            config,
            set_,
            **{"lambda": lam},
            kappa=kappa,
            delta=delta,
            Z_sweep=parse_float_list(Z_sweep),
            hole_scan_points=points,
            workers=workers,
            output_dir=output_dir,
        )
        _hole_impl(cfg)

    _guarded(run)


# ------------------------------
# corrections
# ------------------------------


def _corrections_impl(cfg: RunConfig) -> None:
    out_dir = ensure_output_dir(cfg.output_dir)
    result = correction_sweep(cfg.Z_sweep, cfg.point_options(), cfg.correction_settings(), workers=cfg.workers)
    claims = claimed_exponents(cfg.delta)
    print_corrections(result.records)
    print_fits(result.fits, claims)
    checks = {f"{name}_exponent": ok for name, ok in result.check_claims().items()}
    for name in TERM_NAMES:
        scaled = [r.scaled()[name] for r in result.records]
        checks[f"{name}_scaled_decreasing"] = all(b < a for a, b in zip(scaled[:-1], scaled[1:], strict=True))
    files: list[Path] = []
    if "csv" in cfg.formats:
        files.append(write_csv(out_dir / "corrections.csv", [r.as_dict() for r in result.records]))
    if "json" in cfg.formats:
        payload = {
            "schema_version": "1",
            "delta": cfg.delta,
            "fits": {name: fit.as_dict() for name, fit in result.fits.items()},
            "claims": claims,
            "checks": checks,
        }
        files.append(write_json(out_dir / "corrections_fit.json", payload))
    if "svg" in cfg.formats:
        zs = [r.Z for r in result.records]
        series = {name: [r.scaled()[name] for r in result.records] for name in TERM_NAMES}
        files.append(write_svg_plot(out_dir / "corrections.svg", zs, series, xlabel="Z", ylabel="term / Z^7/3", logy=True))
    _finish(cfg, "corrections", out_dir, files)
    if not all(checks.values()):
        raise AssertionFailure("修正项检查失败", failed=[k for k, ok in checks.items() if not ok])


@app.command()
def corrections(
    lam: float | None = typer.Option(None, "--lambda", help="λ = N/Z"),
    kappa: float | None = typer.Option(None, "--kappa"),
    delta: float | None = typer.Option(None, "--delta"),
    Z_sweep: str | None = typer.Option(None, "--Z-sweep", help="Z 序列，如 20,40,80,160,320"),
    workers: int | None = typer.Option(None, "--workers"),
    config: str | None = typer.Option(None, "--config", "-c", help="JSON 配置文件（支持 @file 语法） / JSON config file"),
    set_: str | None = typer.Option(None, "--set", help="覆盖配置，形如 key:value,foo:bar 或 JSON 对象"),
    output_dir: Path | None = typer.Option(None, "--output-dir", "-o"),
) -> None:
    """
    中文: 三个相对论修正项的 Z 扫描与指数拟合。
    English: Relativistic correction terms over a Z sweep with exponent fits.
    """

    def run() -> None:
        cfg = _build_config(
            config,
            set_,
            **{"lambda": lam},
            kappa=kappa,
            delta=delta,
            Z_sweep=parse_float_list(Z_sweep),
            workers=workers,
            output_dir=output_dir,
        )
        _corrections_impl(cfg)

    _guarded(run)


# 为 console_scripts 兼容提供入口
def main() -> None:  # pragma: no cover
    # 使用 Typer 应用入口，而不是直接调用命令函数
    app()
