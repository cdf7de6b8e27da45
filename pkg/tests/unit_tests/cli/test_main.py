# -*- coding: utf-8 -*-
# filename: test_main.py
# @Time    : 2025/10/17 17:10
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：CLI 内部函数的单元测试：异常到退出码的映射、容差覆盖与配置合并顺序。
English: Unit tests for CLI internals: exception to exit-code mapping, tolerance overrides and config merging.
"""

from __future__ import annotations

import dataclasses
import json
from collections.abc import Callable
from pathlib import Path

import pytest
import typer
from pytest_mock import MockerFixture

import brtf.cli.main as cli_main
from brtf.bounds import DeltaScan, EnergyReport, SandwichReport, SweepTooShortError
from brtf.config import ConfigLoadError, RunConfig
from brtf.exchange_hole import HoleUndefinedError
from brtf.rel_corrections import ExponentFit, QuadratureConvergenceError
from brtf.reporting import OutputError
from brtf.tf_solver import ShootingConvergenceError


def _raiser(exc: Exception) -> Callable[[], None]:
    def fn() -> None:
        raise exc

    return fn


class TestGuarded:
    def test_success_returns(self) -> None:
        cli_main._guarded(lambda: None)

    @pytest.mark.parametrize(
        ("exc", "code"),
        [
            (cli_main.AssertionFailure("x", failed=["unitarity"]), cli_main.EXIT_ASSERTION),
            (ShootingConvergenceError("no root"), cli_main.EXIT_ASSERTION),
            (QuadratureConvergenceError("tail", trace=[1.0, 0.5]), cli_main.EXIT_ASSERTION),
            (HoleUndefinedError("light"), cli_main.EXIT_ASSERTION),
            (SweepTooShortError("short", points=3), cli_main.EXIT_USAGE),
            (ValueError("bad"), cli_main.EXIT_USAGE),
            (ConfigLoadError("missing", path="x.json"), cli_main.EXIT_IO),
            (OutputError("readonly", path="out"), cli_main.EXIT_IO),
            (PermissionError("denied"), cli_main.EXIT_IO),
        ],
    )
    def test_exit_codes(self, exc: Exception, code: int) -> None:
        with pytest.raises(typer.Exit) as exc_info:
            cli_main._guarded(_raiser(exc))
        assert exc_info.value.exit_code == code

    def test_unexpected_errors_propagate(self) -> None:
        with pytest.raises(RuntimeError):
            cli_main._guarded(_raiser(RuntimeError("boom")))


class TestRecord:
    def test_default_tolerance(self) -> None:
        rec = cli_main._record("unitarity", 1e-14, RunConfig())
        assert rec.tolerance == cli_main.IDENTITY_TOLERANCES["unitarity"]
        assert rec.passed

    def test_override_tolerance(self) -> None:
        rec = cli_main._record("unitarity", 1e-14, RunConfig(identity_tolerance=1e-20))
        assert rec.tolerance == 1e-20
        assert not rec.passed

    def test_nan_never_passes(self) -> None:
        assert not cli_main._record("scaling", float("nan"), RunConfig()).passed


class TestBuildConfig:
    def test_flags_override_set_and_file(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"lambda": 0.9, "K": 3, "seed": 1}), encoding="utf-8")
        cfg = cli_main._build_config(str(path), "K:4,seed:2", seed=7, Z=None)
        assert cfg.lam == 0.9
        assert cfg.K == 4
        assert cfg.seed == 7

    def test_bad_set_string(self) -> None:
        with pytest.raises(ValueError):
            cli_main._build_config(None, "a1")


def _energy(Z: float, delta: float = 5.0 / 9.0, e_upper: float = -9.0) -> EnergyReport:
    return EnergyReport(
        Z=Z,
        N=Z,
        lam=1.0,
        kappa=0.5,
        delta=delta,
        e_tf=-10.0,
        e_upper=e_upper,
        e_lower=-12.0,
        upper_terms={},
        lower_terms={"hartree": -1.0, "hole": -1.0},
        corrections={},
        k_hole=1.0,
    )


class TestSweepWiring:
    @pytest.fixture
    def stubbed(self, mocker: MockerFixture) -> None:
        fit = ExponentFit(slope=2.0, intercept=0.0, residual=0.0, stderr=0.0, ci_low=2.0, ci_high=2.0, n=4)
        hartree = dataclasses.replace(fit, slope=7.0 / 3.0)
        report = SandwichReport(
            records=tuple(_energy(Z) for Z in (20.0, 40.0, 80.0, 160.0)),
            lam=1.0,
            upper_fit=fit,
            hartree_fit=hartree,
            hole_fit=fit,
            inversions={"sandwich_upper": 0, "sandwich_lower": 0},
        )
        deltas = (0.40, 0.50, 5.0 / 9.0, 0.60)
        scan = DeltaScan(
            Z=40.0,
            deltas=deltas,
            records=tuple(_energy(40.0, d, e) for d, e in zip(deltas, (-8.0, -9.0, -9.5, -9.2), strict=True)),
        )
        mocker.patch.object(cli_main, "sandwich_report", return_value=report)
        mocker.patch.object(cli_main, "delta_scan", return_value=scan)

    def test_delta_scan_outputs(self, stubbed: None, tmp_path: Path) -> None:
        cfg = RunConfig.model_validate({"Z": 40.0, "run_delta_scan": True, "formats": ["csv", "json"], "output_dir": str(tmp_path)})
        cli_main._sweep_impl(cfg)

        lines = (tmp_path / "delta_scan.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# Z=40, lambda=1, best_delta=0.555556"
        assert lines[1] == "delta,sandwich_upper,envelope"
        assert len(lines) == 6
        report = json.loads((tmp_path / "sweep_report.json").read_text(encoding="utf-8"))
        assert report["checks"]["delta_optimum"] is True
        assert report["delta_scan"]["best_delta"] == pytest.approx(5.0 / 9.0)
        cli_main.delta_scan.assert_called_once()

    def test_scan_off_by_default(self, stubbed: None, tmp_path: Path) -> None:
        cfg = RunConfig.model_validate({"formats": ["json"], "output_dir": str(tmp_path)})
        cli_main._sweep_impl(cfg)
        report = json.loads((tmp_path / "sweep_report.json").read_text(encoding="utf-8"))
        assert report["delta_scan"] is None
        assert "delta_optimum" not in report["checks"]
        assert not (tmp_path / "delta_scan.csv").exists()
        cli_main.delta_scan.assert_not_called()
