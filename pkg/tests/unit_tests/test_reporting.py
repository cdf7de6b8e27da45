# -*- coding: utf-8 -*-
# filename: test_reporting.py
# @Time    : 2025/10/17 16:05
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
"""
中文：输出层测试：JSON 排序与换行、CSV 注释头与浮点格式、SVG 可复现性、manifest 摘要与目录错误。
English: Tests for the output layer.
"""

import hashlib
import json
from pathlib import Path

import pandas as pd
import pytest

from brtf import __version__
from brtf.reporting import (
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


class TestJson:
    def test_sorted_with_trailing_newline(self, tmp_path: Path) -> None:
        path = write_json(tmp_path / "a.json", {"b": 1, "a": [1.5, 2]})
        text = path.read_text(encoding="utf-8")
        assert text.endswith("}\n")
        assert text.index('"a"') < text.index('"b"')

    def test_model_uses_aliases(self, tmp_path: Path) -> None:
        summary = SweepSummary(
            lam=0.8,
            Z_sweep=[10.0, 100.0],
            records=[],
            fits=[],
            inversions={},
            checks={},
            upper_constant=1.0,
            k_hole=1.5,
        )
        data = json.loads(write_json(tmp_path / "s.json", summary).read_text(encoding="utf-8"))
        assert data["lambda"] == 0.8
        assert data["schema_version"] == "1"
        assert data["lower_is_surrogate"] is True

    def test_missing_directory(self, tmp_path: Path) -> None:
        with pytest.raises(OutputError):
            write_json(tmp_path / "missing" / "a.json", {})


class TestCsv:
    def test_header_and_float_format(self, tmp_path: Path) -> None:
        path = write_csv(tmp_path / "t.csv", [{"r": 0.5, "rho": 2.0}], header="units: atomic\nZ=10")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# units: atomic"
        assert lines[1] == "# Z=10"
        assert lines[2] == "r,rho"
        assert lines[3] == "5.000000000000e-01,2.000000000000e+00"

    def test_dataframe_input(self, tmp_path: Path) -> None:
        df = pd.DataFrame({"Z": [10.0, 20.0], "flag": [True, False]})
        path = write_csv(tmp_path / "d.csv", df)
        assert path.read_text(encoding="utf-8").splitlines()[0] == "Z,flag"
        assert len(pd.read_csv(path)) == 2


class TestSvg:
    def test_deterministic(self, tmp_path: Path) -> None:
        kwargs = {"xlabel": "Z", "ylabel": "k", "title": "sweep"}
        series = {"upper": [1.0, 0.5, 0.25], "lower": [2.0, 1.0, 0.5]}
        a = write_svg_plot(tmp_path / "a.svg", [10.0, 20.0, 40.0], series, **kwargs)
        b = write_svg_plot(tmp_path / "b.svg", [10.0, 20.0, 40.0], series, **kwargs)
        assert a.read_bytes() == b.read_bytes()
        assert b"<svg" in a.read_bytes()


class TestManifest:
    def test_digests(self, tmp_path: Path) -> None:
        f = write_json(tmp_path / "energy.json", {"e": 1.0})
        path = write_manifest(tmp_path, "tf", {"lambda": 1.0}, {"seed": 0}, [f])
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["command"] == "tf"
        assert data["toolkit_version"] == __version__
        assert data["files"] == {"energy.json": hashlib.sha256(f.read_bytes()).hexdigest()}
        assert data["seeds"] == {"seed": 0}


class TestOutputDir:
    def test_creates_nested(self, tmp_path: Path) -> None:
        out = ensure_output_dir(tmp_path / "x" / "y")
        assert out.is_dir()
        assert list(out.iterdir()) == []

    def test_file_in_the_way(self, tmp_path: Path) -> None:
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        with pytest.raises(OutputError) as exc_info:
            ensure_output_dir(blocker)
        assert exc_info.value.path == str(blocker)


class TestLedger:
    def test_failures(self) -> None:
        ok = IdentityRecord(name="unitarity", value=1e-15, tolerance=1e-12, passed=True)
        bad = IdentityRecord(name="scaling", value=1e-3, tolerance=1e-6, passed=False, detail="λ=1")
        ledger = VerifyLedger(seed=0, records=[ok, bad])
        assert not ledger.passed
        assert ledger.failures == [bad]
        assert VerifyLedger(seed=0, records=[ok]).passed
