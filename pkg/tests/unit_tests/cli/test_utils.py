from __future__ import annotations

import pytest

from brtf.cli.utils import parse_float_list, parse_kv_pairs


class TestParseKvPairs:
    def test_none_and_empty(self) -> None:
        assert parse_kv_pairs(None) is None
        assert parse_kv_pairs("") is None
        assert parse_kv_pairs("   ") is None

    def test_basic_key_value_parsing(self) -> None:
        assert parse_kv_pairs("K:8,seed:3") == {"K": "8", "seed": "3"}
        assert parse_kv_pairs(" K : 8 , seed : 3 ") == {"K": "8", "seed": "3"}
        # ignore empty segments
        assert parse_kv_pairs("K:8, ,seed:3,,") == {"K": "8", "seed": "3"}

    def test_error_missing_colon_and_empty_key(self) -> None:
        with pytest.raises(ValueError):
            parse_kv_pairs("a1,b2")
        with pytest.raises(ValueError):
            parse_kv_pairs(":v")

    def test_json_object_string(self) -> None:
        # JSON 对象保留取值类型，列表值可直接传入
        d = parse_kv_pairs('{"Z_sweep": [10, 100], "lambda": 0.8, "formats": ["json"]}')
        assert d == {"Z_sweep": [10, 100], "lambda": 0.8, "formats": ["json"]}

    def test_json_non_object_should_error(self) -> None:
        with pytest.raises(ValueError):
            parse_kv_pairs("[1,2,3]")
        with pytest.raises(ValueError):
            parse_kv_pairs('"str"')


class TestParseFloatList:
    def test_none_and_empty(self) -> None:
        assert parse_float_list(None) is None
        assert parse_float_list(" ") is None

    def test_comma_separated(self) -> None:
        assert parse_float_list("20,40, 80,") == (20.0, 40.0, 80.0)

    def test_json_array(self) -> None:
        assert parse_float_list("[10, 1e2, 1000]") == (10.0, 100.0, 1000.0)

    def test_invalid(self) -> None:
        with pytest.raises(ValueError):
            parse_float_list("20,forty")
