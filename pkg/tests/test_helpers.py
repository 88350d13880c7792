from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis.strategies import floats

from heat_content.errors import DomainError
from utils import helpers
from utils.helpers import (DEFAULT_THREADS, format_number, load_run_config, load_validation_rules,
                           parse_complex, parse_real_or_complex, read_config_file, resolve_threads, resolve_tol)


@pytest.fixture
def clean_env(monkeypatch):
    for name in ("HEATCONTENT_THREADS", "HEATCONTENT_TOL", "HEATCONTENT_OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


class TestParseComplex:
    @pytest.mark.parametrize(("text", "expected"),
                             [("0.3", 0.3), ("0.3+0.1i", 0.3 + 0.1j), ("-1-2i", -1 - 2j), (" 2.5 ", 2.5),
                              ("1e-3", 1e-3)])
    def test_values(self, text: str, expected: complex) -> None:
        assert parse_complex(text) == expected

    @pytest.mark.parametrize("text", ["", "abc", "0.3+i0.1"])
    def test_invalid(self, text: str) -> None:
        with pytest.raises(DomainError):
            parse_complex(text)

    def test_real_collapses(self) -> None:
        assert isinstance(parse_real_or_complex("0.25"), float)
        assert isinstance(parse_real_or_complex("0.25+1i"), complex)


class TestFormatNumber:
    @given(x=floats(allow_nan=False, allow_infinity=False))
    def test_float_exact(self, *, x: float) -> None:
        assert float(format_number(x)) == x

    def test_complex(self) -> None:
        assert format_number(0.5 - 0.25j) == "0.5-0.25i"
        assert format_number(complex(0.5, 0.0)) == "0.5"
        assert parse_complex(format_number(0.1 + 0.2j)) == 0.1 + 0.2j


class TestEnvironment:
    def test_threads_default(self, clean_env) -> None:
        assert resolve_threads() == DEFAULT_THREADS

    def test_threads_env(self, clean_env) -> None:
        clean_env.setenv("HEATCONTENT_THREADS", "7")
        assert resolve_threads() == 7
        assert resolve_threads(2) == 2

    @pytest.mark.parametrize("raw", ["zero", "0"])
    def test_threads_invalid(self, clean_env, raw: str) -> None:
        clean_env.setenv("HEATCONTENT_THREADS", raw)
        with pytest.raises(DomainError):
            resolve_threads()

    def test_tol(self, clean_env) -> None:
        assert resolve_tol() is None
        clean_env.setenv("HEATCONTENT_TOL", "1e-9")
        assert resolve_tol() == 1e-9
        assert resolve_tol(1e-6) == 1e-6

    def test_output_dir(self, clean_env, tmp_path) -> None:
        assert helpers.output_dir() == "output"
        clean_env.setenv("HEATCONTENT_OUTPUT_DIR", str(tmp_path))
        assert helpers.output_dir() == str(tmp_path)


class TestRunConfig:
    def test_defaults(self, clean_env) -> None:
        config = load_run_config()
        assert config.points == 6
        assert config.threads == DEFAULT_THREADS

    def test_precedence(self, clean_env, tmp_path) -> None:
        clean_env.setenv("HEATCONTENT_TOL", "1e-9")
        path = tmp_path / "run.cfg"
        path.write_text("points=8\nt-min=1e-6\nformat=json\ntol=1e-10\n")
        config = load_run_config(str(path), {"points": 5, "N": None})
        assert config.points == 5
        assert config.t_min == 1e-6
        assert config.output_format == "json"
        assert config.tol == 1e-10
        assert config.N == 3

    def test_env_below_file(self, clean_env, tmp_path) -> None:
        clean_env.setenv("HEATCONTENT_THREADS", "3")
        assert load_run_config().threads == 3
        path = tmp_path / "run.cfg"
        path.write_text("threads=2\n")
        assert load_run_config(str(path)).threads == 2

    def test_invalid_points(self, clean_env) -> None:
        with pytest.raises(DomainError, match="points >= 4"):
            load_run_config(overrides={"points": 2})

    def test_unknown_key(self, clean_env, tmp_path) -> None:
        path = tmp_path / "run.cfg"
        path.write_text("colour=blue\n")
        with pytest.raises(DomainError, match="unknown config key"):
            read_config_file(str(path))

    def test_empty_value(self, clean_env, tmp_path) -> None:
        path = tmp_path / "run.cfg"
        path.write_text("points=\n")
        with pytest.raises(DomainError, match="no value"):
            read_config_file(str(path))

    def test_missing_file(self, clean_env, tmp_path) -> None:
        with pytest.raises(DomainError, match="not found"):
            load_run_config(str(tmp_path / "absent.cfg"))


class TestValidationRules:
    def test_loads_acceptance_rules(self) -> None:
        module = load_validation_rules("rules/acceptance_validation.py")
        assert module is not None
        assert len(module.ALL_RULES) == 10
        assert load_validation_rules("rules/acceptance_validation.py") is module

    def test_missing_module(self) -> None:
        assert load_validation_rules("rules/no_such_rules.py") is None
