"""
Utility functions for the heat-content harness.
"""

import importlib
import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import dotenv_values, load_dotenv
from prefect import get_run_logger
from prefect.exceptions import MissingContextError
from prefect.logging import get_logger as get_module_logger
from pydantic import ValidationError

from heat_content.errors import DomainError
from heat_content.models import RunConfig

load_dotenv()

DEFAULT_THREADS = 4
DEFAULT_OUTPUT_DIR = "output"

# Keys accepted in a key=value config file, mapped onto RunConfig fields
CONFIG_KEYS = {
    "t_min": "t_min", "t-min": "t_min",
    "t_max": "t_max", "t-max": "t_max",
    "points": "points",
    "tol": "tol",
    "n": "N",
    "slope_tol": "slope_tol", "slope-tol": "slope_tol",
    "log_coeff_tol": "log_coeff_tol", "log-coeff-tol": "log_coeff_tol",
    "format": "output_format", "output_format": "output_format",
    "seed": "seed",
    "threads": "threads",
}

_VALIDATION_RULES = {}


def get_logger(name: str = "heat_content") -> Union[logging.Logger, logging.LoggerAdapter]:
    """Run logger inside a flow or task, the module logger otherwise."""
    try:
        return get_run_logger()
    except MissingContextError:
        return get_module_logger(name)


def resolve_threads(flag: Optional[int] = None) -> int:
    """--threads, then HEATCONTENT_THREADS, then the default."""
    if flag is not None:
        threads = flag
    else:
        raw = os.getenv("HEATCONTENT_THREADS")
        try:
            threads = int(raw) if raw else DEFAULT_THREADS
        except ValueError:
            raise DomainError(f"HEATCONTENT_THREADS must be an integer, got {raw!r}")
    if threads < 1:
        raise DomainError(f"threads >= 1 required, got {threads}")
    return threads


def resolve_tol(flag: Optional[float] = None) -> Optional[float]:
    """--tol, then HEATCONTENT_TOL; None leaves the RunConfig default."""
    if flag is not None:
        return flag
    raw = os.getenv("HEATCONTENT_TOL")
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise DomainError(f"HEATCONTENT_TOL must be a number, got {raw!r}")


def output_dir() -> str:
    return os.getenv("HEATCONTENT_OUTPUT_DIR", DEFAULT_OUTPUT_DIR)


def read_config_file(path: str) -> Dict[str, str]:
    """key=value pairs from path, keys normalised to RunConfig field names."""
    if not os.path.exists(path):
        raise DomainError(f"config file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        field = CONFIG_KEYS.get(key.strip().lower())
        if field is None:
            raise DomainError(f"unknown config key {key!r} in {path}")
        if value is None or value == "":
            raise DomainError(f"config key {key!r} in {path} has no value")
        values[field] = value
    return values


def load_run_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Defaults < environment < config file < explicit flags."""
    values: Dict[str, Any] = {"threads": resolve_threads()}
    env_tol = resolve_tol()
    if env_tol is not None:
        values["tol"] = env_tol
    if path:
        values.update(read_config_file(path))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        messages = "; ".join(err["msg"].removeprefix("Value error, ") for err in e.errors())
        raise DomainError(f"invalid configuration: {messages}") from e


def load_validation_rules(rules_path: str) -> Any:
    """Loads acceptance rules from a Python module path."""
    global _VALIDATION_RULES
    module_name = Path(rules_path).stem
    if module_name in _VALIDATION_RULES:
        return _VALIDATION_RULES[module_name]

    logger = get_logger()
    try:
        # rules/acceptance_validation.py -> rules.acceptance_validation
        module_spec_path = rules_path.replace(os.path.sep, '.').removesuffix('.py')
        rules_module = importlib.import_module(module_spec_path)
        _VALIDATION_RULES[module_name] = rules_module
        logger.debug(f"Loaded validation rules module: {module_spec_path}")
        return rules_module
    except ImportError as e:
        logger.warning(f"Could not import validation rules from {rules_path}: {e}. Returning None.")
        _VALIDATION_RULES[module_name] = None
        return None


def parse_complex(text: str) -> complex:
    """Parse "re[+imi]", e.g. "0.3", "0.3+0.1i", "-1-2i"."""
    raw = text.strip().replace(" ", "")
    if raw.endswith("i"):
        raw = raw[:-1] + "j"
    try:
        return complex(raw)
    except ValueError:
        raise DomainError(f"cannot parse {text!r} as a number of the form re[+imi]")


def parse_real_or_complex(text: str) -> Union[float, complex]:
    value = parse_complex(text)
    return value.real if value.imag == 0.0 else value


def format_number(x: Union[float, complex]) -> str:
    """17 significant digits; complex values as re+imi."""
    if isinstance(x, complex):
        if x.imag == 0.0:
            return format(x.real, ".17g")
        sign = "+" if x.imag >= 0 else "-"
        return f"{format(x.real, '.17g')}{sign}{format(abs(x.imag), '.17g')}i"
    return format(float(x), ".17g")
