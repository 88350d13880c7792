"""
Report emission: CSV and JSON renderings of verification reports, summary files.
"""

import os
import sys
from typing import Any, Dict, List, Optional

import orjson
from pydantic import BaseModel

from heat_content.models import VerificationReport
from utils.helpers import format_number, get_logger

CSV_COLUMNS = ("t", "quad_value", "quad_error", "series_value", "residual")
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


def _default(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.model_dump(by_alias=True)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> bytes:
    return orjson.dumps(obj, default=_default, option=JSON_OPTIONS)


def _cell(value: Optional[float]) -> str:
    return "" if value is None else format_number(value)


def report_rows(report: VerificationReport) -> List[List[float]]:
    return [list(row) for row in zip(report.t_grid, report.quad_values, report.quad_errors,
                                     report.series_values, report.residuals)]


def report_to_csv(report: VerificationReport) -> str:
    """Five data columns, then fitted_exponent / predicted_exponent / pass trailer lines."""
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(format_number(v) for v in row) for row in report_rows(report)]
    lines.append(f"fitted_exponent,{_cell(report.fitted_exponent)}")
    lines.append(f"predicted_exponent,{_cell(report.predicted_exponent)}")
    if report.fitted_log_coeff is not None:
        lines.append(f"fitted_log_coeff,{_cell(report.fitted_log_coeff)}")
        lines.append(f"expected_log_coeff,{_cell(report.expected_log_coeff)}")
    if report.fitted_constant is not None:
        lines.append(f"fitted_constant,{_cell(report.fitted_constant)}")
        lines.append(f"expected_constant,{_cell(report.expected_constant)}")
    lines.append(f"pass,{str(report.passed).lower()}")
    return "\n".join(lines) + "\n"


def report_to_json(report: VerificationReport) -> str:
    """One object; the per-t arrays all have the grid's length."""
    payload: Dict[str, Any] = {
        "label": report.label,
        "parameters": report.parameters,
        "t": report.t_grid,
        "quad_value": report.quad_values,
        "quad_error": report.quad_errors,
        "series_value": report.series_values,
        "residual": report.residuals,
        "fitted_exponent": report.fitted_exponent,
        "predicted_exponent": report.predicted_exponent,
        "fitted_log_coeff": report.fitted_log_coeff,
        "expected_log_coeff": report.expected_log_coeff,
        "fitted_constant": report.fitted_constant,
        "expected_constant": report.expected_constant,
        "below_floor": report.below_floor,
        "tolerance_used": report.tolerance_used,
        "notes": report.notes,
        "pass": report.passed,
    }
    return dumps(payload).decode() + "\n"


def render_report(report: VerificationReport, output_format: str) -> str:
    return report_to_json(report) if output_format == "json" else report_to_csv(report)


def emit(text: str, out: Optional[str] = None) -> None:
    """Write to the --out path, or stdout."""
    if out:
        with open(out, "w", newline="") as f:
            f.write(text)
        get_logger().info(f"Wrote report to: {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def save_summary(summary: Dict[str, Any], directory: str, name: str = "acceptance_summary") -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{name}.json")
    with open(path, "wb") as f:
        f.write(dumps(summary))
    return path
