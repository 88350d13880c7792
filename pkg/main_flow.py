"""
Main Prefect flows: heat-content verification on a t-grid and the acceptance suite.
"""

import os
from typing import Any, Dict, List, Optional, Sequence

from prefect import flow, get_run_logger
from prefect.task_runners import ThreadPoolTaskRunner

from heat_content.asymptotics import verify_cutoff_expansion, verify_expansion, verify_logplane
from heat_content.boundary import verify_theorem51
from heat_content.models import BCSpec, CutoffSpec, ParamPair, RunConfig, VerificationReport
from tasks.evaluation import grid_evaluator
from tasks.reporting import save_summary
from tasks.validation import run_rule, summarize_rules, validate_suite
from utils.helpers import load_validation_rules, output_dir, resolve_threads

# --- Configuration ---
RULES_DIR = "rules"
OUTPUT_DIR = output_dir()

VALIDATION_RULES = {
    'acceptance': load_validation_rules(os.path.join(RULES_DIR, 'acceptance_validation.py')),
}

GRID_KINDS = ("expansion", "logplane", "bc", "cutoff")


# --- Flow Definition ---

@flow(log_prints=True)
def heat_content_grid_flow(kind: str, params: Dict[str, Any], config: RunConfig) -> VerificationReport:
    """Quadrature on config's t-grid (one task per t), then the fit against the series.

    kind: "expansion" (a, b), "logplane" (a, k), "bc" (a, b, bc) or "cutoff" (a, b).
    """
    logger = get_run_logger()
    t_grid = config.t_grid()
    logger.info(f"Starting {kind} verification for {params} on {len(t_grid)} points "
                f"[{t_grid[-1]:g}, {t_grid[0]:g}]")

    if kind == "expansion":
        report = verify_expansion(ParamPair.of(params["a"], params["b"]), t_grid, N=config.N, tol=config.tol,
                                  slope_tol=config.slope_tol, evaluator=grid_evaluator,
                                  include_boundary_term=params.get("include_boundary_term", True))
    elif kind == "logplane":
        report = verify_logplane(params["a"], params["k"], t_grid, N=params.get("N"), tol=config.tol,
                                 log_coeff_tol=config.log_coeff_tol, evaluator=grid_evaluator)
    elif kind == "bc":
        report = verify_theorem51(ParamPair.of(params["a"], params["b"]), t_grid,
                                  bc=BCSpec.from_code(params["bc"]), N=config.N, tol=config.tol,
                                  slope_tol=config.slope_tol, log_coeff_tol=config.log_coeff_tol,
                                  evaluator=grid_evaluator)
    elif kind == "cutoff":
        report = verify_cutoff_expansion(ParamPair.of(params["a"], params["b"]),
                                         params.get("cutoff") or CutoffSpec(), t_grid, tol=config.tol,
                                         log_coeff_tol=config.log_coeff_tol, evaluator=grid_evaluator)
    else:
        raise ValueError(f"unknown verification kind {kind!r}; expected one of {GRID_KINDS}")

    logger.info(f"Flow finished for {report.label}. Pass: {report.passed}")
    return report


def run_grid_verification(kind: str, params: Dict[str, Any], config: RunConfig) -> VerificationReport:
    """heat_content_grid_flow with its thread pool bounded by config.threads."""
    runner = ThreadPoolTaskRunner(max_workers=config.threads)
    return heat_content_grid_flow.with_options(task_runner=runner)(kind, params, config)


@flow(log_prints=True)
def acceptance_suite_flow(seed: int = 0, only: Optional[Sequence[str]] = None,
                          concurrent: bool = True, summary_dir: Optional[str] = None) -> Dict[str, Any]:
    """Runs the acceptance rules as tasks and saves a JSON summary."""
    logger = get_run_logger()
    rules_module = VALIDATION_RULES.get('acceptance')
    if rules_module is None:
        logger.error("Acceptance rules module could not be loaded. Aborting flow.")
        return {"status": "FAILED", "error": "acceptance rules unavailable"}

    context = {"seed": seed}
    rules = [r for r in rules_module.ALL_RULES if not only or r.__name__ in only]
    if only:
        unknown = set(only) - {r.__name__ for r in rules}
        if unknown:
            logger.error(f"Unknown rule names: {sorted(unknown)}")
            return {"status": "FAILED", "error": f"unknown rules {sorted(unknown)}"}

    if concurrent:
        logger.info(f"Submitting {len(rules)} acceptance rule(s)...")
        futures = [run_rule.submit(rule, context) for rule in rules]
        outcomes: List[Dict[str, Any]] = []
        for rule, future in zip(rules, futures):
            try:
                outcomes.append(future.result())
            except Exception as e:
                logger.error(f"Rule {rule.__name__} crashed: {e}")
                outcomes.append({"rule": rule.__name__, "result": {"error": f"crashed: {e}"}, "seconds": 0.0})
        report = summarize_rules(outcomes)
    else:
        report = validate_suite(context, rules_module, only)

    flow_status = "COMPLETED" if report["status"] == "Validated" else "FAILED"
    final_result = {"status": flow_status, "seed": seed, **report}

    summary_dir = summary_dir or OUTPUT_DIR
    try:
        summary_path = save_summary(final_result, summary_dir)
        logger.info(f"Saved acceptance summary to: {summary_path}")
    except OSError as e:
        logger.error(f"Could not save acceptance summary: {e}")

    logger.info(f"Acceptance suite finished. Status: {flow_status}")
    return final_result


def run_acceptance_suite(seed: int = 0, only: Optional[Sequence[str]] = None,
                         threads: Optional[int] = None, summary_dir: Optional[str] = None) -> Dict[str, Any]:
    runner = ThreadPoolTaskRunner(max_workers=resolve_threads(threads))
    return acceptance_suite_flow.with_options(task_runner=runner)(seed=seed, only=only, summary_dir=summary_dir)


# --- Example Trigger ---
if __name__ == "__main__":
    config = RunConfig()
    report = run_grid_verification("expansion", {"a": 0.3, "b": 0.4}, config)
    print(f"{report.label}: fitted exponent {report.fitted_exponent}, pass={report.passed}")
