"""
Tasks running acceptance rules and aggregating their outcomes.
"""

import time
from typing import Any, Callable, Dict, List, Optional, Sequence

from prefect import get_run_logger, task
from prefect.cache_policies import NO_CACHE

from heat_content.errors import HeatContentError
from utils.helpers import get_logger

RuleFn = Callable[[Dict[str, Any]], Dict[str, str]]


def _classify(name: str, result: Dict[str, str], errors: List[Dict[str, str]],
              warnings: List[Dict[str, str]]) -> None:
    if not result:
        return
    tagged = {"rule": name, **result}
    if 'error' in result:
        errors.append(tagged)
    elif 'warning' in result:
        warnings.append(tagged)


def _run_validation_checks(context: Dict[str, Any], rules_module: Any,
                           only: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
    """Runs the rules of the module in sequence, one outcome per rule."""
    if not rules_module or not hasattr(rules_module, 'run_all_validations'):
        get_logger().warning("Validation rules module is invalid or missing 'run_all_validations'. Skipping checks.")
        return []

    try:
        return rules_module.run_all_validations(context, only)
    except Exception as e:
        return [{"rule": "run_all_validations", "result": {"error": f"Validation engine failed: {e}"},
                 "seconds": 0.0}]


@task(cache_policy=NO_CACHE, task_run_name="rule {rule_func.__name__}")
def run_rule(rule_func: RuleFn, context: Dict[str, Any]) -> Dict[str, Any]:
    """Prefect task running one acceptance rule; library errors become rule errors."""
    logger = get_run_logger()
    name = rule_func.__name__
    start = time.perf_counter()
    try:
        result = rule_func(context)
    except HeatContentError as e:
        logger.error(f"{name} raised {type(e).__name__}: {e}")
        result = {"error": f"{type(e).__name__}: {e}"}
    elapsed = time.perf_counter() - start
    logger.info(f"{name} finished in {elapsed:.1f}s: {result or 'ok'}")
    return {"rule": name, "result": result, "seconds": elapsed}


def summarize_rules(outcomes: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Aggregates run_rule outcomes into a validation report."""
    errors: List[Dict[str, str]] = []
    warnings: List[Dict[str, str]] = []
    for outcome in outcomes:
        _classify(outcome["rule"], outcome["result"], errors, warnings)
    return {
        "status": "Validated" if not errors else "Errors Found",
        "errors": errors,
        "warnings": warnings,
        "rules": [{"rule": o["rule"], "passed": 'error' not in o["result"], "seconds": o["seconds"]}
                  for o in outcomes],
    }


@task(cache_policy=NO_CACHE)
def validate_suite(context: Dict[str, Any], rules_module: Any,
                   only: Optional[Sequence[str]] = None) -> Dict[str, Any]:
    """Runs a rule module sequentially inside one task."""
    report = summarize_rules(_run_validation_checks(context, rules_module, only))
    get_run_logger().info(f"Validation checks ran: {len(report['errors'])} errors, "
                          f"{len(report['warnings'])} warnings found.")
    return report
