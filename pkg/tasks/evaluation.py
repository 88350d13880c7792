"""
Tasks evaluating heat-content quadratures on a t-grid.
"""

from typing import Callable, List, Sequence

from prefect import get_run_logger, task
from prefect.cache_policies import NO_CACHE

from heat_content.models import QuadResult


@task(cache_policy=NO_CACHE, task_run_name="quadrature t={t}")
def evaluate_point(fn: Callable[[float], QuadResult], t: float) -> QuadResult:
    """Prefect task running one quadrature of a t-grid."""
    result = fn(t)
    get_run_logger().debug(f"t={t:g}: {result.value:.17g} +- {result.error_estimate:.3g} "
                           f"({result.nodes_used} nodes)")
    return result


def grid_evaluator(fn: Callable[[float], QuadResult], t_grid: Sequence[float]) -> List[QuadResult]:
    """Submits one task per t and collects results in grid order; call from inside a flow.

    The first failing point re-raises its exception.
    """
    futures = [evaluate_point.submit(fn, t) for t in t_grid]
    return [future.result() for future in futures]
