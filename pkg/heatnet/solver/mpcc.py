"""
Scholtes relaxation for models with complementarity rows.

Every product row p(x) = 0 of the complementarity family (with both factors
bounded below by zero) is replaced by τ - p(x) >= 0 and the relaxed models
are solved along the τ schedule, each stage warm-started from the previous.
"""

import logging
import time
from dataclasses import replace
from typing import List, Optional

import numpy as np

from heatnet.nlp.model import Family, NlpModel, Relation, SlackPolicy
from heatnet.solver.auglag import solve
from heatnet.solver.config import SolverConfig
from heatnet.solver.result import SolveResult, SolveStatus, WarmStart

logger = logging.getLogger(__name__)


def complementarity_rows(model: NlpModel) -> List[int]:
    return [j for j, c in enumerate(model.constraints) if c.family is Family.COMPLEMENTARITY]


def relax(model: NlpModel, rows: List[int], tau: float) -> NlpModel:
    updates = {
        j: replace(
            model.constraints[j],
            expr=tau - model.constraints[j].expr,
            relation=Relation.GE,
            slack_policy=SlackPolicy.NONE,
        )
        for j in rows
    }
    return model.with_constraints(updates)


def complementarity_violation(model: NlpModel, point, rows: List[int]) -> float:
    if not rows:
        return 0.0
    _, residuals = model.evaluate(point)
    return float(np.max(np.abs(residuals[rows])))


def solve_mpcc(
    model: NlpModel,
    config: Optional[SolverConfig] = None,
    warm_start: Optional[WarmStart] = None,
) -> SolveResult:
    """
    Solve along the relaxation schedule; the result refers to ``model``.

    A final product above kkt_tol turns the status into iteration_limit.
    """
    config = config or SolverConfig()
    rows = complementarity_rows(model)
    if not rows:
        return solve(model, config, warm_start)

    started = time.perf_counter()
    warm = warm_start
    if warm is not None and warm.multipliers is not None:
        multipliers = np.array(warm.multipliers, dtype=float)
        multipliers[rows] = 0.0
        warm = replace(warm, multipliers=multipliers)

    iterations, inner, history = 0, 0, []
    best: Optional[SolveResult] = None
    stalled = False
    for tau in config.tau_schedule:
        remaining = max(config.time_limit - (time.perf_counter() - started), 1e-3)
        stage = solve(relax(model, rows, tau), config.model_copy(update={"time_limit": remaining}), warm)
        iterations += stage.iterations
        inner += stage.inner_iterations
        history.extend(stage.history)
        logger.debug(f"τ={tau:.1e}: {stage!r}")
        if not stage.success:
            stalled = best is not None
            best = best or stage
            break
        best = stage
        warm = stage.warm_start()
        if time.perf_counter() - started > config.time_limit:
            break

    stage = best
    point = stage.point
    objective, residuals = model.evaluate(point)
    violation = model.violation(residuals, scaled=True)
    product = complementarity_violation(model, point, rows)
    status, message = stage.status, stage.message
    if stalled:
        status, message = SolveStatus.ITERATION_LIMIT, "relaxation stalled, returning the last stage point"
    if stage.success and product > config.kkt_tol:
        status, message = SolveStatus.ITERATION_LIMIT, f"complementarity {product:.2e} above kkt_tol"
    elapsed = time.perf_counter() - started
    if status is not SolveStatus.TIME_LIMIT and elapsed > config.time_limit:
        status, message = SolveStatus.TIME_LIMIT, f"time limit {config.time_limit:g}s reached"
    multipliers = stage.multipliers.copy()
    multipliers[rows] = 0.0
    return SolveResult(
        status=status,
        point=point,
        objective=float(objective),
        max_constraint_violation=float(violation.max()) if violation.size else 0.0,
        iterations=iterations,
        wall_time=elapsed,
        multipliers=multipliers,
        penalty=stage.penalty,
        objective_scale=stage.objective_scale,
        message=message,
        inner_iterations=inner,
        history=history,
    )
