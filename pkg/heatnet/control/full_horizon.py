import logging
import time
from typing import Optional, Tuple

import numpy as np

from heatnet.assemble.builder import assemble
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.scenario import Scenario
from heatnet.control.penalty import is_feasible, solve_with_reweighting
from heatnet.control.state import ControlTrajectory, StateSnapshot
from heatnet.core.config import settings
from heatnet.network.graph import Network
from heatnet.nlp.slacks import add_slacks, extend_point, initialize_slacks, scaled_slack_norm
from heatnet.presolve.directions import DirectionFixing
from heatnet.schemas.report import SolveReport
from heatnet.solver.config import SolverConfig

logger = logging.getLogger(__name__)


def warm_start_quality(model, start) -> Tuple[float, float, float, float]:
    """(slack norm, hard violation, objective, cost) of a base point on the slacked model"""
    slacked = add_slacks(model)
    point = initialize_slacks(slacked, extend_point(slacked, start))
    return (
        scaled_slack_norm(slacked, point),
        slacked.max_violation(point),
        slacked.evaluate(point)[0],
        model.cost(start),
    )


def full_horizon(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    warm: ControlTrajectory,
    fixing: Optional[DirectionFixing] = None,
    config: Optional[SolverConfig] = None,
) -> Tuple[ControlTrajectory, SolveReport]:
    """
    Solve the complete model initialized from ``warm``.

    Time layer 0 stays fixed to the warm start's first snapshot. A feasible
    warm start is kept when the solve ends infeasible or more expensive.
    """
    if len(warm) != disc.steps + 1:
        raise ValueError(f"warm trajectory has {len(warm)} snapshots, expected {disc.steps + 1}")
    started = time.perf_counter()
    layers = warm.layers()
    problem = assemble(
        network, scenario, disc, fixing,
        initial=layers[0],
        warm={i: values for i, values in layers.items() if i > 0},
    )
    start = problem.model.initial
    warm_norm, warm_hard, warm_objective, warm_cost = warm_start_quality(problem.model, start)
    warm_ok = is_feasible(warm_norm, warm_hard)
    logger.info(
        f"🔍 Full horizon: {problem.model!r}, warm start slack norm {warm_norm:.2e}, cost {warm_cost:.6g}"
    )

    outcome = solve_with_reweighting(problem.model, start, config, cap=settings.MAX_REWEIGHTS_FULL)
    point = outcome.base_point
    cost = outcome.cost
    objective = outcome.result.objective
    norm, feasible, status = outcome.slack_norm, outcome.feasible, outcome.result.status.value
    if warm_ok and (not feasible or cost > warm_cost):
        logger.warning(
            f"⚠️ Keeping the warm start (cost {warm_cost:.6g}); full-horizon solve gave "
            f"cost {cost:.6g}, feasible={feasible}"
        )
        point = np.asarray(start, dtype=float)
        cost, objective, norm, feasible = warm_cost, warm_objective, warm_norm, True
        status = "warm_start"

    elapsed = time.perf_counter() - started
    trajectory = ControlTrajectory(
        snapshots=[StateSnapshot(i, values) for i, values in problem.layers(point).items()],
        feasible=feasible,
        objective=objective,
        cost=cost,
    )
    report = SolveReport(
        network=network.name,
        scenario=scenario.name,
        scheme=disc.scheme,
        mixing=disc.mixing,
        presolve=fixing is not None,
        time_steps=disc.steps,
        t_all=round(elapsed, 3),
        t_nlp=round(elapsed, 3),
        objective=objective,
        cost=cost,
        slack_norm=norm,
        feasible_tol=feasible,
        status=status,
        zero_inflow_nodes=problem.zero_inflow_nodes(point),
    )
    logger.info(
        f"🎯 Full horizon {status} in {elapsed:.3f}s: objective {objective:.6g}, cost {cost:.6g}, "
        f"slack norm {norm:.2e}"
    )
    return trajectory, report
