import logging
import time
from typing import Optional

from heatnet.assemble.builder import assemble_step
from heatnet.assemble.cost import trajectory_cost
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.scenario import Scenario
from heatnet.control.penalty import solve_with_reweighting
from heatnet.control.state import ControlTrajectory, StateSnapshot
from heatnet.core.config import settings
from heatnet.network.graph import Network
from heatnet.presolve.directions import DirectionFixing
from heatnet.solver.config import SolverConfig

logger = logging.getLogger(__name__)


def instantaneous_control(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    init: StateSnapshot,
    fixing: Optional[DirectionFixing] = None,
    config: Optional[SolverConfig] = None,
) -> ControlTrajectory:
    """
    Solve the horizon one period at a time.

    Step i fixes the state of t_{i-1} to the previous result, starts from it
    and solves the one-period model with penalty re-weighting. A step that
    ends outside tolerance marks the trajectory infeasible; the loop goes on.
    """
    snapshots = [init.at(0)]
    trajectory = ControlTrajectory(snapshots)
    objective = 0.0
    for i in range(1, disc.steps + 1):
        started = time.perf_counter()
        problem = assemble_step(network, scenario, disc, fixing, i, snapshots[-1].values)
        outcome = solve_with_reweighting(problem.model, problem.model.initial, config, cap=settings.MAX_REWEIGHTS_STEP)
        snapshots.append(StateSnapshot(i, problem.layer_values(outcome.point, i)))
        elapsed = time.perf_counter() - started

        trajectory.step_times.append(elapsed)
        trajectory.reweights.append(outcome.reweights)
        trajectory.slack_norms.append(outcome.slack_norm)
        objective += outcome.result.objective
        if not outcome.feasible:
            trajectory.feasible = False
        logger.info(
            f"⏱️ IC step {i}/{disc.steps}: {outcome.result.status.value}, "
            f"slack norm {outcome.slack_norm:.2e}, {outcome.reweights} re-weighting(s), {elapsed:.3f}s"
        )

    trajectory.objective = objective
    trajectory.cost = trajectory_cost(
        scenario.costs,
        disc.dt,
        trajectory.series(("P_w",)),
        trajectory.series(("P_g",)),
        trajectory.series(("P_p",)),
    )
    status = "feasible" if trajectory.feasible else "infeasible"
    logger.info(f"🎯 Instantaneous control finished ({status}), {trajectory.solve_count} step solve(s)")
    return trajectory
