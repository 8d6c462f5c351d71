"""
Run orchestration: presolve, initial state, instantaneous control and the
full-horizon solve, with wall-clock timings for the report.
"""

import logging
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from heatnet.assemble.builder import assemble
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.layout import layer_keys
from heatnet.assemble.scenario import Scenario, load_scenario
from heatnet.control.full_horizon import full_horizon
from heatnet.control.instantaneous import instantaneous_control
from heatnet.control.state import ControlTrajectory, StateSnapshot
from heatnet.control.stationary import StationaryRun, solve_stationary
from heatnet.network.graph import Network
from heatnet.network.loader import load_network
from heatnet.nlp.dump import dump_model
from heatnet.presolve.directions import DirectionFixing, fix_flow_directions, no_fixing
from heatnet.presolve.simplification import simplification_plan
from heatnet.schemas.enums import InitialStateSource
from heatnet.schemas.report import RunConfig, SolveReport, StepTimeStats
from heatnet.solver.config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    network: Network
    scenario: Scenario
    disc: Discretization
    fixing: DirectionFixing
    report: SolveReport
    trajectory: ControlTrajectory
    ic_trajectory: Optional[ControlTrajectory] = None
    stationary: Optional[StationaryRun] = None

    @property
    def feasible(self) -> bool:
        if self.report.feasible_tol is not None:
            return self.report.feasible_tol
        return bool(self.report.ic_feasible) if self.report.ic_feasible is not None else True


def _seconds(value: float) -> float:
    return round(value, 3)


def step_time_stats(times) -> StepTimeStats:
    if not times:
        return StepTimeStats()
    return StepTimeStats(
        mean=_seconds(statistics.fmean(times)),
        median=_seconds(statistics.median(times)),
        min=_seconds(min(times)),
        max=_seconds(max(times)),
    )


def prepare(config: RunConfig):
    """Load inputs and build the grid; the scenario is resampled onto it"""
    network = load_network(config.network)
    scenario = load_scenario(config.scenario)
    disc = Discretization.build(network, scenario.horizon, config.dt, config.dx, config.scheme, config.mixing)
    scenario = scenario.resampled(disc.steps)
    scenario.validate_for(network)
    return network, scenario, disc


def presolve(network: Network, enabled: bool = True) -> DirectionFixing:
    return fix_flow_directions(network) if enabled else no_fixing(network)


def initial_state(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: DirectionFixing,
    solver: SolverConfig,
):
    """Given initial state from the scenario, or the stationary solution at t_0"""
    if scenario.initial_state is InitialStateSource.GIVEN and scenario.initial_values:
        snapshot = StateSnapshot.from_named(0, scenario.initial_values)
        snapshot.require(layer_keys(network, disc, simplification_plan(fixing, disc.mixing)))
        logger.info("📥 Using the initial state given by the scenario")
        return snapshot, None
    run = solve_stationary(network, scenario, disc, fixing, 0, solver)
    return run.snapshot, run


def run_pipeline(config: RunConfig) -> PipelineResult:
    started = time.perf_counter()
    solver = SolverConfig.with_overrides(config.solver_overrides)
    network, scenario, disc = prepare(config)
    logger.info(
        f"🚀 {network!r}, {disc.steps} steps of {disc.dt:g}s, scheme={disc.scheme.value}, "
        f"mixing={disc.mixing.value}"
    )
    fixing = presolve(network, config.presolve)
    active_fixing = fixing if config.presolve else None

    if config.dump_model:
        problem = assemble(network, scenario, disc, active_fixing)
        path = Path(config.dump_model)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dump_model(problem.model), encoding="utf-8")
        logger.info(f"📄 Model listing written to {path}")

    init, stationary = initial_state(network, scenario, disc, fixing, solver)

    fields = {}
    if stationary is not None:
        fields.update(t_stat=_seconds(stationary.wall_time), stat_steps=stationary.solves)

    ic_trajectory = None
    if config.skip_ic:
        warm = ControlTrajectory.constant(init, disc.steps)
    else:
        ic_started = time.perf_counter()
        ic_trajectory = instantaneous_control(network, scenario, disc, init, active_fixing, solver)
        warm = ic_trajectory
        fields.update(
            t_ic=_seconds(time.perf_counter() - ic_started),
            ic_steps=ic_trajectory.solve_count,
            ic_step_times=step_time_stats(ic_trajectory.step_times),
            ic_objective=ic_trajectory.objective,
            ic_cost=ic_trajectory.cost,
            ic_feasible=ic_trajectory.feasible,
        )

    if config.ic_only:
        trajectory = warm
        report = SolveReport(
            network=network.name,
            scenario=scenario.name,
            scheme=disc.scheme,
            mixing=disc.mixing,
            presolve=config.presolve,
            time_steps=disc.steps,
            t_all=0.0,
        )
    else:
        trajectory, report = full_horizon(network, scenario, disc, warm, active_fixing, solver)

    fields.update(presolve=config.presolve, t_all=_seconds(time.perf_counter() - started))
    report = report.model_copy(update=fields)
    logger.info(f"✅ Run finished in {report.t_all:.3f}s")
    return PipelineResult(
        network=network,
        scenario=scenario,
        disc=disc,
        fixing=fixing,
        report=report,
        trajectory=trajectory,
        ic_trajectory=ic_trajectory,
        stationary=stationary,
    )
