"""
Stationary initialization.

Solves the time-free model of one time point from a heuristic guess:
supply and return temperatures from the consumer data, consumer flows from
the demand, pipe flows as the least-norm solution of the mass balance.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from heatnet.assemble.builder import assemble_stationary
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.layout import VarKey
from heatnet.assemble.scenario import Scenario
from heatnet.control.penalty import PenalizedSolve, solve_with_reweighting
from heatnet.control.state import StateSnapshot
from heatnet.core.config import settings
from heatnet.network.graph import Network
from heatnet.network.physics import cross_section
from heatnet.presolve.directions import DirectionFixing, no_fixing
from heatnet.schemas.enums import Side
from heatnet.solver.config import SolverConfig

logger = logging.getLogger(__name__)

SUPPLY_MARGIN = 10.0
PRESSURE_LIFT = 2e5


@dataclass
class StationaryRun:
    snapshot: StateSnapshot
    outcome: PenalizedSolve
    wall_time: float

    @property
    def solves(self) -> int:
        return 1 + self.outcome.reweights


def _pipe_flows(network: Network, consumer_flow: Dict[str, float], fixing: DirectionFixing) -> Dict[str, float]:
    """Least-norm pipe mass flows satisfying the node balances"""
    pipes = network.pipes
    if not pipes:
        return {}
    rows = {node.id: r for r, node in enumerate(network.nodes)}
    incidence = np.zeros((len(rows), len(pipes)))
    rhs = np.zeros(len(rows))
    for j, pipe in enumerate(pipes):
        incidence[rows[pipe.head], j] += 1.0
        incidence[rows[pipe.tail], j] -= 1.0
    total = sum(consumer_flow.values())
    for arc_id, q in [*consumer_flow.items(), (network.depot.id, total)]:
        arc = network.arc(arc_id)
        # Σ_in q - Σ_out q = 0 with the arc flow moved to the right-hand side
        rhs[rows[arc.head]] -= q
        rhs[rows[arc.tail]] += q
    flows, *_ = np.linalg.lstsq(incidence, rhs, rcond=None)
    result = {}
    for pipe, q in zip(pipes, flows):
        sign = fixing.sign(pipe.id)
        result[pipe.id] = max(q, 0.0) if sign > 0 else min(q, 0.0) if sign < 0 else float(q)
    return result


def heuristic_guess(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: Optional[DirectionFixing] = None,
    i: int = 0,
) -> Dict[VarKey, float]:
    fixing = fixing or no_fixing(network)
    fluid = network.fluid
    consumers = network.consumers
    supply = max((c.min_inlet_temp for c in consumers), default=353.15) + SUPPLY_MARGIN
    ret = float(np.mean([c.return_temp for c in consumers])) if consumers else supply - 30.0
    spread = max(supply - ret, 1.0)

    guess: Dict[VarKey, float] = {}
    p_s = network.depot.stagnation_pressure
    for node in network.nodes:
        forward = node.side is Side.FORWARD
        guess[("theta", node.id)] = supply if forward else ret
        guess[("p", node.id)] = p_s + PRESSURE_LIFT if forward else p_s

    consumer_flow = {}
    for c in consumers:
        q = scenario.demand(c.id, i) / (fluid.heat_capacity * (supply - c.return_temp))
        consumer_flow[c.id] = min(q, settings.MASS_FLOW_BOUND)
        guess[("q", c.id)] = consumer_flow[c.id]
        guess[("theta_tail", c.id)] = supply
        guess[("theta_head", c.id)] = c.return_temp
    total = sum(consumer_flow.values())
    depot = network.depot
    guess[("q", depot.id)] = total
    guess[("theta_tail", depot.id)] = ret
    guess[("theta_head", depot.id)] = supply

    heat = total * fluid.heat_capacity * spread
    waste = min(heat, depot.max_waste_power)
    guess[("P_w",)] = waste
    guess[("P_g",)] = heat - waste
    guess[("P_p",)] = total / fluid.density * PRESSURE_LIFT

    for pipe_id, q in _pipe_flows(network, consumer_flow, fixing).items():
        pipe = network.arc(pipe_id)
        v = q / (cross_section(pipe) * fluid.density)
        guess[("v", pipe_id)] = v
        temp = supply if network.node(pipe.tail).side is Side.FORWARD else ret
        for k in range(disc.cells_of(pipe) + 1):
            guess[("theta_pipe", pipe_id, k)] = temp
        guess[("q_pos", pipe_id)] = max(q, 0.0)
        guess[("q_neg", pipe_id)] = max(-q, 0.0)
        guess[("dtheta_tail", pipe_id)] = 0.0
        guess[("dtheta_head", pipe_id)] = 0.0
    return guess


def solve_stationary(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: Optional[DirectionFixing] = None,
    i: int = 0,
    config: Optional[SolverConfig] = None,
    guess: Optional[Dict[VarKey, float]] = None,
) -> StationaryRun:
    started = time.perf_counter()
    guess = guess or heuristic_guess(network, scenario, disc, fixing, i)
    problem = assemble_stationary(network, scenario, disc, fixing, i, guess)
    outcome = solve_with_reweighting(
        problem.model, problem.model.initial, config, cap=settings.MAX_REWEIGHTS_STATIONARY
    )
    snapshot = StateSnapshot(i, problem.layer_values(outcome.point, i))
    wall = time.perf_counter() - started
    if outcome.feasible:
        logger.info(
            f"✅ Stationary state at t={i} in {wall:.3f}s "
            f"({1 + outcome.reweights} solve(s), slack norm {outcome.slack_norm:.2e})"
        )
    else:
        logger.warning(f"⚠️ Stationary state at t={i} not within tolerance, using best point")
    return StationaryRun(snapshot=snapshot, outcome=outcome, wall_time=wall)


def stationary_state(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: Optional[DirectionFixing] = None,
    config: Optional[SolverConfig] = None,
) -> StateSnapshot:
    """Stationary solution at t_0 (best point when the re-weighting cap is hit)"""
    return solve_stationary(network, scenario, disc, fixing, 0, config).snapshot
