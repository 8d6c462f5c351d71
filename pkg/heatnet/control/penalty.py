"""
Penalty re-weighting loop.

Soft constraint families carry slacks priced by weights. After a solve,
every slack whose weighted value exceeds the tolerance gets its weight
multiplied by the factor and the model is solved again from the last point,
until the scaled slack max-norm is below tolerance or the cap is reached.
"""

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from heatnet.core.config import settings
from heatnet.nlp.model import NlpModel
from heatnet.nlp.slacks import add_slacks, extend_point, initialize_slacks, scaled_slack_norm
from heatnet.solver.auglag import solve
from heatnet.solver.config import SolverConfig
from heatnet.solver.mpcc import complementarity_rows, solve_mpcc
from heatnet.solver.result import SolveResult, WarmStart

logger = logging.getLogger(__name__)


def reweight(model: NlpModel, point, factor: Optional[float] = None, tol: Optional[float] = None) -> NlpModel:
    """Multiply w_j by ``factor`` for every slack with w_j s_j > ``tol``"""
    factor = settings.REWEIGHT_FACTOR if factor is None else factor
    tol = settings.SLACK_TOLERANCE if tol is None else tol
    block = model.slacks
    if block is None or block.size == 0:
        return model
    hit = block.weights * block.values(point) > tol
    if not np.any(hit):
        return model
    logger.debug(f"reweighting {int(hit.sum())} slack(s) of {model.name}")
    return model.with_slack_weights(np.where(hit, block.weights * factor, block.weights))


@dataclass
class PenalizedSolve:
    model: NlpModel
    result: SolveResult
    slack_norm: float
    hard_violation: float
    reweights: int
    feasible: bool
    wall_time: float

    @property
    def point(self) -> np.ndarray:
        return self.result.point

    @property
    def base_point(self) -> np.ndarray:
        return self.result.point[:self.model.n_base]

    @property
    def cost(self) -> float:
        return self.model.cost(self.result.point)


def is_feasible(slack_norm: float, hard_violation: float) -> bool:
    return slack_norm <= settings.SLACK_TOLERANCE and hard_violation <= settings.FEASIBILITY_TOLERANCE


def run_solver(model: NlpModel, config: SolverConfig, warm: WarmStart) -> SolveResult:
    if complementarity_rows(model):
        return solve_mpcc(model, config, warm)
    return solve(model, config, warm)


def solve_with_reweighting(
    model: NlpModel,
    start,
    config: Optional[SolverConfig] = None,
    cap: int = 5,
) -> PenalizedSolve:
    """
    Slack ``model``, solve from ``start`` (base variables) and re-weight
    until the scaled slack norm meets the tolerance or ``cap`` re-solves are used.
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    slacked = add_slacks(model)
    point = initialize_slacks(slacked, extend_point(slacked, start))
    warm = WarmStart(point)
    reweights = 0
    while True:
        result = run_solver(slacked, config, warm)
        norm = scaled_slack_norm(slacked, result.point)
        hard = result.max_constraint_violation
        logger.debug(
            f"{model.name}: {result.status.value}, slack norm {norm:.3e}, hard violation {hard:.2e}"
        )
        if norm <= settings.SLACK_TOLERANCE or reweights >= cap:
            break
        slacked = reweight(slacked, result.point)
        warm = result.warm_start()
        reweights += 1

    feasible = is_feasible(norm, hard)
    if not feasible:
        logger.warning(
            f"⚠️ {model.name}: slack norm {norm:.3e} / violation {hard:.2e} after {reweights} re-weighting(s)"
        )
    return PenalizedSolve(
        model=slacked,
        result=result,
        slack_norm=norm,
        hard_violation=hard,
        reweights=reweights,
        feasible=feasible,
        wall_time=time.perf_counter() - started,
    )
