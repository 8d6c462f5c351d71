from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE_TOL = "feasible_tol"
    INFEASIBLE = "infeasible"
    ITERATION_LIMIT = "iteration_limit"
    TIME_LIMIT = "time_limit"


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    merit_before: float
    merit_after: float
    max_violation: float
    step_norm: float
    penalty: float
    inner_iterations: int
    accepted: bool


@dataclass(frozen=True)
class WarmStart:
    """Primal point plus the dual state of a previous solve of the same model"""
    point: np.ndarray
    multipliers: Optional[np.ndarray] = None
    penalty: Optional[float] = None
    objective_scale: Optional[float] = None


@dataclass
class SolveResult:
    status: SolveStatus
    point: np.ndarray
    objective: float
    max_constraint_violation: float
    iterations: int
    wall_time: float
    multipliers: np.ndarray
    penalty: float
    objective_scale: float
    message: str = ""
    inner_iterations: int = 0
    history: List[IterationRecord] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE_TOL)

    def warm_start(self) -> WarmStart:
        return WarmStart(
            point=self.point.copy(),
            multipliers=self.multipliers.copy(),
            penalty=self.penalty,
            objective_scale=self.objective_scale,
        )

    def __repr__(self) -> str:
        return (
            f"SolveResult({self.status.value}, objective={self.objective:.6g}, "
            f"viol={self.max_constraint_violation:.2e}, iterations={self.iterations}, "
            f"time={self.wall_time:.3f}s)"
        )
