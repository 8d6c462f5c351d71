import math
from typing import Any, Dict, List, Mapping

from pydantic import BaseModel, ConfigDict, Field, field_validator

from heatnet.core.config import settings


class SolverConfig(BaseModel):
    """Augmented-Lagrangian and MPCC relaxation parameters (defaults from settings)"""
    model_config = ConfigDict(frozen=True)

    kkt_tol: float = Field(default_factory=lambda: settings.SOLVER_KKT_TOL, gt=0)
    optimality_tol: float = Field(default_factory=lambda: settings.SOLVER_OPTIMALITY_TOL, gt=0)
    max_outer: int = Field(default_factory=lambda: settings.SOLVER_MAX_OUTER, ge=1)
    max_inner: int = Field(default_factory=lambda: settings.SOLVER_MAX_INNER, ge=1)
    penalty_init: float = Field(default_factory=lambda: settings.SOLVER_PENALTY_INIT, gt=0)
    penalty_growth: float = Field(default_factory=lambda: settings.SOLVER_PENALTY_GROWTH, gt=1)
    penalty_max: float = Field(default_factory=lambda: settings.SOLVER_PENALTY_MAX, gt=0)
    tau_schedule: List[float] = Field(default_factory=lambda: settings.tau_schedule, min_length=1)
    time_limit: float = Field(default_factory=lambda: settings.SOLVER_TIME_LIMIT, gt=0)
    lbfgs_memory: int = Field(default_factory=lambda: settings.SOLVER_LBFGS_MEMORY, ge=1)
    violation_decrease: float = Field(default_factory=lambda: settings.SOLVER_VIOLATION_DECREASE, gt=0, lt=1)
    restoration_max_evals: int = Field(default_factory=lambda: settings.SOLVER_RESTORATION_MAX_EVALS, ge=0)

    @field_validator("tau_schedule")
    @classmethod
    def _finite_schedule(cls, schedule: List[float]) -> List[float]:
        if any(not math.isfinite(t) or t < 0 for t in schedule):
            raise ValueError(f"relaxation schedule {schedule} must be finite and nonnegative")
        if any(b > a for a, b in zip(schedule, schedule[1:])):
            raise ValueError(f"relaxation schedule {schedule} must be nonincreasing")
        return schedule

    @classmethod
    def with_overrides(cls, overrides: Mapping[str, Any]) -> "SolverConfig":
        unknown = sorted(set(overrides) - set(cls.model_fields))
        if unknown:
            raise ValueError(f"unknown solver option(s) {unknown}")
        return cls(**dict(overrides))

    def summary(self) -> Dict[str, Any]:
        return self.model_dump()
