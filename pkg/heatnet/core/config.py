from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Dict, List
import json


DEFAULT_SLACK_FAMILIES = ["momentum", "energy", "mixing", "consumer", "depot"]

# 1 / typical residual magnitude: Pa for momentum, K for energy, W for consumer and depot power;
# mixing rows are priced like energy rows
DEFAULT_SLACK_WEIGHTS = {
    "momentum": 1e-5,
    "energy": 1e-2,
    "mixing": 1e-2,
    "consumer": 1e-6,
    "depot": 1e-6,
}

# Nominal residual magnitude per constraint family (reference units)
DEFAULT_CONSTRAINT_SCALES = {
    "momentum": 1e4,
    "energy": 1.0,
    "mass_balance": 10.0,
    "pressure": 1e5,
    "mixing": 1e3,
    "temperature": 1.0,
    "consumer": 1e5,
    "depot": 1e5,
    "ramp": 1.0,
    "complementarity": 1e2,
}


class Settings(BaseSettings):
    """Library settings loaded from environment variables"""

    PROJECT_NAME: str = "HeatNet"
    LOG_LEVEL: str = "INFO"

    # Model construction
    SMOOTH_ABS_EPSILON: float = 1e-6
    TEMPERATURE_RELAXATION: float = 0.1
    PRESSURE_RELAXATION: float = 1e4
    NODE_TEMPERATURE_MIN: float = 273.15
    NODE_TEMPERATURE_MAX: float = 473.15
    NODE_PRESSURE_MIN: float = 1e5
    NODE_PRESSURE_MAX: float = 25e5
    VELOCITY_BOUND: float = 5.0
    MASS_FLOW_BOUND: float = 500.0
    TEMPERATURE_DIFFERENCE_BOUND: float = 200.0

    # Penalty formulation
    SLACK_FAMILIES: str = json.dumps(DEFAULT_SLACK_FAMILIES)
    SLACK_WEIGHTS: str = json.dumps(DEFAULT_SLACK_WEIGHTS)
    CONSTRAINT_SCALES: str = json.dumps(DEFAULT_CONSTRAINT_SCALES)
    SLACK_TOLERANCE: float = 1e-2
    REWEIGHT_FACTOR: float = 10.0
    FEASIBILITY_TOLERANCE: float = 1e-4

    # Re-iteration caps
    MAX_REWEIGHTS_STATIONARY: int = 5
    MAX_REWEIGHTS_STEP: int = 5
    MAX_REWEIGHTS_FULL: int = 5

    # Solver defaults
    SOLVER_KKT_TOL: float = 1e-6
    SOLVER_OPTIMALITY_TOL: float = 1e-5
    SOLVER_MAX_OUTER: int = 50
    SOLVER_MAX_INNER: int = 500
    SOLVER_PENALTY_INIT: float = 10.0
    SOLVER_PENALTY_GROWTH: float = 10.0
    SOLVER_PENALTY_MAX: float = 1e12
    SOLVER_TAU_SCHEDULE: str = "[1e-2, 1e-4, 1e-6, 0.0]"
    SOLVER_TIME_LIMIT: float = 600.0
    SOLVER_LBFGS_MEMORY: int = 10
    SOLVER_VIOLATION_DECREASE: float = 0.5
    SOLVER_RESTORATION_MAX_EVALS: int = 100

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="HEATNET_",
        case_sensitive=True,
        extra="ignore",
    )

    @property
    def slack_families(self) -> List[str]:
        """Parse the slacked constraint families from JSON string"""
        try:
            return list(json.loads(self.SLACK_FAMILIES))
        except (TypeError, ValueError):
            return list(DEFAULT_SLACK_FAMILIES)

    @property
    def slack_weights(self) -> Dict[str, float]:
        """Parse per-family slack weights, falling back to the defaults per family"""
        weights = dict(DEFAULT_SLACK_WEIGHTS)
        try:
            weights.update({k: float(v) for k, v in json.loads(self.SLACK_WEIGHTS).items()})
        except (TypeError, ValueError, AttributeError):
            pass
        return weights

    @property
    def constraint_scales(self) -> Dict[str, float]:
        scales = dict(DEFAULT_CONSTRAINT_SCALES)
        try:
            scales.update({k: float(v) for k, v in json.loads(self.CONSTRAINT_SCALES).items()})
        except (TypeError, ValueError, AttributeError):
            pass
        return scales

    @property
    def tau_schedule(self) -> List[float]:
        try:
            return [float(t) for t in json.loads(self.SOLVER_TAU_SCHEDULE)]
        except (TypeError, ValueError):
            return [1e-2, 1e-4, 1e-6, 0.0]


settings = Settings()
