from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, List, Optional

from heatnet.schemas.enums import MixingModel, Scheme


class StepTimeStats(BaseModel):
    """Statistics over per-step instantaneous-control solve times (seconds)"""
    mean: float = 0.0
    median: float = 0.0
    min: float = 0.0
    max: float = 0.0


class SolveReport(BaseModel):
    """
    Summary of one run: wall times and solve counts per phase, objective,
    control cost and feasibility.

    Fields of skipped phases stay ``None`` and are omitted on output.
    """
    network: str
    scenario: str
    scheme: Scheme
    mixing: MixingModel
    presolve: bool
    time_steps: int
    t_all: float
    t_nlp: Optional[float] = None
    t_ic: Optional[float] = None
    ic_steps: Optional[int] = None
    ic_step_times: Optional[StepTimeStats] = None
    t_stat: Optional[float] = None
    stat_steps: Optional[int] = None
    objective: Optional[float] = None
    cost: Optional[float] = None
    ic_objective: Optional[float] = None
    ic_cost: Optional[float] = None
    slack_norm: Optional[float] = None
    ic_feasible: Optional[bool] = None
    feasible_tol: Optional[bool] = None
    status: Optional[str] = None
    zero_inflow_nodes: List[str] = Field(default_factory=list)


class RunConfig(BaseModel):
    """Options of one CLI invocation"""
    model_config = ConfigDict(frozen=True)

    network: str
    scenario: str
    out: str = "out"
    dt: float = 1800.0
    dx: float = 150.0
    scheme: Scheme = Scheme.CENTRAL
    mixing: MixingModel = MixingModel.NLP
    presolve: bool = True
    ic_only: bool = False
    skip_ic: bool = False
    verbose: bool = False
    seed: int = 0
    solver_overrides: Dict[str, float] = Field(default_factory=dict)
    dump_model: Optional[str] = None
