from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat
from typing import Dict, List, Optional


class CostDocument(BaseModel):
    """Cost coefficients in currency per Wh"""
    model_config = ConfigDict(extra="forbid")

    waste: NonNegativeFloat
    gas: NonNegativeFloat
    pump: NonNegativeFloat


class RelaxationDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    temperature: Optional[PositiveFloat] = None
    pressure: Optional[PositiveFloat] = None


class ScenarioDocument(BaseModel):
    """
    Scenario file: horizon, demand samples per consumer, costs.

    Demand samples are equidistant over the horizon (first sample at t=0,
    last at t=horizon) and are resampled onto the model grid.
    ``initial_state`` maps time-free variable keys (e.g. ``v[p1]``) to values.
    """
    model_config = ConfigDict(extra="forbid")

    name: str = "scenario"
    horizon: PositiveFloat
    demands: Dict[str, List[NonNegativeFloat]] = Field(default_factory=dict)
    costs: CostDocument
    relaxation: RelaxationDocument = RelaxationDocument()
    initial_state: Optional[Dict[str, float]] = None
    synthetic: bool = False
