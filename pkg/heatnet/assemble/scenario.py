import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from heatnet.core.config import settings
from heatnet.core.exceptions import ScenarioError
from heatnet.network.graph import Network
from heatnet.network.loader import error_key
from heatnet.schemas.enums import InitialStateSource
from heatnet.schemas.scenario import ScenarioDocument

logger = logging.getLogger(__name__)


class Costs(BaseModel):
    """Currency per Wh"""
    model_config = ConfigDict(frozen=True)

    waste: float = Field(ge=0)
    gas: float = Field(ge=0)
    pump: float = Field(ge=0)


class Scenario(BaseModel):
    """
    Horizon, demand per consumer per time point, costs and relaxations.

    Demand series are equidistant samples on [0, T]; ``resampled(N)`` maps
    them onto the N+1 model time points.
    """
    model_config = ConfigDict(frozen=True)

    name: str = "scenario"
    horizon: float = Field(gt=0)
    demands: Dict[str, Tuple[float, ...]]
    costs: Costs
    temperature_relaxation: float = Field(default_factory=lambda: settings.TEMPERATURE_RELAXATION, gt=0)
    pressure_relaxation: float = Field(default_factory=lambda: settings.PRESSURE_RELAXATION, gt=0)
    initial_state: InitialStateSource = InitialStateSource.STATIONARY
    initial_values: Optional[Dict[str, float]] = None
    synthetic: bool = False

    @field_validator("demands")
    @classmethod
    def _nonnegative(cls, demands: Dict[str, Tuple[float, ...]]) -> Dict[str, Tuple[float, ...]]:
        for consumer, series in demands.items():
            if len(series) == 0:
                raise ValueError(f"empty demand series for {consumer}")
            if min(series) < 0:
                raise ValueError(f"negative demand for {consumer}")
        return demands

    def demand(self, consumer_id: str, i: int) -> float:
        return float(self.demands[consumer_id][i])

    def series_length(self) -> int:
        lengths = {len(s) for s in self.demands.values()}
        if len(lengths) > 1:
            raise ScenarioError(f"demand series have different lengths {sorted(lengths)}", key="demands")
        return lengths.pop() if lengths else 0

    def resampled(self, steps: int) -> "Scenario":
        grid = np.linspace(0.0, self.horizon, steps + 1)
        demands = {}
        for consumer, series in self.demands.items():
            values = np.asarray(series, dtype=float)
            if values.size == 1:
                demands[consumer] = tuple(float(values[0]) for _ in grid)
            else:
                samples = np.linspace(0.0, self.horizon, values.size)
                demands[consumer] = tuple(float(d) for d in np.interp(grid, samples, values))
        return self.model_copy(update={"demands": demands})

    def aggregated_demand(self) -> np.ndarray:
        n = self.series_length()
        total = np.zeros(n)
        for consumer in sorted(self.demands):
            total += np.asarray(self.demands[consumer], dtype=float)
        return total

    def validate_for(self, network: Network) -> None:
        known = {c.id for c in network.consumers}
        missing = sorted(known - set(self.demands))
        unknown = sorted(set(self.demands) - known)
        if missing:
            raise ScenarioError(f"no demand series for consumer(s) {missing}", key=f"demands.{missing[0]}")
        if unknown:
            raise ScenarioError(f"demand for unknown consumer(s) {unknown}", key=f"demands.{unknown[0]}")


def parse_scenario(text: Union[str, bytes, Mapping[str, Any]]) -> Scenario:
    try:
        if isinstance(text, Mapping):
            doc = ScenarioDocument.model_validate(text)
        else:
            doc = ScenarioDocument.model_validate_json(text)
    except ValidationError as exc:
        key = error_key(exc)
        raise ScenarioError(f"invalid scenario document at '{key}': {exc.errors()[0]['msg']}", key=key) from exc

    relaxation = {}
    if doc.relaxation.temperature is not None:
        relaxation["temperature_relaxation"] = doc.relaxation.temperature
    if doc.relaxation.pressure is not None:
        relaxation["pressure_relaxation"] = doc.relaxation.pressure
    return Scenario(
        name=doc.name,
        horizon=doc.horizon,
        demands={k: tuple(v) for k, v in doc.demands.items()},
        costs=Costs(**doc.costs.model_dump()),
        initial_state=InitialStateSource.GIVEN if doc.initial_state else InitialStateSource.STATIONARY,
        initial_values=doc.initial_state,
        synthetic=doc.synthetic,
        **relaxation,
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def scenario_to_document(scenario: Scenario) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "name": scenario.name,
        "horizon": scenario.horizon,
        "demands": {k: list(v) for k, v in sorted(scenario.demands.items())},
        "costs": scenario.costs.model_dump(),
        "relaxation": {
            "temperature": scenario.temperature_relaxation,
            "pressure": scenario.pressure_relaxation,
        },
        "synthetic": scenario.synthetic,
    }
    if scenario.initial_values:
        doc["initial_state"] = dict(scenario.initial_values)
    return doc


def dump_scenario(scenario: Scenario, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(scenario_to_document(scenario), indent=2), encoding="utf-8")
