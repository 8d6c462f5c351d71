"""
Network file schema.

A network file is a JSON document with the top-level keys ``fluid``,
``nodes``, ``pipes``, ``consumers`` and ``depot``. All values are SI
(Pa, K, kg/s, W, m, s); unknown keys are rejected. See docs/network_schema.md.
"""

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, NonNegativeFloat
from typing import List, Optional, Tuple, Union

from heatnet.schemas.enums import Side


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)


class FluidDocument(_Document):
    """Constant water properties"""
    density: PositiveFloat = 997.0
    heat_capacity: PositiveFloat = 4180.0
    gravity: PositiveFloat = 9.81
    ambient_temp: PositiveFloat = 283.15


class NodeDocument(_Document):
    id: str = Field(min_length=1)
    side: Side
    pressure_bounds: Optional[Tuple[float, float]] = None
    temperature_bounds: Optional[Tuple[float, float]] = None


class PipeDocument(_Document):
    id: str = Field(min_length=1)
    tail: str = Field(alias="from")
    head: str = Field(alias="to")
    length: PositiveFloat
    diameter: PositiveFloat
    roughness: PositiveFloat
    slope: float = 0.0
    heat_transfer: NonNegativeFloat


class ConsumerDocument(_Document):
    id: str = Field(min_length=1)
    tail: str = Field(alias="from")
    head: str = Field(alias="to")
    return_temp: PositiveFloat
    min_inlet_temp: PositiveFloat


class DepotDocument(_Document):
    """Depot arc; a missing (null) power limit means unbounded"""
    id: str = Field(min_length=1)
    tail: str = Field(alias="from")
    head: str = Field(alias="to")
    stagnation_pressure: PositiveFloat
    max_waste_power: Optional[NonNegativeFloat] = None
    max_gas_power: Optional[NonNegativeFloat] = None
    max_pump_power: Optional[NonNegativeFloat] = None
    power_ramp: PositiveFloat
    temperature_ramp: PositiveFloat


class NetworkDocument(_Document):
    fluid: FluidDocument = FluidDocument()
    nodes: List[NodeDocument]
    pipes: List[PipeDocument] = []
    consumers: List[ConsumerDocument] = []
    depot: Union[DepotDocument, List[DepotDocument]]
