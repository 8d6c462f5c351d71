"""
Graph data model of a district heating network.

Nodes are split into the forward-flow (hot supply) and backward-flow
(return) sides. Pipes connect nodes of one side, consumer arcs lead from
the forward to the backward side and the single depot arc closes the loop
from the backward to the forward side.
"""

import logging
import math
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from heatnet.core.exceptions import NetworkValidationError, UnknownNodeError
from heatnet.schemas.enums import ArcKind, Side

logger = logging.getLogger(__name__)


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class Fluid(_Frozen):
    density: float = Field(997.0, gt=0)
    heat_capacity: float = Field(4180.0, gt=0)
    gravity: float = Field(9.81, gt=0)
    ambient_temp: float = Field(283.15, gt=0)


class Node(_Frozen):
    id: str
    side: Side
    pressure_bounds: Tuple[float, float]
    temperature_bounds: Tuple[float, float]

    @field_validator("pressure_bounds", "temperature_bounds")
    @classmethod
    def _finite_interval(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        lo, hi = value
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ValueError(f"bounds {value} must be a nonempty finite interval")
        return value


class PipeArc(_Frozen):
    id: str
    tail: str
    head: str
    length: float = Field(gt=0)
    diameter: float = Field(gt=0)
    roughness: float = Field(gt=0)
    slope: float = 0.0
    heat_transfer: float = Field(ge=0)

    @property
    def kind(self) -> ArcKind:
        return ArcKind.PIPE


class ConsumerArc(_Frozen):
    id: str
    tail: str
    head: str
    return_temp: float = Field(gt=0)
    min_inlet_temp: float = Field(gt=0)

    @model_validator(mode="after")
    def _inlet_above_return(self) -> "ConsumerArc":
        if not self.min_inlet_temp > self.return_temp:
            raise ValueError(
                f"consumer {self.id}: min_inlet_temp {self.min_inlet_temp} must exceed "
                f"return_temp {self.return_temp}"
            )
        return self

    @property
    def kind(self) -> ArcKind:
        return ArcKind.CONSUMER


class DepotArc(_Frozen):
    id: str
    tail: str
    head: str
    stagnation_pressure: float = Field(gt=0)
    max_waste_power: float = Field(math.inf, ge=0)
    max_gas_power: float = Field(math.inf, ge=0)
    max_pump_power: float = Field(math.inf, ge=0)
    power_ramp: float = Field(gt=0)
    temperature_ramp: float = Field(gt=0)

    @property
    def max_powers(self) -> Tuple[float, float, float]:
        return (self.max_waste_power, self.max_gas_power, self.max_pump_power)

    @property
    def kind(self) -> ArcKind:
        return ArcKind.DEPOT


Arc = Union[PipeArc, ConsumerArc, DepotArc]

# (tail side, head side) required per arc kind
_SIDE_RULES = {
    ArcKind.CONSUMER: (Side.FORWARD, Side.BACKWARD),
    ArcKind.DEPOT: (Side.BACKWARD, Side.FORWARD),
}


class Network:
    """
    Immutable, validated network.

    Identifiers are mapped to dense indices in sorted key order, so two
    networks built from the same data in any input order are identical.
    """

    def __init__(
        self,
        nodes: Sequence[Node],
        pipes: Sequence[PipeArc],
        consumers: Sequence[ConsumerArc],
        depot: DepotArc,
        fluid: Optional[Fluid] = None,
        name: str = "network",
    ):
        self.name = name
        self.fluid = fluid or Fluid()
        self.nodes: Tuple[Node, ...] = tuple(sorted(nodes, key=lambda n: n.id))
        self.pipes: Tuple[PipeArc, ...] = tuple(sorted(pipes, key=lambda a: a.id))
        self.consumers: Tuple[ConsumerArc, ...] = tuple(sorted(consumers, key=lambda a: a.id))
        self.depot = depot

        self.node_index: Dict[str, int] = {}
        for node in self.nodes:
            if node.id in self.node_index:
                raise NetworkValidationError(f"duplicate node id '{node.id}'", key=node.id)
            self.node_index[node.id] = len(self.node_index)

        arcs: List[Arc] = [*self.pipes, *self.consumers, self.depot]
        self.arcs: Tuple[Arc, ...] = tuple(sorted(arcs, key=lambda a: a.id))
        self.arc_index: Dict[str, int] = {}
        for arc in self.arcs:
            if arc.id in self.arc_index:
                raise NetworkValidationError(f"duplicate arc id '{arc.id}'", key=arc.id)
            self.arc_index[arc.id] = len(self.arc_index)
        self._arcs_by_id: Dict[str, Arc] = {arc.id: arc for arc in self.arcs}

        self._in: Dict[str, List[str]] = {node.id: [] for node in self.nodes}
        self._out: Dict[str, List[str]] = {node.id: [] for node in self.nodes}
        self._validate()

    # ------------------------------------------------------------------ #
    def _validate(self) -> None:
        nodes = {node.id: node for node in self.nodes}
        for arc in self.arcs:
            for end in (arc.tail, arc.head):
                if end not in nodes:
                    raise NetworkValidationError(
                        f"arc '{arc.id}' references unknown node '{end}'", key=arc.id
                    )
            if arc.tail == arc.head:
                raise NetworkValidationError(f"arc '{arc.id}' is a self-loop", key=arc.id)

            tail_side, head_side = nodes[arc.tail].side, nodes[arc.head].side
            if arc.kind is ArcKind.PIPE:
                ok = tail_side == head_side
            else:
                ok = (tail_side, head_side) == _SIDE_RULES[arc.kind]
            if not ok:
                raise NetworkValidationError(
                    f"side-rule violation on {arc.kind.value} arc '{arc.id}': "
                    f"{arc.tail} ({tail_side.value}) -> {arc.head} ({head_side.value})",
                    key=arc.id,
                )
            self._out[arc.tail].append(arc.id)
            self._in[arc.head].append(arc.id)

        for node in self.nodes:
            if not self._in[node.id] and not self._out[node.id]:
                raise NetworkValidationError(f"node '{node.id}' has no incident arc", key=node.id)

        if not nx.is_weakly_connected(self.to_digraph()):
            raise NetworkValidationError("network graph is not connected", key="nodes")

    # ------------------------------------------------------------------ #
    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[self.node_index[node_id]]
        except KeyError:
            raise UnknownNodeError(f"unknown node '{node_id}'", key=node_id) from None

    def arc(self, arc_id: str) -> Arc:
        try:
            return self._arcs_by_id[arc_id]
        except KeyError:
            raise NetworkValidationError(f"unknown arc '{arc_id}'", key=arc_id) from None

    def incidence(self, node_id: str) -> Tuple[FrozenSet[str], FrozenSet[str]]:
        """Return (δ_in, δ_out): arcs with head resp. tail at the node"""
        if node_id not in self.node_index:
            raise UnknownNodeError(f"unknown node '{node_id}'", key=node_id)
        return frozenset(self._in[node_id]), frozenset(self._out[node_id])

    def incident_arcs(self, node_id: str) -> Iterator[Tuple[Arc, bool]]:
        """Yield (arc, at_head) for every arc at the node, sorted by arc id"""
        delta_in, delta_out = self.incidence(node_id)
        for arc_id in sorted(delta_in | delta_out):
            yield self._arcs_by_id[arc_id], arc_id in delta_in

    def to_digraph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(node.id for node in self.nodes)
        for arc in self.arcs:
            graph.add_edge(arc.tail, arc.head, key=arc.id, kind=arc.kind)
        return graph

    @property
    def total_pipe_length(self) -> float:
        return math.fsum(pipe.length for pipe in self.pipes)

    def counts(self) -> Dict[str, int]:
        return {
            "nodes": len(self.nodes),
            "arcs": len(self.arcs),
            "pipes": len(self.pipes),
            "consumers": len(self.consumers),
            "depots": 1,
        }

    def __repr__(self) -> str:
        c = self.counts()
        return f"Network({self.name!r}, nodes={c['nodes']}, arcs={c['arcs']})"
