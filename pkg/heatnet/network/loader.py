import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Union

from pydantic import ValidationError

from heatnet.core.config import settings
from heatnet.core.exceptions import NetworkValidationError
from heatnet.network.graph import ConsumerArc, DepotArc, Fluid, Network, Node, PipeArc
from heatnet.schemas.network import DepotDocument, NetworkDocument

logger = logging.getLogger(__name__)


def error_key(exc: ValidationError) -> str:
    """Dotted key path of the first pydantic error, e.g. ``pipes.2.diameter``"""
    errors = exc.errors()
    if not errors:
        return ""
    return ".".join(str(part) for part in errors[0]["loc"])


def parse_network(text: Union[str, bytes, Mapping[str, Any]], name: str = "network") -> Network:
    """
    Parse and validate a network document.

    Raises:
        NetworkValidationError: schema violation (with key path), more than one
            depot, unknown endpoints, side-rule violations, isolated nodes or a
            disconnected graph
    """
    try:
        if isinstance(text, Mapping):
            document = NetworkDocument.model_validate(text)
        else:
            document = NetworkDocument.model_validate_json(text)
    except ValidationError as exc:
        key = error_key(exc)
        raise NetworkValidationError(f"invalid network document at '{key}': {exc.errors()[0]['msg']}", key=key) from exc

    depots = document.depot if isinstance(document.depot, list) else [document.depot]
    if len(depots) != 1:
        raise NetworkValidationError(
            f"exactly one depot arc required, found {len(depots)}", key="depot"
        )

    try:
        nodes = [
            Node(
                id=n.id,
                side=n.side,
                pressure_bounds=n.pressure_bounds or (settings.NODE_PRESSURE_MIN, settings.NODE_PRESSURE_MAX),
                temperature_bounds=n.temperature_bounds
                or (settings.NODE_TEMPERATURE_MIN, settings.NODE_TEMPERATURE_MAX),
            )
            for n in document.nodes
        ]
        pipes = [PipeArc(**p.model_dump()) for p in document.pipes]
        consumers = [ConsumerArc(**c.model_dump()) for c in document.consumers]
        depot = _depot_arc(depots[0])
    except ValidationError as exc:
        raise NetworkValidationError(f"invalid network element: {exc.errors()[0]['msg']}", key=error_key(exc)) from exc

    network = Network(
        nodes=nodes,
        pipes=pipes,
        consumers=consumers,
        depot=depot,
        fluid=Fluid(**document.fluid.model_dump()),
        name=name,
    )
    logger.info(f"✅ Loaded {network!r}")
    return network


def _depot_arc(doc: DepotDocument) -> DepotArc:
    data = doc.model_dump()
    for field in ("max_waste_power", "max_gas_power", "max_pump_power"):
        if data[field] is None:
            data[field] = math.inf
    return DepotArc(**data)


def load_network(path: Union[str, Path]) -> Network:
    path = Path(path)
    return parse_network(path.read_text(encoding="utf-8"), name=path.stem)


def network_to_document(network: Network) -> Dict[str, Any]:
    """Inverse of ``parse_network`` (JSON-ready dictionary)"""
    depot = network.depot

    def finite(value: float):
        return None if math.isinf(value) else value

    return {
        "fluid": network.fluid.model_dump(),
        "nodes": [
            {
                "id": n.id,
                "side": n.side.value,
                "pressure_bounds": list(n.pressure_bounds),
                "temperature_bounds": list(n.temperature_bounds),
            }
            for n in network.nodes
        ],
        "pipes": [
            {
                "id": p.id,
                "from": p.tail,
                "to": p.head,
                "length": p.length,
                "diameter": p.diameter,
                "roughness": p.roughness,
                "slope": p.slope,
                "heat_transfer": p.heat_transfer,
            }
            for p in network.pipes
        ],
        "consumers": [
            {
                "id": c.id,
                "from": c.tail,
                "to": c.head,
                "return_temp": c.return_temp,
                "min_inlet_temp": c.min_inlet_temp,
            }
            for c in network.consumers
        ],
        "depot": {
            "id": depot.id,
            "from": depot.tail,
            "to": depot.head,
            "stagnation_pressure": depot.stagnation_pressure,
            "max_waste_power": finite(depot.max_waste_power),
            "max_gas_power": finite(depot.max_gas_power),
            "max_pump_power": finite(depot.max_pump_power),
            "power_ramp": depot.power_ramp,
            "temperature_ramp": depot.temperature_ramp,
        },
    }


def dump_network(network: Network, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(network_to_document(network), indent=2), encoding="utf-8")
