from heatnet.network.graph import (
    ConsumerArc,
    DepotArc,
    Fluid,
    Network,
    Node,
    PipeArc,
)
from heatnet.network.loader import load_network, network_to_document, parse_network
from heatnet.network.physics import cross_section, friction_factor

__all__ = [
    "ConsumerArc",
    "DepotArc",
    "Fluid",
    "Network",
    "Node",
    "PipeArc",
    "cross_section",
    "friction_factor",
    "load_network",
    "network_to_document",
    "parse_network",
]
