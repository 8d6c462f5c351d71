from enum import Enum


class Side(str, Enum):
    """Part of the network a node belongs to"""
    FORWARD = "forward_flow"
    BACKWARD = "backward_flow"


class ArcKind(str, Enum):
    PIPE = "pipe"
    CONSUMER = "consumer"
    DEPOT = "depot"


class Scheme(str, Enum):
    """Spatial discretization of the thermal energy equation"""
    IMPLICIT = "implicit"
    CENTRAL = "central"


class MixingModel(str, Enum):
    """Reformulation of the nodal temperature mixing rule"""
    MPCC = "mpcc"
    NLP = "nlp"


class InitialStateSource(str, Enum):
    STATIONARY = "stationary"
    GIVEN = "given"
