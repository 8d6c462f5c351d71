from heatnet.presolve.bridges import BridgeDecomposition, bridges_and_components
from heatnet.presolve.directions import DirectionFixing, fix_flow_directions, no_fixing
from heatnet.presolve.simplification import (
    ArcSimplification,
    FlowDirection,
    FrictionForm,
    SimplificationPlan,
    simplification_plan,
)

__all__ = [
    "ArcSimplification",
    "BridgeDecomposition",
    "DirectionFixing",
    "FlowDirection",
    "FrictionForm",
    "SimplificationPlan",
    "bridges_and_components",
    "fix_flow_directions",
    "no_fixing",
    "simplification_plan",
]
