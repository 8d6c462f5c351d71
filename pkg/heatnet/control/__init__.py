from heatnet.control.full_horizon import full_horizon
from heatnet.control.instantaneous import instantaneous_control
from heatnet.control.penalty import PenalizedSolve, reweight, solve_with_reweighting
from heatnet.control.state import ControlTrajectory, StateSnapshot
from heatnet.control.stationary import StationaryRun, heuristic_guess, solve_stationary, stationary_state

__all__ = [
    "ControlTrajectory",
    "PenalizedSolve",
    "StateSnapshot",
    "StationaryRun",
    "full_horizon",
    "heuristic_guess",
    "instantaneous_control",
    "reweight",
    "solve_stationary",
    "solve_with_reweighting",
    "stationary_state",
]
