from heatnet.solver.auglag import solve
from heatnet.solver.config import SolverConfig
from heatnet.solver.mpcc import complementarity_rows, solve_mpcc
from heatnet.solver.result import IterationRecord, SolveResult, SolveStatus, WarmStart

__all__ = [
    "IterationRecord",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "WarmStart",
    "complementarity_rows",
    "solve",
    "solve_mpcc",
]
