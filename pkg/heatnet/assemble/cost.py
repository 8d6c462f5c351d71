"""Discretized control cost with the trapezoidal rule (Δt in hours, costs per Wh)"""

from typing import Iterable, Sequence

import numpy as np

from heatnet.assemble.context import AssemblyContext
from heatnet.assemble.scenario import Costs
from heatnet.nlp.expr import Expr, sum_exprs

POWER_KEYS = (("P_w",), ("P_g",), ("P_p",))


def _coefficients(costs: Costs):
    return (costs.waste, costs.gas, costs.pump)


def trapezoidal_cost(ctx: AssemblyContext, steps: Iterable[int]) -> Expr:
    """(Δt/2) Σ_i Σ_k c_k (P_k(t_i) + P_k(t_{i+1})) over the given steps"""
    terms = []
    for i in steps:
        for key, c in zip(POWER_KEYS, _coefficients(ctx.scenario.costs)):
            if c:
                terms.append(c * (ctx.value(key, i) + ctx.value(key, i + 1)))
    return (ctx.disc.dt_hours / 2.0) * sum_exprs(terms)


def stationary_cost(ctx: AssemblyContext, i: int) -> Expr:
    """Cost rate of one time point over one hour"""
    return sum_exprs(
        c * ctx.value(key, i)
        for key, c in zip(POWER_KEYS, _coefficients(ctx.scenario.costs))
        if c
    )


def trajectory_cost(costs: Costs, dt: float, waste: Sequence[float], gas: Sequence[float],
                    pump: Sequence[float]) -> float:
    """Numeric counterpart of ``trapezoidal_cost`` for power series on the time grid"""
    total = 0.0
    for c, series in zip(_coefficients(costs), (waste, gas, pump)):
        values = np.asarray(series, dtype=float)
        if values.size > 1:
            total += c * float(np.sum(values[:-1] + values[1:]))
    return dt / 3600.0 / 2.0 * total
