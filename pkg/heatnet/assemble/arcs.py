"""Mass balance, consumer, depot and ramp rows"""

from typing import List

from heatnet.assemble.context import AssemblyContext
from heatnet.nlp.expr import Expr, sum_exprs
from heatnet.nlp.model import Constraint, Family, Relation


def mass_balance(ctx: AssemblyContext, node_id: str, i: int) -> Expr:
    """Σ_in q - Σ_out q at node u"""
    delta_in, delta_out = ctx.network.incidence(node_id)
    arcs = ctx.network.arc
    inflow = sum_exprs(ctx.flow(arcs(a), i) for a in sorted(delta_in))
    outflow = sum_exprs(ctx.flow(arcs(a), i) for a in sorted(delta_out))
    return inflow - outflow


def consumer_constraints(ctx: AssemblyContext, arc_id: str, i: int) -> List[Constraint]:
    """
    Power withdrawal and pressure drop of one consumer.

    q >= 0, the relaxed return temperature and the minimum inlet temperature
    are variable bounds.
    """
    arc = ctx.network.arc(arc_id)
    q = ctx.value(("q", arc_id), i)
    drop = ctx.value(("theta_tail", arc_id), i) - ctx.value(("theta_head", arc_id), i)
    power = ctx.fluid.heat_capacity * (q * drop) - ctx.scenario.demand(arc_id, i)
    pressure = ctx.value(("p", arc.tail), i) - ctx.value(("p", arc.head), i)
    tag = f"[{arc_id}][t={i}]"
    return [
        ctx.constraint(power, Relation.EQ, Family.CONSUMER, f"consumer_power{tag}"),
        ctx.constraint(pressure, Relation.GE, Family.PRESSURE, f"consumer_pressure{tag}"),
    ]


def depot_constraints(ctx: AssemblyContext, i: int) -> List[Constraint]:
    """Pump power and heat power balance; stagnation pressure interval is a bound"""
    depot = ctx.network.depot
    q = ctx.value(("q", depot.id), i)
    lift = ctx.value(("p", depot.head), i) - ctx.value(("p", depot.tail), i)
    heating = ctx.value(("theta_head", depot.id), i) - ctx.value(("theta_tail", depot.id), i)
    pump = ctx.value(("P_p",), i) - (q * lift) / ctx.fluid.density
    heat = (
        ctx.value(("P_w",), i)
        + ctx.value(("P_g",), i)
        - ctx.fluid.heat_capacity * (q * heating)
    )
    tag = f"[{depot.id}][t={i}]"
    return [
        ctx.constraint(pump, Relation.EQ, Family.DEPOT, f"depot_pump{tag}"),
        ctx.constraint(heat, Relation.EQ, Family.DEPOT, f"depot_heat{tag}"),
    ]


def ramp_constraints(ctx: AssemblyContext, i: int) -> List[Constraint]:
    """
    |P_w(t_{i+1}) - P_w(t_i)| <= ξ_P Δt and the same for the outlet
    temperature with ξ_θ, each split into two linear rows.
    """
    depot = ctx.network.depot
    old, new = i, i + 1
    rows = []
    limits = (
        ("power", ("P_w",), depot.power_ramp, ctx.scale("depot")),
        ("temperature", ("theta_head", depot.id), depot.temperature_ramp, ctx.scale("ramp")),
    )
    for label, key, rate, scale in limits:
        change = ctx.value(key, new) - ctx.value(key, old)
        budget = rate * ctx.dt
        rows.append(ctx.constraint(budget - change, Relation.GE, Family.RAMP, f"ramp_{label}_up[t={i}]", scale))
        rows.append(ctx.constraint(budget + change, Relation.GE, Family.RAMP, f"ramp_{label}_down[t={i}]", scale))
    return rows
