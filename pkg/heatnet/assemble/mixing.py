"""
Nodal temperature mixing.

Two reformulations of "outflow temperature equals the flow-weighted mean of
the inflow temperatures":

* ``mixing_mpcc``: flows split into positive and negative parts with
  complementarity, mixing equality with cleared denominator;
* ``mixing_nlp``: energy balance plus temperature-difference variables that
  are forced to |θ_{a:u} - θ_u| and must vanish on outflow arcs.

Sign-fixed arcs take the substituted forms: an outflow end gets the plain
equality θ_{a:u} = θ_u, an inflow end contributes only to the mixture.
"""

from dataclasses import dataclass
from typing import List, Optional

from heatnet.assemble.context import AssemblyContext
from heatnet.nlp.expr import Expr, const, sum_exprs
from heatnet.nlp.model import Constraint, Family, Relation
from heatnet.nlp.slacks import default_slack_policy
from heatnet.presolve.simplification import FlowDirection
from heatnet.schemas.enums import ArcKind, MixingModel

# nominal size of v·Δθ (m/s · K)
VELOCITY_TEMPERATURE_SCALE = 10.0


@dataclass(frozen=True)
class IncidentArc:
    """One arc end at a node, with the expressions the mixing rows need"""
    arc_id: str
    at_head: bool
    direction: FlowDirection
    flow: Expr
    velocity: Expr
    temp: Expr
    q_pos: Optional[Expr] = None
    q_neg: Optional[Expr] = None
    dtheta: Optional[Expr] = None

    @property
    def is_outflow(self) -> bool:
        """Sign-fixed arc leaving the node in flow direction"""
        if self.direction is FlowDirection.FREE:
            return False
        return (self.direction is FlowDirection.POS) != self.at_head

    @property
    def inflow_part(self) -> Expr:
        return self.q_pos if self.at_head else self.q_neg

    @property
    def outflow_part(self) -> Expr:
        return self.q_neg if self.at_head else self.q_pos


def _row(expr: Expr, relation: Relation, name: str, scale: float, family: Family = Family.MIXING) -> Constraint:
    return Constraint(
        expr=expr,
        relation=relation,
        family=family,
        slack_policy=default_slack_policy(family.value, relation),
        scale=scale,
        name=name,
    )


def _is_zero(expr: Expr) -> bool:
    return expr.is_const and expr.param == 0.0


def _propagation(arc: IncidentArc, theta_u: Expr, label: str, scale: float) -> Constraint:
    return _row(arc.temp - theta_u, Relation.EQ, f"propagate[{label}][{arc.arc_id}]", scale)


def mixing_mpcc(
    theta_u: Expr,
    arcs: List[IncidentArc],
    label: str = "u",
    mixing_scale: float = 1e3,
    temperature_scale: float = 1.0,
) -> List[Constraint]:
    rows: List[Constraint] = []
    inflow = [(a.inflow_part, a.temp) for a in arcs if not _is_zero(a.inflow_part)]
    if inflow:
        total = sum_exprs(w for w, _ in inflow)
        mixed = sum_exprs(w * t for w, t in inflow)
        rows.append(_row(theta_u * total - mixed, Relation.EQ, f"mix[{label}]", mixing_scale))
    for arc in arcs:
        if arc.direction is FlowDirection.FREE:
            product = arc.outflow_part * (arc.temp - theta_u)
            rows.append(_row(product, Relation.EQ, f"outflow[{label}][{arc.arc_id}]", mixing_scale))
        elif arc.is_outflow:
            rows.append(_propagation(arc, theta_u, label, temperature_scale))
    return rows


def mixing_nlp(
    theta_u: Expr,
    arcs: List[IncidentArc],
    label: str = "u",
    mixing_scale: float = 1e3,
    temperature_scale: float = 1.0,
) -> List[Constraint]:
    rows: List[Constraint] = []
    inflow = sum_exprs(a.flow * a.temp for a in arcs if a.at_head)
    outflow = sum_exprs(a.flow * a.temp for a in arcs if not a.at_head)
    balance = inflow - outflow
    if not balance.is_const:
        rows.append(_row(balance, Relation.EQ, f"mix[{label}]", mixing_scale))
    for arc in arcs:
        if arc.direction is FlowDirection.FREE:
            # flow·Δθ must not be positive on outflow: head end v·Δθ >= 0, tail end -v·Δθ >= 0
            vd = arc.velocity * arc.dtheta
            tag = f"[{label}][{arc.arc_id}]"
            rows.append(_row(vd if arc.at_head else -vd, Relation.GE, f"dtheta_flow{tag}", VELOCITY_TEMPERATURE_SCALE))
            rows.append(_row(arc.dtheta - (arc.temp - theta_u), Relation.GE, f"dtheta_upper{tag}", temperature_scale))
            rows.append(_row(arc.dtheta - (theta_u - arc.temp), Relation.GE, f"dtheta_lower{tag}", temperature_scale))
        elif arc.is_outflow:
            rows.append(_propagation(arc, theta_u, label, temperature_scale))
    return rows


def incident_arcs(ctx: AssemblyContext, node_id: str, i: int) -> List[IncidentArc]:
    mpcc = ctx.plan.mixing is MixingModel.MPCC
    arcs: List[IncidentArc] = []
    for arc, at_head in ctx.network.incident_arcs(node_id):
        direction = ctx.direction(arc)
        flow = ctx.flow(arc, i)
        velocity = ctx.value(("v", arc.id), i) if arc.kind is ArcKind.PIPE else flow
        q_pos = q_neg = dtheta = None
        if direction is FlowDirection.POS:
            q_pos, q_neg = flow, const(0.0)
        elif direction is FlowDirection.NEG:
            q_pos, q_neg = const(0.0), -flow
        elif mpcc:
            q_pos, q_neg = ctx.value(("q_pos", arc.id), i), ctx.value(("q_neg", arc.id), i)
        else:
            dtheta = ctx.value(("dtheta_head" if at_head else "dtheta_tail", arc.id), i)
        arcs.append(
            IncidentArc(
                arc_id=arc.id,
                at_head=at_head,
                direction=direction,
                flow=flow,
                velocity=velocity,
                temp=ctx.end_temperature(arc, at_head, i),
                q_pos=q_pos,
                q_neg=q_neg,
                dtheta=dtheta,
            )
        )
    return arcs


def node_mixing(ctx: AssemblyContext, node_id: str, i: int) -> List[Constraint]:
    theta_u = ctx.value(("theta", node_id), i)
    arcs = incident_arcs(ctx, node_id, i)
    label = f"{node_id}][t={i}"
    scales = dict(mixing_scale=ctx.scale("mixing"), temperature_scale=ctx.scale("temperature"))
    if ctx.plan.mixing is MixingModel.MPCC:
        return mixing_mpcc(theta_u, arcs, label, **scales)
    return mixing_nlp(theta_u, arcs, label, **scales)


def flow_split(ctx: AssemblyContext, pipe_id: str, i: int) -> List[Constraint]:
    """q = q⁺ - q⁻ and q⁺q⁻ = 0 for an undecided pipe (q⁺, q⁻ >= 0 are bounds)"""
    pipe = ctx.network.arc(pipe_id)
    q_pos = ctx.value(("q_pos", pipe_id), i)
    q_neg = ctx.value(("q_neg", pipe_id), i)
    tag = f"[{pipe_id}][t={i}]"
    return [
        _row(ctx.flow(pipe, i) - q_pos + q_neg, Relation.EQ, f"split{tag}",
             ctx.scale("mass_balance"), Family.MASS_BALANCE),
        _row(q_pos * q_neg, Relation.EQ, f"complementarity{tag}",
             ctx.scale("complementarity"), Family.COMPLEMENTARITY),
    ]
