import logging
from typing import Dict, List, Mapping, Optional, Tuple

from heatnet.assemble.discretization import Discretization
from heatnet.assemble.layout import QUANTITY_SCALES, VarKey, VariableLayout, layer_keys, variable_name
from heatnet.assemble.scenario import Scenario
from heatnet.core.config import settings
from heatnet.core.exceptions import ScenarioError
from heatnet.network.graph import Arc, Network
from heatnet.network.physics import cross_section, friction_factor
from heatnet.nlp.expr import Expr, const, var
from heatnet.nlp.model import Constraint, Family, Relation, Variable
from heatnet.nlp.slacks import default_slack_policy
from heatnet.presolve.simplification import FlowDirection, SimplificationPlan
from heatnet.schemas.enums import ArcKind

logger = logging.getLogger(__name__)


class AssemblyContext:
    """
    Mutable state while one model is built.

    Time layers are either variable (``add_layer``) or fixed to known values
    (``fixed``), in which case ``value`` substitutes constants. In stationary
    mode the single layer is used on both sides of every time difference,
    which removes the time terms.
    """

    def __init__(
        self,
        network: Network,
        scenario: Scenario,
        disc: Discretization,
        plan: SimplificationPlan,
        fixed: Optional[Mapping[int, Mapping[VarKey, float]]] = None,
        stationary: bool = False,
    ):
        self.network = network
        self.scenario = scenario
        self.disc = disc
        self.plan = plan
        self.fluid = network.fluid
        self.fixed: Dict[int, Dict[VarKey, float]] = {i: dict(v) for i, v in (fixed or {}).items()}
        self.stationary = stationary

        self.keys = layer_keys(network, disc, plan)
        self.layout = VariableLayout(self.keys)
        self.variables: List[Variable] = []
        self.constraints: List[Constraint] = []
        self.scales = settings.constraint_scales
        self._vars: Dict[Tuple[VarKey, int], Expr] = {}

        self.friction = {p.id: friction_factor(p) for p in network.pipes}
        self.area = {p.id: cross_section(p) for p in network.pipes}

    # ------------------------------------------------------------------ #
    def add_layer(self, i: int, initial: Optional[Mapping[VarKey, float]] = None) -> None:
        for key in self.keys:
            lo, hi = self.bounds(key)
            start = initial.get(key) if initial else None
            index = len(self.variables)
            self.variables.append(
                Variable(variable_name(key, i), lo, hi, start, QUANTITY_SCALES.get(key[0], 1.0))
            )
            self.layout.add(key, i, index)
            self._vars[(key, i)] = var(index)

    def value(self, key: VarKey, i: int) -> Expr:
        expr = self._vars.get((key, i))
        if expr is not None:
            return expr
        if i in self.fixed:
            try:
                return const(self.fixed[i][key])
            except KeyError:
                raise ScenarioError(
                    f"fixed time layer {i} has no value for {variable_name(key, i)}",
                    key=variable_name(key, i),
                ) from None
        raise KeyError(f"time layer {i} is neither variable nor fixed")

    def step_layers(self, i: int) -> Tuple[int, int]:
        """(old, new) layer of the step starting at i"""
        return (i, i) if self.stationary else (i, i + 1)

    def direction(self, arc: Arc) -> FlowDirection:
        if arc.kind is not ArcKind.PIPE:
            return FlowDirection.POS
        return self.plan.direction(arc.id)

    def flow(self, arc: Arc, i: int) -> Expr:
        """Signed mass flow q_a in arc orientation"""
        if arc.kind is ArcKind.PIPE:
            return (self.area[arc.id] * self.fluid.density) * self.value(("v", arc.id), i)
        return self.value(("q", arc.id), i)

    def end_temperature(self, arc: Arc, at_head: bool, i: int) -> Expr:
        """θ_{a:u} for the arc end at node u"""
        if arc.kind is ArcKind.PIPE:
            k = self.disc.cells_of(arc) if at_head else 0
            return self.value(("theta_pipe", arc.id, k), i)
        return self.value(("theta_head" if at_head else "theta_tail", arc.id), i)

    # ------------------------------------------------------------------ #
    def scale(self, family: str) -> float:
        return float(self.scales.get(family, 1.0))

    def constraint(
        self,
        expr: Expr,
        relation: Relation,
        family: Family,
        name: str,
        scale: Optional[float] = None,
    ) -> Constraint:
        return Constraint(
            expr=expr,
            relation=relation,
            family=family,
            slack_policy=default_slack_policy(family.value, relation),
            scale=self.scale(family.value) if scale is None else scale,
            name=name,
        )

    def add(self, expr: Expr, relation: Relation, family: Family, name: str, scale: Optional[float] = None) -> None:
        self.extend([self.constraint(expr, relation, family, name, scale)])

    def extend(self, constraints: List[Constraint]) -> None:
        # constant rows (every arc substituted) have nothing to enforce
        self.constraints.extend(c for c in constraints if not c.expr.is_const)

    # ------------------------------------------------------------------ #
    def bounds(self, key: VarKey) -> Tuple[float, float]:
        quantity = key[0]
        net = self.network
        if quantity == "v":
            vb = settings.VELOCITY_BOUND
            direction = self.plan.direction(key[1])
            if direction is FlowDirection.POS:
                return 0.0, vb
            if direction is FlowDirection.NEG:
                return -vb, 0.0
            return -vb, vb
        if quantity == "theta_pipe":
            pipe = net.arc(key[1])
            lo_t, hi_t = net.node(pipe.tail).temperature_bounds
            lo_h, hi_h = net.node(pipe.head).temperature_bounds
            return min(lo_t, lo_h), max(hi_t, hi_h)
        if quantity == "p":
            lo, hi = net.node(key[1]).pressure_bounds
            if key[1] == net.depot.tail:
                ps, eps = net.depot.stagnation_pressure, self.scenario.pressure_relaxation
                lo, hi = max(lo, ps - eps), min(hi, ps + eps)
                if lo > hi:
                    raise ScenarioError(
                        f"stagnation pressure {ps} Pa lies outside the bounds of node '{key[1]}'",
                        key=key[1],
                    )
            return lo, hi
        if quantity == "theta":
            return net.node(key[1]).temperature_bounds
        if quantity in ("q", "q_pos", "q_neg"):
            return 0.0, settings.MASS_FLOW_BOUND
        if quantity in ("theta_tail", "theta_head"):
            return self._arc_temperature_bounds(net.arc(key[1]), quantity == "theta_head")
        if quantity in ("dtheta_tail", "dtheta_head"):
            return 0.0, settings.TEMPERATURE_DIFFERENCE_BOUND
        if quantity in ("P_w", "P_g", "P_p"):
            limit = dict(zip(("P_w", "P_g", "P_p"), net.depot.max_powers))[quantity]
            return 0.0, limit
        raise KeyError(f"unknown quantity '{quantity}'")

    def _arc_temperature_bounds(self, arc: Arc, head: bool) -> Tuple[float, float]:
        node = self.network.node(arc.head if head else arc.tail)
        lo, hi = node.temperature_bounds
        if arc.kind is ArcKind.CONSUMER:
            if head:
                eps = self.scenario.temperature_relaxation
                return arc.return_temp - eps, arc.return_temp + eps
            lo = max(lo, arc.min_inlet_temp)
            if lo > hi:
                raise ScenarioError(
                    f"consumer '{arc.id}' needs {arc.min_inlet_temp} K above the node bound {hi} K",
                    key=arc.id,
                )
        return lo, hi

    @property
    def dt(self) -> float:
        return self.disc.dt
