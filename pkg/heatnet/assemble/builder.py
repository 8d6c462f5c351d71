"""
Model builders.

``assemble`` builds the complete space-time model, ``assemble_step`` the
one-period model of instantaneous control and ``assemble_stationary`` the
time-free model of one time point. All three share the row generators in
``pipes``, ``mixing`` and ``arcs``.

Registered momentum rows are the residual times L (Pa) and registered
energy rows the residual times Δt (K); the zero sets are unchanged and the
slack weights act on pressure and temperature units.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np

from heatnet.assemble.arcs import consumer_constraints, depot_constraints, mass_balance, ramp_constraints
from heatnet.assemble.context import AssemblyContext
from heatnet.assemble.cost import stationary_cost, trapezoidal_cost
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.layout import VarKey, VariableLayout
from heatnet.assemble.mixing import flow_split, node_mixing
from heatnet.assemble.pipes import energy_points, energy_residual, momentum_residual
from heatnet.assemble.scenario import Scenario
from heatnet.core.exceptions import ScenarioError
from heatnet.network.graph import Network
from heatnet.network.physics import cross_section
from heatnet.nlp.model import Family, NlpModel, Relation
from heatnet.presolve.directions import DirectionFixing, no_fixing
from heatnet.presolve.simplification import SimplificationPlan, simplification_plan
from heatnet.schemas.enums import ArcKind, MixingModel

logger = logging.getLogger(__name__)

Layer = Mapping[VarKey, float]


@dataclass
class AssembledProblem:
    """An assembled model together with the maps needed to read its points"""
    model: NlpModel
    layout: VariableLayout
    network: Network
    scenario: Scenario
    disc: Discretization
    plan: SimplificationPlan
    fixed: Dict[int, Dict[VarKey, float]] = field(default_factory=dict)
    stationary: bool = False

    @property
    def times(self) -> List[int]:
        return list(self.layout.times)

    @property
    def n_base(self) -> int:
        return len(self.layout)

    def layer_values(self, point, i: int) -> Dict[VarKey, float]:
        return self.layout.layer_values(point, i)

    def layers(self, point) -> Dict[int, Dict[VarKey, float]]:
        """Fixed and variable layers at ``point``, keyed by time index"""
        layers = {i: dict(values) for i, values in self.fixed.items()}
        for i in self.layout.times:
            layers[i] = self.layout.layer_values(point, i)
        return dict(sorted(layers.items()))

    def point_from(self, layers: Mapping[int, Layer], base=None) -> np.ndarray:
        """Base point (no slacks) from layer values; missing entries keep ``base`` or the initial value"""
        start = self.model.initial[:self.n_base] if base is None else np.asarray(base, dtype=float)[:self.n_base]
        point = self.layout.fill(start, layers)
        return np.clip(point, self.model.lower[:self.n_base], self.model.upper[:self.n_base])

    def zero_inflow_nodes(self, point, tol: float = 1e-6) -> List[str]:
        """Nodes whose total inflow |q| is at most ``tol`` at some variable layer"""
        flagged = set()
        for i in self.layout.times:
            values = self.layout.layer_values(point, i)
            for node in self.network.nodes:
                inflow = 0.0
                for arc, at_head in self.network.incident_arcs(node.id):
                    if arc.kind is ArcKind.PIPE:
                        q = cross_section(arc) * self.network.fluid.density * values[("v", arc.id)]
                    else:
                        q = values[("q", arc.id)]
                    inflow += max(q, 0.0) if at_head else max(-q, 0.0)
                if inflow <= tol:
                    flagged.add(node.id)
        return sorted(flagged)


# ---------------------------------------------------------------------- #
def _plan(network: Network, disc: Discretization, fixing: Optional[DirectionFixing]) -> SimplificationPlan:
    return simplification_plan(fixing or no_fixing(network), disc.mixing)


def _check_inputs(network: Network, scenario: Scenario, disc: Discretization) -> None:
    scenario.validate_for(network)
    for consumer, series in sorted(scenario.demands.items()):
        if len(series) != disc.steps + 1:
            raise ScenarioError(
                f"demand series of '{consumer}' has {len(series)} points, the grid needs {disc.steps + 1}",
                key=f"demands.{consumer}",
            )
    for pipe in network.pipes:
        disc.cells_of(pipe)


def _add_layers(ctx: AssemblyContext, layers: Iterable[int], warm: Optional[Mapping[int, Layer]]) -> None:
    warm = warm or {}
    for i in layers:
        ctx.add_layer(i, warm.get(i))


def _algebraic(ctx: AssemblyContext, i: int) -> None:
    for node in ctx.network.nodes:
        ctx.add(mass_balance(ctx, node.id, i), Relation.EQ, Family.MASS_BALANCE, f"mass_balance[{node.id}][t={i}]")
    for node in ctx.network.nodes:
        ctx.extend(node_mixing(ctx, node.id, i))
    if ctx.plan.mixing is MixingModel.MPCC:
        for pipe_id in ctx.plan.undecided:
            ctx.extend(flow_split(ctx, pipe_id, i))
    for consumer in ctx.network.consumers:
        ctx.extend(consumer_constraints(ctx, consumer.id, i))
    ctx.extend(depot_constraints(ctx, i))


def _dynamics(ctx: AssemblyContext, i: int) -> None:
    for pipe in ctx.network.pipes:
        ctx.add(
            pipe.length * momentum_residual(ctx, pipe, i),
            Relation.EQ, Family.MOMENTUM, f"momentum[{pipe.id}][t={i}]",
        )
        for k in energy_points(ctx, pipe):
            ctx.add(
                ctx.dt * energy_residual(ctx, pipe, k, i),
                Relation.EQ, Family.ENERGY, f"energy[{pipe.id}][k={k}][t={i}]",
            )
    if not ctx.stationary:
        ctx.extend(ramp_constraints(ctx, i))


def _finish(ctx: AssemblyContext, objective, name: str) -> AssembledProblem:
    model = NlpModel(ctx.variables, ctx.constraints, objective, name=name)
    counts = {f.value: n for f, n in sorted(model.families().items(), key=lambda kv: kv[0].value)}
    logger.debug(f"🔧 Assembled {model!r} families={counts}")
    return AssembledProblem(
        model=model,
        layout=ctx.layout,
        network=ctx.network,
        scenario=ctx.scenario,
        disc=ctx.disc,
        plan=ctx.plan,
        fixed=ctx.fixed,
        stationary=ctx.stationary,
    )


# ---------------------------------------------------------------------- #
def assemble(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: Optional[DirectionFixing] = None,
    initial: Optional[Layer] = None,
    warm: Optional[Mapping[int, Layer]] = None,
) -> AssembledProblem:
    """
    Full-horizon model over t_0..t_N.

    Args:
        fixing: Presolve result; None means only consumer and depot arcs are directed
        initial: Values of time layer 0; when given the layer is substituted
            as constants, otherwise it is variable
        warm: Initial values per time layer

    Returns:
        AssembledProblem whose model has the trapezoidal cost as objective
    """
    _check_inputs(network, scenario, disc)
    ctx = AssemblyContext(network, scenario, disc, _plan(network, disc, fixing),
                          fixed={0: initial} if initial is not None else None)
    first = 1 if initial is not None else 0
    _add_layers(ctx, range(first, disc.steps + 1), warm)
    for i in range(first, disc.steps + 1):
        _algebraic(ctx, i)
    for i in range(disc.steps):
        _dynamics(ctx, i)
    return _finish(ctx, trapezoidal_cost(ctx, range(disc.steps)), f"{network.name}/full")


def assemble_step(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: Optional[DirectionFixing],
    i: int,
    previous: Layer,
    warm: Optional[Layer] = None,
) -> AssembledProblem:
    """One-period model for t_i with layer i-1 fixed to ``previous``"""
    if not 1 <= i <= disc.steps:
        raise ValueError(f"step {i} outside [1, {disc.steps}]")
    _check_inputs(network, scenario, disc)
    ctx = AssemblyContext(network, scenario, disc, _plan(network, disc, fixing), fixed={i - 1: previous})
    ctx.add_layer(i, warm if warm is not None else previous)
    _algebraic(ctx, i)
    _dynamics(ctx, i - 1)
    return _finish(ctx, trapezoidal_cost(ctx, [i - 1]), f"{network.name}/step{i}")


def assemble_stationary(
    network: Network,
    scenario: Scenario,
    disc: Discretization,
    fixing: Optional[DirectionFixing] = None,
    i: int = 0,
    guess: Optional[Layer] = None,
) -> AssembledProblem:
    """Time-free model of time point i: time differences dropped, no ramps"""
    _check_inputs(network, scenario, disc)
    ctx = AssemblyContext(network, scenario, disc, _plan(network, disc, fixing), stationary=True)
    ctx.add_layer(i, guess)
    _algebraic(ctx, i)
    _dynamics(ctx, i)
    return _finish(ctx, stationary_cost(ctx, i), f"{network.name}/stationary{i}")
