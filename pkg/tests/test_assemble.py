"""
Tests for model assembly: discretized pipe rows, arc rows, costs, the
variable layout and the census of the assembled models.
"""

import copy
import math

import numpy as np
import pytest
from pydantic import ValidationError

from heatnet.assemble.arcs import consumer_constraints, depot_constraints, mass_balance, ramp_constraints
from heatnet.assemble.builder import assemble, assemble_stationary, assemble_step
from heatnet.assemble.context import AssemblyContext
from heatnet.assemble.cost import trajectory_cost, trapezoidal_cost
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.layout import format_key, parse_key, variable_name
from heatnet.assemble.pipes import (
    energy_points,
    energy_residual_central,
    energy_residual_implicit,
    momentum_residual,
)
from heatnet.assemble.scenario import Costs
from heatnet.core.exceptions import DiscretizationError, ScenarioError
from heatnet.network.loader import parse_network
from heatnet.network.physics import cross_section, friction_factor
from heatnet.nlp.expr import sum_exprs
from heatnet.nlp.model import Family
from heatnet.nlp.slacks import add_slacks
from heatnet.presolve.directions import fix_flow_directions, no_fixing
from heatnet.presolve.simplification import simplification_plan
from heatnet.schemas.enums import MixingModel, Scheme

RHO = 997.0
CP = 4180.0
AMBIENT = 283.15


def _context(network, scenario, disc, layers, stationary=False, presolve=True):
    fixing = fix_flow_directions(network) if presolve else no_fixing(network)
    plan = simplification_plan(fixing, disc.mixing)
    return AssemblyContext(network, scenario, disc, plan, fixed=layers, stationary=stationary)


def _pipe_network(document, **pipe_fields):
    doc = copy.deepcopy(document)
    doc["pipes"][0].update(pipe_fields)
    return parse_network(doc, name="single_pipe")


def _loss(pipe):
    return 4.0 * pipe.heat_transfer / (CP * RHO * pipe.diameter)


def _upwind_profile(theta0, v, dx, beta, cells):
    """Stationary implicit recurrence θ_{k+1} = (v/Δx θ_k + β θ_amb) / (v/Δx + β)"""
    profile = [theta0]
    for _ in range(cells):
        profile.append((v / dx * profile[-1] + beta * AMBIENT) / (v / dx + beta))
    return profile


@pytest.mark.unit
@pytest.mark.assemble
class TestLayout:
    """Test variable keys and names."""

    def test_key_format(self):
        """Test printing of plain and grid-point keys."""
        assert format_key(("v", "p1")) == "v[p1]"
        assert format_key(("theta_pipe", "p1", 2)) == "theta_pipe[p1][k=2]"
        assert format_key(("P_w",)) == "P_w"
        assert variable_name(("v", "p1"), 3) == "v[p1][t=3]"

    def test_parse_key(self):
        """Test reading keys back, including the integer cell index."""
        assert parse_key("theta_pipe[p1][k=2]") == ("theta_pipe", "p1", 2)
        assert parse_key("P_g") == ("P_g",)

    def test_parse_key_rejects_time_index(self):
        """Test that a variable name is not accepted as key."""
        with pytest.raises(ValueError):
            parse_key("v[p1][t=3]")
        with pytest.raises(ValueError):
            parse_key("v[p1")

    def test_parse_key_ids_by_position(self):
        """Test that ids looking like cell or time segments are read verbatim."""
        assert parse_key("v[k=1]") == ("v", "k=1")
        assert parse_key("theta[t=0]") == ("theta", "t=0")
        assert parse_key("theta_pipe[k=7][k=3]") == ("theta_pipe", "k=7", 3)
        for key in [("q", "k=2"), ("theta_pipe", "t=1", 0), ("p", "n0")]:
            assert parse_key(format_key(key)) == key

    @pytest.mark.parametrize(
        "text",
        ["theta_pipe[p1][2]", "theta_pipe[p1]", "v[p1][p2]", "P_w[x]", "theta_pipe[p1][k=2][t=0]"],
    )
    def test_parse_key_rejects_malformed_segments(self, text):
        """Test rejection of a missing cell index and of wrong segment counts."""
        with pytest.raises(ValueError):
            parse_key(text)


@pytest.mark.unit
@pytest.mark.assemble
class TestDiscretization:
    """Test the space-time grid."""

    def test_build_cells(self, aroma_network):
        """Test M_a = ceil(L_a / Δx) and N = T / Δt."""
        disc = Discretization.build(aroma_network, horizon=7200.0, dt=900.0, dx=100.0)
        assert disc.steps == 8
        assert disc.dt == 900.0
        assert disc.dt_hours == 0.25
        for pipe in aroma_network.pipes:
            assert disc.cells_of(pipe) == math.ceil(pipe.length / 100.0 - 1e-9)
            assert disc.dx(pipe) <= 100.0

    def test_time_points(self, single_pipe_network):
        """Test t_i = iT/N."""
        disc = Discretization.uniform(single_pipe_network, horizon=3600.0, steps=4)
        assert [disc.time(i) for i in range(5)] == [0.0, 900.0, 1800.0, 2700.0, 3600.0]

    def test_dt_must_divide_horizon(self, single_pipe_network):
        """Test the error for a step that does not divide T."""
        with pytest.raises(DiscretizationError) as info:
            Discretization.build(single_pipe_network, horizon=3600.0, dt=700.0, dx=50.0)
        assert info.value.key == "dt"

    def test_nonpositive_steps(self, single_pipe_network):
        """Test rejection of zero step sizes and zero cells."""
        with pytest.raises(DiscretizationError):
            Discretization.build(single_pipe_network, horizon=3600.0, dt=0.0, dx=50.0)
        with pytest.raises(ValidationError):
            Discretization(horizon=3600.0, steps=1, cells={"p": 0})

    def test_missing_pipe(self, single_pipe_network):
        """Test the error for a pipe without cell count."""
        disc = Discretization(horizon=3600.0, steps=1, cells={})
        with pytest.raises(DiscretizationError) as info:
            disc.cells_of(single_pipe_network.pipes[0])
        assert info.value.key == "p"


@pytest.mark.unit
@pytest.mark.assemble
class TestMomentum:
    """Test the discretized momentum equation."""

    def test_stationary_friction_drop(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test that p_head - p_tail = -Lλρ/(2D) balances v = 1 m/s."""
        pipe = single_pipe_network.pipes[0]
        drop = -pipe.length * friction_factor(pipe) * RHO / (2.0 * pipe.diameter)
        assert drop == pytest.approx(-9786.5, rel=1e-3)
        layer = {("v", "p"): 1.0, ("p", "f0"): 7e5, ("p", "f1"): 7e5 + drop}
        ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {0: layer}, stationary=True)
        assert momentum_residual(ctx, pipe, 0).param == pytest.approx(0.0, abs=1e-9)

    def test_hydrostatic_term(self, single_pipe_document, single_pipe_scenario):
        """Test gρh' L for a pipe with slope 0.01 at rest."""
        network = _pipe_network(single_pipe_document, slope=0.01)
        disc = Discretization.uniform(network, horizon=3600.0, steps=1)
        layer = {("v", "p"): 0.0, ("p", "f0"): 5e5, ("p", "f1"): 5e5}
        ctx = _context(network, single_pipe_scenario, disc, {0: layer}, stationary=True)
        pipe = network.pipes[0]
        assert pipe.length * momentum_residual(ctx, pipe, 0).param == pytest.approx(9780.6, rel=1e-4)

    def test_time_derivative(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test that the implicit step adds ρ(v⁺ - v)/Δt."""
        pipe = single_pipe_network.pipes[0]
        old = {("v", "p"): 0.0, ("p", "f0"): 5e5, ("p", "f1"): 5e5}
        new = {("v", "p"): 0.5, ("p", "f0"): 5e5, ("p", "f1"): 5e5}
        ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {0: old, 1: new})
        coef = friction_factor(pipe) * RHO / (2.0 * pipe.diameter)
        expected = RHO * 0.5 / 3600.0 + coef * 0.25
        assert momentum_residual(ctx, pipe, 0).param == pytest.approx(expected, rel=1e-12)

    def test_undecided_friction_is_odd(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test the smoothed |v|v friction of an undecided pipe."""
        pipe = single_pipe_network.pipes[0]
        values = []
        for v in (0.8, -0.8):
            layer = {("v", "p"): v, ("p", "f0"): 5e5, ("p", "f1"): 5e5}
            ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {0: layer},
                           stationary=True, presolve=False)
            values.append(momentum_residual(ctx, pipe, 0).param)
        assert values[0] == pytest.approx(-values[1], rel=1e-9)
        assert values[0] > 0


@pytest.mark.unit
@pytest.mark.assemble
class TestEnergy:
    """Test the discretized thermal energy equation."""

    def test_stationary_recurrence(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test θ_1 = 399.888 K behind one 100 m cell at v = 1 m/s."""
        pipe = single_pipe_network.pipes[0]
        theta = _upwind_profile(400.0, 1.0, 100.0, _loss(pipe), 1)
        assert theta[1] == pytest.approx(399.888, abs=1e-3)
        layer = {("v", "p"): 1.0, ("theta_pipe", "p", 0): theta[0], ("theta_pipe", "p", 1): theta[1]}
        ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {0: layer}, stationary=True)
        assert energy_residual_implicit(ctx, pipe, 0, 0).param == pytest.approx(0.0, abs=1e-12)

    def test_ambient_equilibrium(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test that water at ambient temperature stays there."""
        pipe = single_pipe_network.pipes[0]
        layer = {("v", "p"): 0.3, ("theta_pipe", "p", 0): AMBIENT, ("theta_pipe", "p", 1): AMBIENT}
        ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {0: layer, 1: dict(layer)})
        assert energy_residual_implicit(ctx, pipe, 0, 0).param == pytest.approx(0.0, abs=1e-12)

    def test_pure_transport(self, single_pipe_document, single_pipe_scenario):
        """Test an insulated pipe: only the advection term remains."""
        network = _pipe_network(single_pipe_document, heat_transfer=0.0)
        disc = Discretization.uniform(network, horizon=3600.0, steps=1)
        pipe = network.pipes[0]
        for outlet, expected in ((350.0, 0.0), (351.0, 0.01)):
            layer = {("v", "p"): 1.0, ("theta_pipe", "p", 0): 350.0, ("theta_pipe", "p", 1): outlet}
            ctx = _context(network, single_pipe_scenario, disc, {0: layer}, stationary=True)
            assert energy_residual_implicit(ctx, pipe, 0, 0).param == pytest.approx(expected, abs=1e-12)

    def test_linear_profile_schemes_agree(self, single_pipe_document, single_pipe_scenario):
        """Test that both stencils are exact on a linear profile without losses."""
        network = _pipe_network(single_pipe_document, heat_transfer=0.0)
        pipe = network.pipes[0]
        layer = {("v", "p"): 0.5}
        layer.update({("theta_pipe", "p", k): 400.0 - k for k in range(5)})
        for scheme in (Scheme.IMPLICIT, Scheme.CENTRAL):
            disc = Discretization.uniform(network, horizon=3600.0, steps=1, cells=4, scheme=scheme)
            ctx = _context(network, single_pipe_scenario, disc, {0: layer}, stationary=True)
            points = list(energy_points(ctx, pipe))
            assert len(points) == 4
            residual = energy_residual_implicit if scheme is Scheme.IMPLICIT else energy_residual_central
            for k in points:
                assert residual(ctx, pipe, k, 0).param == pytest.approx(-0.5 / 25.0, rel=1e-12)

    def test_stencil_ranges(self, single_pipe_network, single_pipe_scenario):
        """Test that out-of-range grid points are rejected."""
        pipe = single_pipe_network.pipes[0]
        disc = Discretization.uniform(single_pipe_network, horizon=3600.0, steps=1, cells=4,
                                      scheme=Scheme.CENTRAL)
        ctx = _context(single_pipe_network, single_pipe_scenario, disc, {0: {}}, stationary=True)
        with pytest.raises(ValueError):
            energy_residual_central(ctx, pipe, 0, 0)
        with pytest.raises(ValueError):
            energy_residual_implicit(ctx, pipe, 4, 0)

    def test_implicit_scheme_first_order(self, single_pipe_document, make_scenario):
        """Test first-order convergence of the outlet temperature under grid refinement."""
        network = _pipe_network(single_pipe_document, length=1000.0, heat_transfer=25.0)
        pipe = network.pipes[0]
        beta, v = _loss(pipe), 0.1
        exact = AMBIENT + (400.0 - AMBIENT) * math.exp(-beta * pipe.length / v)
        scenario = make_scenario(network, steps=1)
        errors = []
        for dx in (200.0, 100.0, 50.0, 25.0):
            disc = Discretization.build(network, horizon=3600.0, dt=3600.0, dx=dx)
            cells = disc.cells_of(pipe)
            profile = _upwind_profile(400.0, v, dx, beta, cells)
            layer = {("v", "p"): v}
            layer.update({("theta_pipe", "p", k): t for k, t in enumerate(profile)})
            ctx = _context(network, scenario, disc, {0: layer}, stationary=True)
            for k in energy_points(ctx, pipe):
                assert energy_residual_implicit(ctx, pipe, k, 0).param == pytest.approx(0.0, abs=1e-10)
            errors.append(abs(profile[-1] - exact))
        orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
        assert all(0.9 < p < 1.05 for p in orders)
        assert orders == sorted(orders)


@pytest.mark.unit
@pytest.mark.assemble
class TestArcRows:
    """Test mass balance, consumer, depot and ramp rows."""

    def test_mass_balance_at_junction(self, aroma_short):
        """Test Σ_in q - Σ_out q at b3 (inflow pb3 and pb7, outflow pb2)."""
        network, scenario, disc = aroma_short
        flows = {"pb3": 3.0, "pb7": 4.0, "pb2": 7.0}
        layer = {("v", a): q / (cross_section(network.arc(a)) * RHO) for a, q in flows.items()}
        ctx = _context(network, scenario, disc, {0: layer})
        assert mass_balance(ctx, "b3", 0).param == pytest.approx(0.0, abs=1e-9)
        layer[("v", "pb2")] = 6.0 / (cross_section(network.arc("pb2")) * RHO)
        ctx = _context(network, scenario, disc, {0: layer})
        assert mass_balance(ctx, "b3", 0).param == pytest.approx(1.0, rel=1e-9)

    def test_mass_balances_sum_to_zero(self, aroma_short):
        """Test that every arc enters exactly one balance with each sign."""
        network, scenario, disc = aroma_short
        ctx = _context(network, scenario, disc, {})
        ctx.add_layer(0)
        total = sum_exprs(mass_balance(ctx, node.id, 0) for node in network.nodes)
        point = np.random.default_rng(3).uniform(-1.0, 1.0, len(ctx.variables))
        assert total.value(point) == pytest.approx(0.0, abs=1e-8)

    def test_consumer_power(self, single_pipe_network, make_scenario, single_pipe_disc):
        """Test c_p q (θ_tail - θ_head) = 418 kW against the demand."""
        scenario = make_scenario(single_pipe_network, steps=1, demand=418000.0)
        layer = {("q", "c"): 10.0, ("theta_tail", "c"): 360.0, ("theta_head", "c"): 350.0,
                 ("p", "f1"): 6e5, ("p", "b0"): 5e5}
        ctx = _context(single_pipe_network, scenario, single_pipe_disc, {0: layer})
        power, pressure = consumer_constraints(ctx, "c", 0)
        assert power.family is Family.CONSUMER
        assert power.expr.param == pytest.approx(0.0, abs=1e-6)
        assert pressure.family is Family.PRESSURE
        assert pressure.expr.param == pytest.approx(1e5)

    def test_consumer_temperature_bounds(self, single_pipe_network, make_scenario, single_pipe_disc):
        """Test the relaxed return temperature and the minimum inlet bound."""
        scenario = make_scenario(single_pipe_network, steps=1)
        ctx = _context(single_pipe_network, scenario, single_pipe_disc, {})
        assert ctx.bounds(("theta_head", "c")) == pytest.approx((329.9, 330.1))
        assert ctx.bounds(("theta_tail", "c"))[0] == 350.0
        wider = scenario.model_copy(update={"temperature_relaxation": 0.2})
        ctx = _context(single_pipe_network, wider, single_pipe_disc, {})
        assert ctx.bounds(("theta_head", "c")) == pytest.approx((329.8, 330.2))

    def test_depot_rows(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test pump power q·Δp/ρ and heat power c_p q Δθ."""
        q = 10.0
        layer = {("q", "depot"): q, ("p", "b0"): 5e5, ("p", "f0"): 7e5,
                 ("theta_tail", "depot"): 330.0, ("theta_head", "depot"): 400.0,
                 ("P_p",): q * 2e5 / RHO, ("P_w",): 2e6, ("P_g",): CP * q * 70.0 - 2e6}
        ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {0: layer})
        pump, heat = depot_constraints(ctx, 0)
        assert pump.expr.param == pytest.approx(0.0, abs=1e-9)
        assert heat.expr.param == pytest.approx(0.0, abs=1e-6)

    def test_stagnation_pressure_bound(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test that the depot inlet pressure is bounded to p_s ± ε."""
        ctx = _context(single_pipe_network, single_pipe_scenario, single_pipe_disc, {})
        assert ctx.bounds(("p", "b0")) == pytest.approx((4.9e5, 5.1e5))
        assert ctx.bounds(("p", "f0")) == (1e5, 25e5)

    def test_ramp_budget(self, single_pipe_network, make_scenario):
        """Test the ramp budget ξ_P Δt = 1.8 MW over a half-hour step."""
        disc = Discretization.uniform(single_pipe_network, horizon=3600.0, steps=2)
        scenario = make_scenario(single_pipe_network, steps=2)
        old = {("P_w",): 0.0, ("theta_head", "depot"): 360.0}
        for power, temp, feasible in ((1.8e6, 378.0, True), (1.9e6, 360.0, False), (0.0, 379.0, False)):
            new = {("P_w",): power, ("theta_head", "depot"): temp}
            ctx = _context(single_pipe_network, scenario, disc, {0: old, 1: new})
            rows = ramp_constraints(ctx, 0)
            assert len(rows) == 4
            assert all(r.family is Family.RAMP for r in rows)
            assert (min(r.expr.param for r in rows) >= -1e-9) == feasible

    def test_ramp_is_symmetric(self, single_pipe_network, make_scenario):
        """Test that falling power is limited like rising power."""
        disc = Discretization.uniform(single_pipe_network, horizon=3600.0, steps=2)
        scenario = make_scenario(single_pipe_network, steps=2)
        layers = {0: {("P_w",): 2e6, ("theta_head", "depot"): 360.0},
                  1: {("P_w",): 0.0, ("theta_head", "depot"): 360.0}}
        ctx = _context(single_pipe_network, scenario, disc, layers)
        down = [r for r in ramp_constraints(ctx, 0) if r.name.startswith("ramp_power_down")]
        assert down[0].expr.param == pytest.approx(1.8e6 - 2e6)


@pytest.mark.unit
@pytest.mark.assemble
class TestCost:
    """Test the trapezoidal cost."""

    def test_constant_power(self, single_pipe_network, make_scenario):
        """Test 10 W of waste heat at 1 per Wh over two hours."""
        costs = Costs(waste=1.0, gas=0.0, pump=0.0)
        scenario = make_scenario(single_pipe_network, steps=2, horizon=7200.0, costs=costs)
        disc = Discretization.uniform(single_pipe_network, horizon=7200.0, steps=2)
        layers = {i: {("P_w",): 10.0, ("P_g",): 0.0, ("P_p",): 0.0} for i in range(3)}
        ctx = _context(single_pipe_network, scenario, disc, layers)
        assert trapezoidal_cost(ctx, range(2)).param == pytest.approx(20.0)

    def test_linear_ramp(self, single_pipe_network, make_scenario):
        """Test that a ramp from 0 to 1 W over one hour costs 0.5."""
        costs = Costs(waste=1.0, gas=0.0, pump=0.0)
        scenario = make_scenario(single_pipe_network, steps=1, costs=costs)
        disc = Discretization.uniform(single_pipe_network, horizon=3600.0, steps=1)
        layers = {0: {("P_w",): 0.0}, 1: {("P_w",): 1.0}}
        ctx = _context(single_pipe_network, scenario, disc, layers)
        assert trapezoidal_cost(ctx, [0]).param == pytest.approx(0.5)
        assert trajectory_cost(costs, 3600.0, [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]) == pytest.approx(0.5)

    def test_all_powers_priced(self, costs):
        """Test the numeric cost over all three powers."""
        total = trajectory_cost(costs, 1800.0, [1e6, 1e6], [2e5, 0.0], [1e3, 1e3])
        expected = 0.25 * (2e-7 * 2e6 + 1.5e-6 * 2e5 + 2e-6 * 2e3)
        assert total == pytest.approx(expected)


@pytest.mark.unit
@pytest.mark.assemble
class TestCensus:
    """Test variable and constraint counts of assembled models."""

    def _assemble(self, network, scenario, disc, mixing, presolve):
        disc = disc.model_copy(update={"mixing": mixing})
        fixing = fix_flow_directions(network) if presolve else None
        return assemble(network, scenario, disc, fixing).model

    @pytest.mark.parametrize(
        "mixing,presolve,n_vars,n_constraints",
        [
            (MixingModel.NLP, False, 40, 42),
            (MixingModel.MPCC, False, 40, 38),
            (MixingModel.NLP, True, 36, 32),
            (MixingModel.MPCC, True, 36, 32),
        ],
    )
    def test_single_pipe_counts(self, single_pipe_network, single_pipe_scenario, single_pipe_disc,
                                mixing, presolve, n_vars, n_constraints):
        """Test the closed-form census of the single-pipe network."""
        model = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc, mixing, presolve)
        assert model.n_vars == n_vars
        assert model.n_constraints == n_constraints

    def test_family_breakdown(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test the row families of the unpresolved NLP model."""
        model = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc,
                               MixingModel.NLP, False)
        assert model.families() == {
            Family.MASS_BALANCE: 6,
            Family.MIXING: 22,
            Family.CONSUMER: 2,
            Family.PRESSURE: 2,
            Family.DEPOT: 4,
            Family.MOMENTUM: 1,
            Family.ENERGY: 1,
            Family.RAMP: 4,
        }

    def test_complementarity_rows(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test one complementarity row per undecided pipe and layer, none after presolve."""
        model = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc,
                               MixingModel.MPCC, False)
        assert model.families()[Family.COMPLEMENTARITY] == 2
        model = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc,
                               MixingModel.MPCC, True)
        assert Family.COMPLEMENTARITY not in model.families()

    def test_mpcc_overhead_per_layer(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test two variables and three rows per undecided pipe and layer."""
        free = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc, MixingModel.MPCC, False)
        fixed = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc, MixingModel.MPCC, True)
        assert (free.n_vars - fixed.n_vars) / 2 == 2
        assert (free.n_constraints - fixed.n_constraints) / 2 == 3

    def test_tree_fully_presolved(self, tree_network, make_scenario):
        """Test that a tree has no complementarity rows after presolve."""
        scenario = make_scenario(tree_network, steps=2)
        disc = Discretization.uniform(tree_network, horizon=3600.0, steps=2, mixing=MixingModel.MPCC)
        presolved = assemble(tree_network, scenario, disc, fix_flow_directions(tree_network)).model
        assert Family.COMPLEMENTARITY not in presolved.families()
        assert not any(v.name.startswith("q_pos") for v in presolved.variables)
        plain = assemble(tree_network, scenario, disc).model
        assert plain.families()[Family.COMPLEMENTARITY] == 3 * len(tree_network.pipes)

    def test_slack_count(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test two slacks per slacked equality and one per slacked inequality."""
        model = self._assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc,
                               MixingModel.NLP, False)
        assert add_slacks(model).slacks.size == 48

    def test_fixed_initial_layer(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test that a given initial state removes the variables of layer 0."""
        full = assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc)
        point = full.model.initial
        initial = full.layer_values(point, 0)
        problem = assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc, initial=initial)
        assert problem.model.n_vars == 20
        assert problem.model.n_constraints == 24
        assert problem.times == [1]
        assert set(problem.layers(problem.model.initial)) == {0, 1}

    def test_step_model(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test the one-period model of instantaneous control."""
        full = assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc)
        previous = full.layer_values(full.model.initial, 0)
        step = assemble_step(single_pipe_network, single_pipe_scenario, single_pipe_disc, None, 1, previous)
        assert step.model.n_vars == 20
        assert step.model.n_constraints == 24
        with pytest.raises(ValueError):
            assemble_step(single_pipe_network, single_pipe_scenario, single_pipe_disc, None, 0, previous)

    def test_variable_names(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test that layout and variable names agree."""
        problem = assemble(single_pipe_network, single_pipe_scenario, single_pipe_disc)
        index = problem.layout.var_id(("theta_pipe", "p", 1), 1)
        assert problem.model.variables[index].name == "theta_pipe[p][k=1][t=1]"
        assert problem.model.index("P_w[t=0]") == problem.layout.var_id(("P_w",), 0)


@pytest.mark.unit
@pytest.mark.assemble
class TestScenarioChecks:
    """Test scenario consistency checks at assembly time."""

    def test_series_length_mismatch(self, single_pipe_network, make_scenario, single_pipe_disc):
        """Test the error for a demand series that does not fit the grid."""
        scenario = make_scenario(single_pipe_network, steps=3)
        with pytest.raises(ScenarioError) as info:
            assemble(single_pipe_network, scenario, single_pipe_disc)
        assert info.value.key == "demands.c"

    def test_missing_consumer(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test the error for a consumer without demand."""
        scenario = single_pipe_scenario.model_copy(update={"demands": {}})
        with pytest.raises(ScenarioError) as info:
            assemble(single_pipe_network, scenario, single_pipe_disc)
        assert info.value.key == "demands.c"

    def test_unknown_consumer(self, single_pipe_network, single_pipe_scenario, single_pipe_disc):
        """Test the error for a demand of an unknown consumer."""
        demands = dict(single_pipe_scenario.demands, ghost=(1.0, 1.0))
        scenario = single_pipe_scenario.model_copy(update={"demands": demands})
        with pytest.raises(ScenarioError) as info:
            assemble(single_pipe_network, scenario, single_pipe_disc)
        assert info.value.key == "demands.ghost"

    def test_stagnation_pressure_outside_bounds(self, single_pipe_document, single_pipe_scenario):
        """Test the error when p_s ± ε misses the node pressure interval."""
        doc = copy.deepcopy(single_pipe_document)
        doc["nodes"][2]["pressure_bounds"] = [6e5, 9e5]
        network = parse_network(doc)
        disc = Discretization.uniform(network, horizon=3600.0, steps=1)
        with pytest.raises(ScenarioError) as info:
            assemble(network, single_pipe_scenario, disc)
        assert info.value.key == "b0"


@pytest.mark.unit
@pytest.mark.assemble
class TestAssembledModel:
    """Test derivatives and a known solution of assembled models."""

    def test_jacobian_matches_finite_differences(self, aroma_short):
        """Test directional derivatives of every row at random points."""
        network, scenario, disc = aroma_short
        model = assemble(network, scenario, disc).model
        rng = np.random.default_rng(11)
        h = 1e-6
        for _ in range(20):
            x = model.initial + model.var_scale * rng.uniform(-0.5, 0.5, model.n_vars)
            d = model.var_scale * rng.standard_normal(model.n_vars)
            d /= np.linalg.norm(d / model.var_scale)
            _, jac = model.gradient(x)
            _, c0 = model.evaluate(x)
            _, c_plus = model.evaluate(x + h * d)
            _, c_minus = model.evaluate(x - h * d)
            fd = (c_plus - c_minus) / (2.0 * h)
            jd = jac @ d
            assert np.all(np.abs(fd - jd) <= 1e-5 * (1.0 + np.abs(c0) + np.abs(jd)))

    def test_objective_gradient(self, aroma_short):
        """Test that the cost gradient holds the trapezoid weights."""
        network, scenario, disc = aroma_short
        problem = assemble(network, scenario, disc)
        grad, _ = problem.model.gradient(problem.model.initial)
        half_step = disc.dt_hours / 2.0
        c_w = scenario.costs.waste
        assert grad[problem.layout.var_id(("P_w",), 0)] == pytest.approx(half_step * c_w)
        assert grad[problem.layout.var_id(("P_w",), 1)] == pytest.approx(2 * half_step * c_w)
        assert grad[problem.layout.var_id(("P_w",), 2)] == pytest.approx(half_step * c_w)
        assert grad[problem.layout.var_id(("v", "pf0"), 1)] == 0.0

    def test_stationary_analytic_point(self, single_pipe_network, make_scenario, single_pipe_disc):
        """Test that the hand-computed stationary state satisfies every row."""
        pipe = single_pipe_network.pipes[0]
        q = cross_section(pipe) * RHO
        theta = _upwind_profile(400.0, 1.0, 100.0, _loss(pipe), 1)
        drop = pipe.length * friction_factor(pipe) * RHO / (2.0 * pipe.diameter)
        scenario = make_scenario(single_pipe_network, steps=1, demand=CP * q * (theta[1] - 330.0))
        layer = {
            ("v", "p"): 1.0,
            ("theta_pipe", "p", 0): theta[0],
            ("theta_pipe", "p", 1): theta[1],
            ("p", "f0"): 7e5, ("p", "f1"): 7e5 - drop, ("p", "b0"): 5e5,
            ("theta", "f0"): 400.0, ("theta", "f1"): theta[1], ("theta", "b0"): 330.0,
            ("q", "c"): q, ("theta_tail", "c"): theta[1], ("theta_head", "c"): 330.0,
            ("q", "depot"): q, ("theta_tail", "depot"): 330.0, ("theta_head", "depot"): 400.0,
            ("P_w",): CP * q * 70.0, ("P_g",): 0.0, ("P_p",): q * 2e5 / RHO,
        }
        problem = assemble_stationary(single_pipe_network, scenario, single_pipe_disc,
                                      fix_flow_directions(single_pipe_network))
        point = problem.point_from({0: layer})
        assert np.all(point >= problem.model.lower) and np.all(point <= problem.model.upper)
        assert problem.model.max_violation(point) < 1e-8
        assert problem.model.cost(point) == pytest.approx(
            scenario.costs.waste * CP * q * 70.0 + scenario.costs.pump * q * 2e5 / RHO
        )
        assert problem.zero_inflow_nodes(point) == []
