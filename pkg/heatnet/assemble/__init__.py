from heatnet.assemble.arcs import consumer_constraints, depot_constraints, mass_balance, ramp_constraints
from heatnet.assemble.builder import AssembledProblem, assemble, assemble_stationary, assemble_step
from heatnet.assemble.context import AssemblyContext
from heatnet.assemble.cost import stationary_cost, trajectory_cost, trapezoidal_cost
from heatnet.assemble.discretization import Discretization
from heatnet.assemble.layout import VariableLayout, VarKey, format_key, parse_key, variable_name
from heatnet.assemble.mixing import IncidentArc, flow_split, mixing_mpcc, mixing_nlp, node_mixing
from heatnet.assemble.pipes import energy_residual_central, energy_residual_implicit, momentum_residual
from heatnet.assemble.scenario import Costs, Scenario, load_scenario, parse_scenario, scenario_to_document

__all__ = [
    "AssembledProblem",
    "AssemblyContext",
    "Costs",
    "Discretization",
    "IncidentArc",
    "Scenario",
    "VarKey",
    "VariableLayout",
    "assemble",
    "assemble_stationary",
    "assemble_step",
    "consumer_constraints",
    "depot_constraints",
    "energy_residual_central",
    "energy_residual_implicit",
    "flow_split",
    "format_key",
    "load_scenario",
    "mass_balance",
    "mixing_mpcc",
    "mixing_nlp",
    "momentum_residual",
    "node_mixing",
    "parse_key",
    "parse_scenario",
    "ramp_constraints",
    "scenario_to_document",
    "stationary_cost",
    "trajectory_cost",
    "trapezoidal_cost",
    "variable_name",
]
