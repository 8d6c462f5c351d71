"""
Pytest configuration and shared fixtures for heatnet tests.

This module provides small hand-built networks, synthetic topologies,
scenarios and discretizations reused across the test modules.
"""

import os
from typing import Any, Dict

import pytest

os.environ.setdefault("HEATNET_LOG_LEVEL", "WARNING")

from heatnet.assemble.discretization import Discretization
from heatnet.assemble.scenario import Costs, Scenario
from heatnet.network.loader import parse_network
from heatnet.schemas.enums import MixingModel, Scheme
from heatnet.services.synthetic import aroma_like, synthetic_scenario, tree


def _node(node_id: str, side: str) -> Dict[str, Any]:
    return {"id": node_id, "side": side}


@pytest.fixture
def minimal_document() -> Dict[str, Any]:
    """Smallest legal topology: one pipe per side, one consumer, the depot."""
    return {
        "nodes": [
            _node("f0", "forward_flow"),
            _node("f1", "forward_flow"),
            _node("b0", "backward_flow"),
            _node("b1", "backward_flow"),
        ],
        "pipes": [
            {"id": "pf", "from": "f0", "to": "f1", "length": 100.0, "diameter": 0.1,
             "roughness": 1e-4, "heat_transfer": 1.0},
            {"id": "pb", "from": "b1", "to": "b0", "length": 100.0, "diameter": 0.1,
             "roughness": 1e-4, "heat_transfer": 1.0},
        ],
        "consumers": [
            {"id": "c", "from": "f1", "to": "b1", "return_temp": 330.0, "min_inlet_temp": 350.0},
        ],
        "depot": {
            "id": "depot", "from": "b0", "to": "f0", "stagnation_pressure": 5e5,
            "power_ramp": 1000.0, "temperature_ramp": 0.01,
        },
    }


@pytest.fixture
def minimal_network(minimal_document):
    return parse_network(minimal_document, name="minimal")


@pytest.fixture
def single_pipe_document() -> Dict[str, Any]:
    """One supply pipe f0 -> f1, consumer f1 -> b0, depot b0 -> f0."""
    return {
        "nodes": [
            _node("f0", "forward_flow"),
            _node("f1", "forward_flow"),
            _node("b0", "backward_flow"),
        ],
        "pipes": [
            {"id": "p", "from": "f0", "to": "f1", "length": 100.0, "diameter": 0.1,
             "roughness": 1e-4, "heat_transfer": 1.0},
        ],
        "consumers": [
            {"id": "c", "from": "f1", "to": "b0", "return_temp": 330.0, "min_inlet_temp": 350.0},
        ],
        "depot": {
            "id": "depot", "from": "b0", "to": "f0", "stagnation_pressure": 5e5,
            "power_ramp": 1000.0, "temperature_ramp": 0.01,
        },
    }


@pytest.fixture
def single_pipe_network(single_pipe_document):
    return parse_network(single_pipe_document, name="single_pipe")


@pytest.fixture
def aroma_network():
    return aroma_like(seed=0)


@pytest.fixture
def tree_network():
    return tree(4, seed=1)


@pytest.fixture
def costs() -> Costs:
    return Costs(waste=2e-7, gas=1.5e-6, pump=2e-6)


def constant_scenario(network, steps: int, demand: float = 50e3, horizon: float = 3600.0,
                      costs: Costs = None) -> Scenario:
    """Same demand at every consumer and time point."""
    return Scenario(
        name="constant",
        horizon=horizon,
        demands={c.id: tuple(demand for _ in range(steps + 1)) for c in network.consumers},
        costs=costs or Costs(waste=2e-7, gas=1.5e-6, pump=2e-6),
    )


@pytest.fixture
def single_pipe_scenario(single_pipe_network):
    return constant_scenario(single_pipe_network, steps=1)


@pytest.fixture
def single_pipe_disc(single_pipe_network):
    return Discretization.uniform(single_pipe_network, horizon=3600.0, steps=1, cells=1)


@pytest.fixture
def aroma_short(aroma_network):
    """AROMA-like network on a two-step, one-hour grid with central differences."""
    disc = Discretization.build(
        aroma_network, horizon=3600.0, dt=1800.0, dx=150.0,
        scheme=Scheme.CENTRAL, mixing=MixingModel.NLP,
    )
    scenario = synthetic_scenario(aroma_network, seed=0, horizon=3600.0, samples=3).resampled(disc.steps)
    return aroma_network, scenario, disc


@pytest.fixture
def make_scenario():
    """Factory for constant-demand scenarios: make_scenario(network, steps, demand=..., horizon=...)."""
    return constant_scenario
