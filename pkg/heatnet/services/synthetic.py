"""
Synthetic networks and demand scenarios.

The generated data only reproduces published topology statistics (node,
arc and consumer counts, cycles, total pipe length); pipe parameters and
demand profiles are synthetic and marked as such in every scenario.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from heatnet.assemble.scenario import Costs, Scenario
from heatnet.core.config import settings
from heatnet.network.graph import ConsumerArc, DepotArc, Fluid, Network, Node, PipeArc
from heatnet.schemas.enums import Side

logger = logging.getLogger(__name__)

AROMA_TOTAL_LENGTH = 7262.4
STREET_TOTAL_LENGTH = 7627.106

RETURN_TEMPERATURE = 333.15
MIN_INLET_TEMPERATURE = 358.15
STAGNATION_PRESSURE = 5e5
POWER_RAMP = 1000.0
TEMPERATURE_RAMP = 0.01
PEAK_DEMAND = 300e3

# currency per Wh; gas clearly more expensive than waste incineration
DEFAULT_COSTS = Costs(waste=2e-7, gas=1.5e-6, pump=2e-6)

Edge = Tuple[int, int]


def split_length(total: float, count: int, rng: np.random.Generator, decimals: int = 1) -> List[float]:
    """``count`` random positive lengths summing to ``total`` at the given resolution"""
    unit = 10 ** decimals
    units = int(round(total * unit))
    weights = rng.uniform(0.5, 1.5, count)
    raw = weights / weights.sum() * units
    base = np.floor(raw).astype(int)
    remainder = units - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:remainder]] += 1
    return [int(b) / unit for b in base]


def _mirrored(
    name: str,
    edges: Sequence[Edge],
    lengths: Sequence[float],
    consumer_nodes: Sequence[int],
    n_nodes: int,
    diameters: Sequence[float],
    waste_bound: Optional[float],
) -> Network:
    """
    Build both sides from one forward-side edge list rooted at node 0.

    Forward pipes point away from the depot, return pipes point back to it;
    consumer k connects f_k to b_k and the depot closes b0 -> f0.
    """
    t_lo, t_hi = settings.NODE_TEMPERATURE_MIN, settings.NODE_TEMPERATURE_MAX
    p_bounds = (settings.NODE_PRESSURE_MIN, settings.NODE_PRESSURE_MAX)
    nodes = []
    for k in range(n_nodes):
        nodes.append(Node(id=f"f{k}", side=Side.FORWARD, pressure_bounds=p_bounds, temperature_bounds=(t_lo, t_hi)))
        nodes.append(Node(id=f"b{k}", side=Side.BACKWARD, pressure_bounds=p_bounds, temperature_bounds=(t_lo, t_hi)))

    pipes = []
    for j, ((u, v), length, diameter) in enumerate(zip(edges, lengths, diameters)):
        common = dict(length=length, diameter=diameter, roughness=1e-4, slope=0.0, heat_transfer=0.5)
        pipes.append(PipeArc(id=f"pf{j}", tail=f"f{u}", head=f"f{v}", **common))
        pipes.append(PipeArc(id=f"pb{j}", tail=f"b{v}", head=f"b{u}", **common))

    consumers = [
        ConsumerArc(
            id=f"c{k}",
            tail=f"f{k}",
            head=f"b{k}",
            return_temp=RETURN_TEMPERATURE,
            min_inlet_temp=MIN_INLET_TEMPERATURE,
        )
        for k in consumer_nodes
    ]
    depot = DepotArc(
        id="depot",
        tail="b0",
        head="f0",
        stagnation_pressure=STAGNATION_PRESSURE,
        max_waste_power=math.inf if waste_bound is None else waste_bound,
        power_ramp=POWER_RAMP,
        temperature_ramp=TEMPERATURE_RAMP,
    )
    return Network(nodes, pipes, consumers, depot, Fluid(), name=name)


def aroma_like(seed: int = 0, waste_bound: Optional[float] = None) -> Network:
    """
    18 nodes and 24 arcs: a six-pipe cycle per side, fed by one pipe from the
    depot, with two branch pipes; five consumers.
    """
    rng = np.random.default_rng(seed)
    cycle = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)]
    edges = [(0, 1), *cycle, (3, 7), (5, 8)]
    lengths = split_length(AROMA_TOTAL_LENGTH / 2, len(edges), rng)
    diameters = [0.3] + [0.2] * len(cycle) + [0.15, 0.15]
    return _mirrored("aroma_like", edges, lengths, [2, 4, 6, 7, 8], 9, diameters, waste_bound)


def street_like(seed: int = 0, waste_bound: Optional[float] = None) -> Network:
    """
    162 nodes and 195 arcs: per side a feeder pipe, one six-pipe cycle and a
    random tree of 74 further pipes; 32 consumers.
    """
    rng = np.random.default_rng(seed)
    n_nodes = 81
    edges: List[Edge] = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)]
    for k in range(7, n_nodes):
        edges.append((int(rng.integers(1, k)), k))
    lengths = split_length(STREET_TOTAL_LENGTH / 2, len(edges), rng, decimals=3)
    degree = np.zeros(n_nodes, dtype=int)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    leaves = [k for k in range(1, n_nodes) if degree[k] == 1]
    others = [k for k in range(1, n_nodes) if degree[k] > 1]
    rng.shuffle(others)
    consumer_nodes = sorted((leaves + others)[:32])
    diameters = [0.3] + [0.2] * 6 + [0.1] * (len(edges) - 7)
    return _mirrored("street_like", edges, lengths, consumer_nodes, n_nodes, diameters, waste_bound)


def tree(n: int, seed: int = 0, waste_bound: Optional[float] = None, length: float = 200.0) -> Network:
    """Random tree with ``n`` pipes per side and consumers at every leaf"""
    if n < 1:
        raise ValueError("a tree network needs at least one pipe per side")
    rng = np.random.default_rng(seed)
    edges: List[Edge] = [(0, 1)]
    for k in range(2, n + 1):
        edges.append((int(rng.integers(1, k)), k))
    degree = np.zeros(n + 1, dtype=int)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    leaves = [k for k in range(1, n + 1) if degree[k] == 1]
    lengths = split_length(length * n, n, rng)
    return _mirrored(f"tree{n}", edges, lengths, leaves, n + 1, [0.2] * n, waste_bound)


def day_profile(hours: np.ndarray) -> np.ndarray:
    """Relative demand over the day: night plateau, morning and evening peaks (max 1)"""
    h = np.mod(hours, 24.0)
    shape = 0.45 + 0.55 * np.exp(-(((h - 7.0) / 1.5) ** 2)) + 0.4 * np.exp(-(((h - 19.0) / 2.0) ** 2))
    return shape / shape.max() if shape.size else shape


def synthetic_scenario(
    network: Network,
    seed: int = 0,
    horizon: float = 86400.0,
    samples: int = 49,
    peak_demand: float = PEAK_DEMAND,
    costs: Costs = DEFAULT_COSTS,
) -> Scenario:
    rng = np.random.default_rng(seed + 1)
    hours = np.linspace(0.0, horizon / 3600.0, samples)
    profile = day_profile(hours)
    demands: Dict[str, Tuple[float, ...]] = {}
    for consumer in network.consumers:
        scale = peak_demand * rng.uniform(0.7, 1.0)
        demands[consumer.id] = tuple(float(round(d, 1)) for d in scale * profile)
    return Scenario(
        name=f"{network.name}_day",
        horizon=horizon,
        demands=demands,
        costs=costs,
        synthetic=True,
    )


def generate_synthetic(
    kind: str,
    seed: int = 0,
    size: int = 3,
    waste_bound: Optional[float] = None,
    horizon: float = 86400.0,
    samples: int = 49,
) -> Tuple[Network, Scenario]:
    """Network and day scenario of the given kind (aroma_like, street_like, tree)"""
    if kind == "aroma_like":
        network = aroma_like(seed, waste_bound)
    elif kind == "street_like":
        network = street_like(seed, waste_bound)
    elif kind == "tree":
        network = tree(size, seed, waste_bound)
    else:
        raise ValueError(f"unknown network kind '{kind}'")
    scenario = synthetic_scenario(network, seed, horizon, samples)
    logger.info(f"📥 Generated {network!r} with {len(network.consumers)} consumers (seed {seed})")
    return network, scenario
