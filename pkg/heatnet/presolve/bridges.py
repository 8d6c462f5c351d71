from dataclasses import dataclass
from typing import FrozenSet, Hashable, Tuple

import networkx as nx

Edge = Tuple[Hashable, Hashable, Hashable]


@dataclass(frozen=True)
class BridgeDecomposition:
    """Bridges as (u, v, key) triples and the 2-edge-connected node sets"""
    bridges: FrozenSet[Edge]
    components: Tuple[FrozenSet[Hashable], ...]

    def component_of(self) -> dict:
        return {node: i for i, comp in enumerate(self.components) for node in comp}


def bridges_and_components(graph: nx.MultiGraph) -> BridgeDecomposition:
    """
    Find all bridges of an undirected multigraph and its maximal
    2-edge-connected components.

    Parallel edges are never bridges. Removing the bridges leaves exactly the
    components as connected pieces; isolated nodes are singleton components.
    """
    multigraph = nx.MultiGraph(graph)
    bridges = set()
    for u, v in nx.bridges(nx.Graph(multigraph)):
        keys = list(multigraph[u][v])
        if len(keys) == 1:
            bridges.add((u, v, keys[0]))

    remainder = multigraph.copy()
    remainder.remove_edges_from(bridges)
    components = sorted(
        (frozenset(c) for c in nx.connected_components(remainder)),
        key=lambda c: sorted(map(str, c)),
    )
    return BridgeDecomposition(bridges=frozenset(bridges), components=tuple(components))
