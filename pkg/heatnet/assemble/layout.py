"""
Variable keys and the (key, time index) → variable index map.

A key is a tuple ``(quantity, *location)``; pipe grid points carry an int
cell index. Keys print as ``v[p1]`` or ``theta_pipe[p1][k=2]`` and variable
names append the time index, e.g. ``v[p1][t=3]``.
"""

import re
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from heatnet.assemble.discretization import Discretization
from heatnet.network.graph import Network
from heatnet.presolve.simplification import SimplificationPlan
from heatnet.schemas.enums import MixingModel

VarKey = Tuple

# Nominal magnitude per quantity
QUANTITY_SCALES: Dict[str, float] = {
    "v": 1.0,
    "theta_pipe": 100.0,
    "p": 1e5,
    "theta": 100.0,
    "q": 10.0,
    "theta_tail": 100.0,
    "theta_head": 100.0,
    "P_w": 1e6,
    "P_g": 1e6,
    "P_p": 1e4,
    "q_pos": 10.0,
    "q_neg": 10.0,
    "dtheta_tail": 10.0,
    "dtheta_head": 10.0,
}

# Number of location segments per quantity (default 1); the last one of a grid key is the cell index
LOCATION_COUNTS: Dict[str, int] = {"theta_pipe": 2, "P_w": 0, "P_g": 0, "P_p": 0}
CELL_QUANTITIES = frozenset({"theta_pipe"})

_KEY_PATTERN = re.compile(r"^([A-Za-z_]+)((?:\[[^\[\]]+\])*)$")


def format_key(key: VarKey) -> str:
    quantity, *locations = key
    parts = [f"[k={loc}]" if isinstance(loc, int) else f"[{loc}]" for loc in locations]
    return quantity + "".join(parts)


def parse_key(text: str) -> VarKey:
    """
    Inverse of ``format_key``.

    Segments are read by position: arc and node ids are taken verbatim,
    only the cell segment of a grid key must read ``k=<int>``.
    """
    match = _KEY_PATTERN.match(text.strip())
    if not match:
        raise ValueError(f"not a variable key: {text!r}")
    quantity = match.group(1)
    parts = re.findall(r"\[([^\[\]]+)\]", match.group(2))
    count = LOCATION_COUNTS.get(quantity, 1)
    if len(parts) == count + 1 and parts[-1].startswith("t="):
        raise ValueError(f"variable key {text!r} must not carry a time index")
    if len(parts) != count:
        raise ValueError(f"variable key {text!r}: {quantity} takes {count} location(s), got {len(parts)}")
    locations: List = list(parts)
    if quantity in CELL_QUANTITIES:
        cell = parts[-1]
        if not re.fullmatch(r"k=\d+", cell):
            raise ValueError(f"variable key {text!r}: cell segment must read k=<index>")
        locations[-1] = int(cell[2:])
    return (quantity, *locations)


def variable_name(key: VarKey, i: int) -> str:
    return f"{format_key(key)}[t={i}]"


def layer_keys(network: Network, disc: Discretization, plan: SimplificationPlan) -> List[VarKey]:
    """Keys of all variables attached to one time point, in a fixed order"""
    keys: List[VarKey] = []
    for pipe in network.pipes:
        keys.append(("v", pipe.id))
        keys.extend(("theta_pipe", pipe.id, k) for k in range(disc.cells_of(pipe) + 1))
    for node in network.nodes:
        keys.append(("p", node.id))
        keys.append(("theta", node.id))
    for arc in (*network.consumers, network.depot):
        keys.append(("q", arc.id))
        keys.append(("theta_tail", arc.id))
        keys.append(("theta_head", arc.id))
    keys.extend([("P_w",), ("P_g",), ("P_p",)])
    for pipe_id in plan.undecided:
        if plan.mixing is MixingModel.MPCC:
            keys.extend([("q_pos", pipe_id), ("q_neg", pipe_id)])
        else:
            keys.extend([("dtheta_tail", pipe_id), ("dtheta_head", pipe_id)])
    return keys


class VariableLayout:
    """Bijection between (key, time index) and model variable indices"""

    def __init__(self, keys: List[VarKey]):
        self.keys: Tuple[VarKey, ...] = tuple(keys)
        self._index: Dict[Tuple[VarKey, int], int] = {}
        self.times: List[int] = []

    def add(self, key: VarKey, i: int, index: int) -> None:
        if (key, i) in self._index:
            raise ValueError(f"duplicate variable {variable_name(key, i)}")
        self._index[(key, i)] = index
        if i not in self.times:
            self.times.append(i)

    def var_id(self, key: VarKey, i: int) -> int:
        try:
            return self._index[(key, i)]
        except KeyError:
            raise KeyError(f"no variable {variable_name(key, i)}") from None

    def get(self, key: VarKey, i: int) -> Optional[int]:
        return self._index.get((key, i))

    def __contains__(self, item: Tuple[VarKey, int]) -> bool:
        return item in self._index

    def __len__(self) -> int:
        return len(self._index)

    def items(self) -> Iterator[Tuple[Tuple[VarKey, int], int]]:
        return iter(self._index.items())

    def layer_values(self, point, i: int) -> Dict[VarKey, float]:
        x = np.asarray(point, dtype=float)
        return {key: float(x[self._index[(key, i)]]) for key in self.keys if (key, i) in self._index}

    def fill(self, point: np.ndarray, layers: Mapping[int, Mapping[VarKey, float]]) -> np.ndarray:
        """Copy known layer values into ``point`` (unknown keys are left untouched)"""
        x = np.array(point, dtype=float)
        for i, values in layers.items():
            for key, value in values.items():
                index = self._index.get((key, i))
                if index is not None:
                    x[index] = value
        return x
