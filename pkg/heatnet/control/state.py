"""State snapshots and stitched control trajectories"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional

import numpy as np

from heatnet.assemble.layout import VarKey, format_key, parse_key
from heatnet.core.exceptions import ScenarioError


@dataclass(frozen=True)
class StateSnapshot:
    """Values of every time-indexed variable at time point ``time_index``"""
    time_index: int
    values: Dict[VarKey, float]

    def __getitem__(self, key: VarKey) -> float:
        return self.values[key]

    def get(self, key: VarKey, default: Optional[float] = None) -> Optional[float]:
        return self.values.get(key, default)

    def at(self, time_index: int) -> "StateSnapshot":
        return StateSnapshot(time_index, dict(self.values))

    def require(self, keys: Iterable[VarKey]) -> None:
        missing = [k for k in keys if k not in self.values]
        if missing:
            raise ScenarioError(
                f"state at t={self.time_index} misses {len(missing)} value(s), first {format_key(missing[0])}",
                key=format_key(missing[0]),
            )

    def to_document(self) -> Dict[str, Any]:
        return {
            "t": self.time_index,
            "values": {format_key(k): v for k, v in self.values.items()},
        }

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "StateSnapshot":
        return cls.from_named(int(doc.get("t", 0)), doc["values"])

    @classmethod
    def from_named(cls, time_index: int, values: Mapping[str, float]) -> "StateSnapshot":
        try:
            parsed = {parse_key(name): float(v) for name, v in values.items()}
        except ValueError as exc:
            raise ScenarioError(str(exc), key="initial_state") from exc
        return cls(time_index, parsed)


@dataclass
class ControlTrajectory:
    """
    Snapshots for t_0..t_N plus per-phase metadata.

    ``step_times``, ``reweights`` and ``slack_norms`` hold one entry per
    instantaneous-control step when the trajectory comes from that phase.
    """
    snapshots: List[StateSnapshot]
    step_times: List[float] = field(default_factory=list)
    reweights: List[int] = field(default_factory=list)
    slack_norms: List[float] = field(default_factory=list)
    feasible: bool = True
    objective: Optional[float] = None
    cost: Optional[float] = None

    def __len__(self) -> int:
        return len(self.snapshots)

    def __getitem__(self, i: int) -> StateSnapshot:
        return self.snapshots[i]

    @property
    def solve_count(self) -> int:
        """Number of step solves including re-iterations"""
        return len(self.reweights) + sum(self.reweights)

    def layers(self) -> Dict[int, Dict[VarKey, float]]:
        return {s.time_index: s.values for s in self.snapshots}

    def series(self, key: VarKey) -> np.ndarray:
        return np.array([s.values[key] for s in self.snapshots], dtype=float)

    @classmethod
    def constant(cls, snapshot: StateSnapshot, steps: int) -> "ControlTrajectory":
        """``snapshot`` repeated on every time point"""
        return cls([snapshot.at(i) for i in range(steps + 1)])

    def to_document(self) -> Dict[str, Any]:
        return {
            "feasible": self.feasible,
            "objective": self.objective,
            "cost": self.cost,
            "step_times": [round(t, 3) for t in self.step_times],
            "reweights": list(self.reweights),
            "snapshots": [s.to_document() for s in self.snapshots],
        }

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "ControlTrajectory":
        return cls(
            snapshots=[StateSnapshot.from_document(s) for s in doc["snapshots"]],
            step_times=list(doc.get("step_times", [])),
            reweights=list(doc.get("reweights", [])),
            feasible=bool(doc.get("feasible", True)),
            objective=doc.get("objective"),
            cost=doc.get("cost"),
        )
