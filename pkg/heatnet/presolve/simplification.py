from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional

from heatnet.presolve.directions import DirectionFixing
from heatnet.schemas.enums import MixingModel


class FlowDirection(int, Enum):
    NEG = -1
    FREE = 0
    POS = 1


class FrictionForm(str, Enum):
    POSITIVE = "positive"    # +λρv²/(2D)
    NEGATIVE = "negative"    # -λρv²/(2D)
    SMOOTH = "smooth"        # λ·sabs(v)·v·ρ/(2D)


@dataclass(frozen=True)
class ArcSimplification:
    """Per-arc rewriting rules consumed by the assembler"""
    arc_id: str
    direction: FlowDirection
    friction: FrictionForm
    # MPCC: split variable pinned to zero ("q_neg" for pos, "q_pos" for neg)
    zero_part: Optional[str]
    # propagation rows become equalities (or vanish) instead of complementarity / (23) rows
    propagation_equalities: bool

    @property
    def flagged(self) -> bool:
        return self.direction is not FlowDirection.FREE

    @property
    def lower_sign_bound(self) -> bool:
        return self.direction is FlowDirection.POS

    @property
    def upper_sign_bound(self) -> bool:
        return self.direction is FlowDirection.NEG


_FRICTION = {
    FlowDirection.POS: FrictionForm.POSITIVE,
    FlowDirection.NEG: FrictionForm.NEGATIVE,
    FlowDirection.FREE: FrictionForm.SMOOTH,
}
_ZERO_PART = {FlowDirection.POS: "q_neg", FlowDirection.NEG: "q_pos", FlowDirection.FREE: None}


class SimplificationPlan:
    def __init__(self, mixing: MixingModel, arcs: Mapping[str, ArcSimplification]):
        self.mixing = mixing
        self.arcs: Dict[str, ArcSimplification] = dict(sorted(arcs.items()))

    def __getitem__(self, arc_id: str) -> ArcSimplification:
        return self.arcs[arc_id]

    def direction(self, arc_id: str) -> FlowDirection:
        return self.arcs[arc_id].direction

    @property
    def flagged(self) -> List[str]:
        return [a for a, s in self.arcs.items() if s.flagged]

    @property
    def undecided(self) -> List[str]:
        return [a for a, s in self.arcs.items() if not s.flagged]


def simplification_plan(fixing: DirectionFixing, mixing: MixingModel) -> SimplificationPlan:
    """Translate a direction fixing into friction, bound and mixing rewrites"""
    entries = {}
    for arc_id in fixing.pos | fixing.neg | fixing.undecided:
        direction = FlowDirection(fixing.sign(arc_id))
        entries[arc_id] = ArcSimplification(
            arc_id=arc_id,
            direction=direction,
            friction=_FRICTION[direction],
            zero_part=_ZERO_PART[direction] if mixing is MixingModel.MPCC else None,
            propagation_equalities=direction is not FlowDirection.FREE,
        )
    return SimplificationPlan(mixing, entries)
