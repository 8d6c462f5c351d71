import math
from typing import Optional

import numpy as np

from heatnet.nlp.model import NlpModel


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.12g}"


def dump_model(model: NlpModel, point: Optional[np.ndarray] = None) -> str:
    """Textual listing of variables, bounds, constraints and objective"""
    names = [v.name for v in model.variables]
    lines = [f"# {model!r}", "[variables]"]
    for i, v in enumerate(model.variables):
        value = "" if point is None else f" value={_fmt(float(point[i]))}"
        lines.append(f"{i:6d} {v.name} [{_fmt(v.lo)}, {_fmt(v.hi)}] init={_fmt(v.initial)} scale={_fmt(v.scale)}{value}")
    lines.append("[constraints]")
    for j, c in enumerate(model.constraints):
        relation = "= 0" if c.relation.value == "eq0" else ">= 0"
        lines.append(
            f"{j:6d} {c.name} <{c.family.value}, {c.slack_policy.value}, scale={_fmt(c.scale)}>: "
            f"{c.expr.to_text(names.__getitem__)} {relation}"
        )
    if model.slacks is not None and model.slacks.size:
        lines.append("[slacks]")
        block = model.slacks
        for k in range(block.size):
            lines.append(
                f"{block.offset + k:6d} row={int(block.constraint[k])} sign={int(block.sign[k]):+d} "
                f"weight={_fmt(float(block.weights[k]))}"
            )
    lines.append("[objective]")
    lines.append(model.objective.to_text(names.__getitem__))
    return "\n".join(lines) + "\n"
