"""
Penalty formulation: nonnegative slacks on selected constraints, priced in
the objective with the weighted l1 norm Σ w_j s_j.
"""

import logging
import math
from typing import Mapping, Optional

import numpy as np

from heatnet.core.config import settings
from heatnet.nlp.model import NlpModel, Relation, SlackBlock, SlackPolicy, Variable

logger = logging.getLogger(__name__)


def default_slack_policy(family: str, relation: Relation) -> SlackPolicy:
    """Slacks on the configured (nonlinear) families only"""
    if family not in settings.slack_families:
        return SlackPolicy.NONE
    return SlackPolicy.TWO_SIDED if relation is Relation.EQ else SlackPolicy.ONE_SIDED


def add_slacks(model: NlpModel, weights: Optional[Mapping[str, float]] = None) -> NlpModel:
    """
    Append slack variables per constraint policy.

    eq0 rows with two_sided policy get ``c + s⁺ - s⁻ = 0``; ge0 rows with
    one_sided policy get ``c + s⁺ >= 0``. Fixing every slack to zero gives
    back the original model.
    """
    if model.slacks is not None:
        raise ValueError(f"model {model.name!r} already carries slacks")
    family_weights = dict(settings.slack_weights)
    family_weights.update(weights or {})

    variables = list(model.variables)
    rows, signs, w = [], [], []
    for i, c in enumerate(model.constraints):
        if c.slack_policy is SlackPolicy.NONE:
            continue
        weight = float(family_weights.get(c.family.value, 1.0))
        if weight <= 0:
            raise ValueError(f"slack weight for {c.family.value} must be positive")
        label = c.name or f"c{i}"
        parts = [("+", 1.0)] if c.slack_policy is SlackPolicy.ONE_SIDED else [("+", 1.0), ("-", -1.0)]
        for suffix, sign in parts:
            variables.append(Variable(f"s{suffix}[{label}]", lo=0.0, hi=math.inf, initial=0.0, scale=c.scale))
            rows.append(i)
            signs.append(sign)
            w.append(weight)

    if not rows:
        return model

    block = SlackBlock(
        offset=model.n_vars,
        constraint=np.asarray(rows, dtype=np.int64),
        sign=np.asarray(signs, dtype=float),
        weights=np.asarray(w, dtype=float),
    )
    slacked = NlpModel(variables, model.constraints, model.objective, block, model.tape, model.name)
    logger.debug(f"added {block.size} slacks to {model.name}")
    return slacked


def scaled_slack_norm(model: NlpModel, point) -> float:
    """max_j w_j s_j (0 for a model without slacks)"""
    if model.slacks is None or model.slacks.size == 0:
        return 0.0
    return float(np.max(model.slacks.weights * model.slacks.values(point)))


def extend_point(model: NlpModel, base_point) -> np.ndarray:
    """Pad a point of the unslacked variables with zero slacks"""
    base_point = np.asarray(base_point, dtype=float)
    point = np.zeros(model.n_vars)
    point[:base_point.size] = base_point
    return point


def initialize_slacks(model: NlpModel, point) -> np.ndarray:
    """Set slacks so that every slacked row holds exactly at ``point``"""
    point = np.array(point, dtype=float)
    if model.slacks is None or model.slacks.size == 0:
        return point
    block = model.slacks
    point[block.offset:block.offset + block.size] = 0.0
    _, residuals = model.evaluate(point)
    r = residuals[block.constraint]
    # + slacks cover negative residuals, - slacks positive ones (eq0 only)
    values = np.where(block.sign > 0, np.maximum(-r, 0.0), np.maximum(r, 0.0))
    point[block.offset:block.offset + block.size] = values
    return point
