"""
Generic NLP/MPCC container.

An ``NlpModel`` holds bounded variables, constraints ``c(x) = 0`` or
``c(x) >= 0`` and an objective, all as expression DAGs compiled into one
tape. Slack variables added by ``add_slacks`` are kept in a linear block
outside the tape: residual_j += ±s and objective += Σ w s.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from heatnet.core.exceptions import EvaluationDomainError
from heatnet.nlp.expr import Expr, as_expr
from heatnet.nlp.tape import Tape, TapeDomainError

logger = logging.getLogger(__name__)


class Relation(str, Enum):
    EQ = "eq0"
    GE = "ge0"


class SlackPolicy(str, Enum):
    NONE = "none"
    TWO_SIDED = "two_sided"
    ONE_SIDED = "one_sided"


class Family(str, Enum):
    MOMENTUM = "momentum"
    ENERGY = "energy"
    MASS_BALANCE = "mass_balance"
    PRESSURE = "pressure"
    MIXING = "mixing"
    CONSUMER = "consumer"
    DEPOT = "depot"
    RAMP = "ramp"
    COMPLEMENTARITY = "complementarity"


@dataclass(frozen=True)
class Variable:
    name: str
    lo: float = -math.inf
    hi: float = math.inf
    initial: Optional[float] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"variable {self.name}: empty bounds [{self.lo}, {self.hi}]")
        if self.scale <= 0:
            raise ValueError(f"variable {self.name}: scale must be positive")
        initial = self.initial
        if initial is None:
            # midpoint of bounds, or the finite end, or zero
            if math.isfinite(self.lo) and math.isfinite(self.hi):
                initial = 0.5 * (self.lo + self.hi)
            elif math.isfinite(self.lo):
                initial = max(self.lo, 0.0)
            elif math.isfinite(self.hi):
                initial = min(self.hi, 0.0)
            else:
                initial = 0.0
        object.__setattr__(self, "initial", float(min(max(initial, self.lo), self.hi)))


@dataclass(frozen=True)
class Constraint:
    expr: Expr
    relation: Relation
    family: Family
    slack_policy: SlackPolicy = SlackPolicy.NONE
    scale: float = 1.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "expr", as_expr(self.expr))
        if self.relation is Relation.GE and self.slack_policy is SlackPolicy.TWO_SIDED:
            raise ValueError(f"constraint {self.name}: ge0 rows only take one-sided slacks")
        if self.scale <= 0:
            raise ValueError(f"constraint {self.name}: scale must be positive")


@dataclass(frozen=True)
class SlackBlock:
    """Slack j enters residual ``constraint[j]`` with ``sign[j]`` and costs ``weights[j]``"""
    offset: int
    constraint: np.ndarray
    sign: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.constraint.size)

    def values(self, point: np.ndarray) -> np.ndarray:
        return np.asarray(point, dtype=float)[self.offset:self.offset + self.size]


@dataclass
class Evaluation:
    point: np.ndarray
    values: np.ndarray
    objective: float
    residuals: np.ndarray


class NlpModel:
    def __init__(
        self,
        variables: Sequence[Variable],
        constraints: Sequence[Constraint],
        objective,
        slacks: Optional[SlackBlock] = None,
        tape: Optional[Tape] = None,
        name: str = "model",
    ):
        self.name = name
        self.variables: Tuple[Variable, ...] = tuple(variables)
        self.constraints: Tuple[Constraint, ...] = tuple(constraints)
        self.objective = as_expr(objective)
        self.slacks = slacks
        self.n_base = slacks.offset if slacks is not None else len(self.variables)
        self.tape = tape or Tape([c.expr for c in self.constraints] + [self.objective], self.n_base)

        self.lower = np.array([v.lo for v in self.variables], dtype=float)
        self.upper = np.array([v.hi for v in self.variables], dtype=float)
        self.initial = np.array([v.initial for v in self.variables], dtype=float)
        self.var_scale = np.array([v.scale for v in self.variables], dtype=float)
        self.con_scale = np.array([c.scale for c in self.constraints], dtype=float)
        self.is_equality = np.array([c.relation is Relation.EQ for c in self.constraints], dtype=bool)
        self._names: Optional[Dict[str, int]] = None

        m = len(self.constraints)
        leaf_owner = self.tape.leaf_owner
        self._con_leaves = leaf_owner < m
        self._jac_rows = leaf_owner[self._con_leaves]
        self._jac_cols = self.tape.leaf_var[self._con_leaves]
        self._obj_leaves = leaf_owner == m

    # ------------------------------------------------------------------ #
    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def index(self, name: str) -> int:
        if self._names is None:
            self._names = {v.name: i for i, v in enumerate(self.variables)}
        return self._names[name]

    def families(self) -> Dict[Family, int]:
        counts: Dict[Family, int] = {}
        for c in self.constraints:
            counts[c.family] = counts.get(c.family, 0) + 1
        return counts

    # ------------------------------------------------------------------ #
    def forward(self, point) -> Evaluation:
        x = np.asarray(point, dtype=float)
        if x.shape != (self.n_vars,):
            raise ValueError(f"point has shape {x.shape}, model has {self.n_vars} variables")
        try:
            values = self.tape.forward(x)
        except TapeDomainError as exc:
            if exc.root < self.n_constraints:
                name = self.constraints[exc.root].name or f"c{exc.root}"
            else:
                name = "objective"
            raise EvaluationDomainError(f"{exc} in {name}", exc.root, name) from None
        roots = self.tape.root_values(values)
        residuals = roots[:-1].copy()
        objective = float(roots[-1])
        if self.slacks is not None and self.slacks.size:
            s = self.slacks.values(x)
            np.add.at(residuals, self.slacks.constraint, self.slacks.sign * s)
            objective += float(self.slacks.weights @ s)
        return Evaluation(point=x, values=values, objective=objective, residuals=residuals)

    def evaluate(self, point) -> Tuple[float, np.ndarray]:
        ev = self.forward(point)
        return ev.objective, ev.residuals

    def cost(self, point) -> float:
        """Objective without slack penalties"""
        ev = self.forward(point)
        return float(self.tape.root_values(ev.values)[-1])

    def penalty(self, point) -> float:
        if self.slacks is None:
            return 0.0
        return float(self.slacks.weights @ self.slacks.values(point))

    def vjp(self, ev: Evaluation, obj_seed: float, con_seeds: np.ndarray) -> np.ndarray:
        """Gradient of obj_seed·objective + Σ con_seeds·residuals"""
        seeds = np.append(np.asarray(con_seeds, dtype=float), obj_seed)
        grad = np.zeros(self.n_vars)
        grad[:self.n_base] = self.tape.gradient(ev.values, seeds)
        if self.slacks is not None and self.slacks.size:
            s = slice(self.slacks.offset, self.slacks.offset + self.slacks.size)
            grad[s] = obj_seed * self.slacks.weights + self.slacks.sign * seeds[self.slacks.constraint]
        return grad

    def gradient(self, point) -> Tuple[np.ndarray, sparse.csr_matrix]:
        ev = self.forward(point)
        return self.derivatives(ev)

    def derivatives(self, ev: Evaluation) -> Tuple[np.ndarray, sparse.csr_matrix]:
        m = self.n_constraints
        adj = self.tape.reverse(ev.values, np.ones(m + 1))
        leaves = self.tape.leaf_nodes
        grad = np.zeros(self.n_vars)
        grad[:self.n_base] = np.bincount(
            self.tape.leaf_var[self._obj_leaves],
            weights=adj[leaves[self._obj_leaves]],
            minlength=self.n_base,
        )
        rows = [self._jac_rows]
        cols = [self._jac_cols]
        data = [adj[leaves[self._con_leaves]]]
        if self.slacks is not None and self.slacks.size:
            grad[self.slacks.offset:] = self.slacks.weights
            rows.append(self.slacks.constraint)
            cols.append(self.slacks.offset + np.arange(self.slacks.size))
            data.append(self.slacks.sign.astype(float))
        jac = sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(m, self.n_vars),
        ).tocsr()
        return grad, jac

    def violation(self, residuals: np.ndarray, scaled: bool = True) -> np.ndarray:
        """Per-row violation: |c| for eq0 rows, max(-c, 0) for ge0 rows"""
        r = residuals / self.con_scale if scaled else residuals
        return np.where(self.is_equality, np.abs(r), np.maximum(-r, 0.0))

    def max_violation(self, point, scaled: bool = True) -> float:
        _, residuals = self.evaluate(point)
        v = self.violation(residuals, scaled)
        return float(v.max()) if v.size else 0.0

    # ------------------------------------------------------------------ #
    def with_initial(self, point) -> "NlpModel":
        point = np.asarray(point, dtype=float)
        variables = [replace(v, initial=float(x)) for v, x in zip(self.variables, point)]
        return NlpModel(variables, self.constraints, self.objective, self.slacks, self.tape, self.name)

    def with_slack_weights(self, weights) -> "NlpModel":
        if self.slacks is None:
            raise ValueError("model has no slacks")
        weights = np.asarray(weights, dtype=float)
        if weights.shape != self.slacks.weights.shape or np.any(weights <= 0):
            raise ValueError("slack weights must be positive, one per slack")
        block = replace(self.slacks, weights=weights)
        return NlpModel(self.variables, self.constraints, self.objective, block, self.tape, self.name)

    def with_constraints(self, updates: Mapping[int, Constraint]) -> "NlpModel":
        """Replace constraints by index (tape is recompiled)"""
        constraints = list(self.constraints)
        for i, c in updates.items():
            constraints[i] = c
        return NlpModel(self.variables, constraints, self.objective, self.slacks, None, self.name)

    def with_bounds(self, lower, upper) -> "NlpModel":
        variables = [
            replace(v, lo=float(lo), hi=float(hi), initial=min(max(v.initial, lo), hi))
            for v, lo, hi in zip(self.variables, lower, upper)
        ]
        return NlpModel(variables, self.constraints, self.objective, self.slacks, self.tape, self.name)

    def __repr__(self) -> str:
        n_slack = self.slacks.size if self.slacks is not None else 0
        return (
            f"NlpModel({self.name!r}, vars={self.n_vars}, slacks={n_slack}, "
            f"constraints={self.n_constraints}, tape={self.tape.size})"
        )


def evaluate(model: NlpModel, point) -> Tuple[float, np.ndarray]:
    """Objective and residual vector (eq0: value, ge0: value, feasible iff >= 0)"""
    return model.evaluate(point)


def gradient(model: NlpModel, point) -> Tuple[np.ndarray, sparse.csr_matrix]:
    """Objective gradient and sparse constraint Jacobian by reverse sweep"""
    return model.gradient(point)
