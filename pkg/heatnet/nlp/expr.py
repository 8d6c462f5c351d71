"""
Expression DAG with operator overloading.

Nodes are immutable; arithmetic with Python numbers folds constants eagerly
so that substituting fixed time layers yields compact expressions. Values
and derivatives of whole models are computed by a compiled tape
(``heatnet.nlp.tape``); ``Expr.value`` is a small recursive evaluator for
single expressions.
"""

import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Union

from heatnet.core.config import settings

CONST, VAR, ADD, SUB, MUL, DIV, POW, SQRT, SABS, NEG = range(10)

OP_NAMES = {
    CONST: "const",
    VAR: "var",
    ADD: "+",
    SUB: "-",
    MUL: "*",
    DIV: "/",
    POW: "**",
    SQRT: "sqrt",
    SABS: "sabs",
    NEG: "neg",
}

Number = Union[int, float]


class Expr:
    __slots__ = ("op", "args", "param", "index")

    # keep numpy scalars from broadcasting over expressions
    __array_ufunc__ = None

    def __init__(self, op: int, args: tuple = (), param: float = 0.0, index: int = -1):
        self.op = op
        self.args = args
        self.param = param
        self.index = index

    # ---------------------------------------------------------------- #
    @property
    def is_const(self) -> bool:
        return self.op == CONST

    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        if self.op == CONST and other.op == CONST:
            return const(self.param + other.param)
        if other.op == CONST and other.param == 0.0:
            return self
        if self.op == CONST and self.param == 0.0:
            return other
        return Expr(ADD, (self, other))

    def __radd__(self, other) -> "Expr":
        return as_expr(other) + self

    def __sub__(self, other) -> "Expr":
        other = as_expr(other)
        if self.op == CONST and other.op == CONST:
            return const(self.param - other.param)
        if other.op == CONST and other.param == 0.0:
            return self
        if self.op == CONST and self.param == 0.0:
            return -other
        return Expr(SUB, (self, other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) - self

    def __mul__(self, other) -> "Expr":
        other = as_expr(other)
        if self.op == CONST and other.op == CONST:
            return const(self.param * other.param)
        for a, b in ((self, other), (other, self)):
            if a.op == CONST:
                if a.param == 0.0:
                    return const(0.0)
                if a.param == 1.0:
                    return b
                if a.param == -1.0:
                    return -b
        return Expr(MUL, (self, other))

    def __rmul__(self, other) -> "Expr":
        return as_expr(other) * self

    def __truediv__(self, other) -> "Expr":
        other = as_expr(other)
        if other.op == CONST:
            if other.param == 0.0:
                raise ZeroDivisionError("division by constant zero")
            if self.op == CONST:
                return const(self.param / other.param)
            return self * (1.0 / other.param)
        return Expr(DIV, (self, other))

    def __rtruediv__(self, other) -> "Expr":
        return as_expr(other) / self

    def __neg__(self) -> "Expr":
        if self.op == CONST:
            return const(-self.param)
        if self.op == NEG:
            return self.args[0]
        return Expr(NEG, (self,))

    def __pos__(self) -> "Expr":
        return self

    def __pow__(self, exponent: Number) -> "Expr":
        if isinstance(exponent, Expr):
            if exponent.op != CONST:
                raise TypeError("only constant exponents are supported")
            exponent = exponent.param
        exponent = float(exponent)
        if self.op == CONST:
            return const(self.param ** exponent)
        if exponent == 1.0:
            return self
        if exponent == 0.0:
            return const(1.0)
        return Expr(POW, (self,), param=exponent)

    # ---------------------------------------------------------------- #
    def value(self, point: Sequence[float]) -> float:
        """Evaluate at ``point`` (indexable by variable index)"""
        memo: Dict[int, float] = {}
        for node in topological_order([self]):
            memo[id(node)] = _apply(node, [memo[id(a)] for a in node.args], point)
        return memo[id(self)]

    def variables(self) -> Set[int]:
        return {n.index for n in topological_order([self]) if n.op == VAR}

    def to_text(self, names: Optional[Callable[[int], str]] = None) -> str:
        names = names or (lambda i: f"x{i}")
        return _format(self, names)

    def __repr__(self) -> str:
        return f"Expr({self.to_text()})"


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return const(float(value))


def const(value: float) -> Expr:
    return Expr(CONST, param=float(value))


def var(index: int) -> Expr:
    return Expr(VAR, index=int(index))


def sqrt(x) -> Expr:
    x = as_expr(x)
    if x.op == CONST:
        if x.param < 0:
            raise ValueError(f"sqrt of negative constant {x.param}")
        return const(math.sqrt(x.param))
    return Expr(SQRT, (x,))


def smooth_abs(x, epsilon: Optional[float] = None) -> Expr:
    """sqrt(x² + ε²) - ε: zero at zero, below |x| everywhere, smooth"""
    eps = settings.SMOOTH_ABS_EPSILON if epsilon is None else float(epsilon)
    x = as_expr(x)
    if x.op == CONST:
        return const(math.sqrt(x.param * x.param + eps * eps) - eps)
    return Expr(SABS, (x,), param=eps)


def sum_exprs(terms: Iterable) -> Expr:
    """Balanced binary sum keeps tape depth logarithmic in the term count"""
    items: List[Expr] = [as_expr(t) for t in terms]
    constant = sum(t.param for t in items if t.op == CONST)
    items = [t for t in items if t.op != CONST]
    if constant != 0.0 or not items:
        items.append(const(constant))
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def topological_order(roots: Sequence[Expr]) -> List[Expr]:
    """Children-first order of all nodes reachable from ``roots`` (iterative DFS)"""
    order: List[Expr] = []
    seen: Set[int] = set()
    for root in roots:
        if id(root) in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for child in reversed(node.args):
                if id(child) not in seen:
                    stack.append((child, False))
    return order


def _apply(node: Expr, args: List[float], point: Sequence[float]) -> float:
    op = node.op
    if op == CONST:
        return node.param
    if op == VAR:
        return float(point[node.index])
    if op == ADD:
        return args[0] + args[1]
    if op == SUB:
        return args[0] - args[1]
    if op == MUL:
        return args[0] * args[1]
    if op == DIV:
        return args[0] / args[1]
    if op == POW:
        return args[0] ** node.param
    if op == SQRT:
        return math.sqrt(args[0])
    if op == SABS:
        return math.sqrt(args[0] * args[0] + node.param * node.param) - node.param
    if op == NEG:
        return -args[0]
    raise ValueError(f"unknown op {op}")


def _format(root: Expr, names: Callable[[int], str]) -> str:
    text: Dict[int, str] = {}
    for node in topological_order([root]):
        op = node.op
        args = [text[id(a)] for a in node.args]
        if op == CONST:
            text[id(node)] = f"{node.param:.12g}"
        elif op == VAR:
            text[id(node)] = names(node.index)
        elif op in (ADD, SUB, MUL, DIV):
            text[id(node)] = f"({args[0]} {OP_NAMES[op]} {args[1]})"
        elif op == POW:
            text[id(node)] = f"({args[0]} ** {node.param:.12g})"
        elif op == SABS:
            text[id(node)] = f"sabs({args[0]}; {node.param:.3g})"
        elif op == NEG:
            text[id(node)] = f"(-{args[0]})"
        else:
            text[id(node)] = f"{OP_NAMES[op]}({args[0]})"
    return text[id(root)]
