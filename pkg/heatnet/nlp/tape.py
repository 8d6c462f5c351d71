"""
Compiled evaluation tape for a list of expression roots.

Every root is compiled with its own memo, so no tape node is shared between
roots and each node has exactly one owner. Forward and reverse sweeps are
vectorized over groups of nodes with equal (level, op).
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from heatnet.nlp.expr import (
    ADD,
    CONST,
    DIV,
    MUL,
    NEG,
    POW,
    SABS,
    SQRT,
    SUB,
    VAR,
    Expr,
    topological_order,
)

DIVISION_GUARD = 1e-300


class TapeDomainError(ArithmeticError):
    def __init__(self, root: int, message: str):
        super().__init__(message)
        self.root = root


class Tape:
    def __init__(self, roots: Sequence[Expr], n_vars: int):
        ops: List[int] = []
        arg_a: List[int] = []
        arg_b: List[int] = []
        params: List[float] = []
        var_index: List[int] = []
        levels: List[int] = []
        owners: List[int] = []
        root_nodes: List[int] = []

        for r, root in enumerate(roots):
            memo = {}
            for node in topological_order([root]):
                memo[id(node)] = len(ops)
                args = [memo[id(child)] for child in node.args]
                ops.append(node.op)
                arg_a.append(args[0] if args else -1)
                arg_b.append(args[1] if len(args) > 1 else -1)
                params.append(node.param)
                var_index.append(node.index if node.op == VAR else -1)
                levels.append(1 + max(levels[i] for i in args) if args else 0)
                owners.append(r)
            root_nodes.append(memo[id(root)])

        self.n_vars = int(n_vars)
        self.n_roots = len(root_nodes)
        self.op = np.asarray(ops, dtype=np.int8)
        self.a = np.asarray(arg_a, dtype=np.int64)
        self.b = np.asarray(arg_b, dtype=np.int64)
        self.param = np.asarray(params, dtype=float)
        self.var = np.asarray(var_index, dtype=np.int64)
        self.level = np.asarray(levels, dtype=np.int64)
        self.owner = np.asarray(owners, dtype=np.int64)
        self.roots = np.asarray(root_nodes, dtype=np.int64)

        self.const_nodes = np.flatnonzero(self.op == CONST)
        self.leaf_nodes = np.flatnonzero(self.op == VAR)
        self.leaf_var = self.var[self.leaf_nodes]
        self.leaf_owner = self.owner[self.leaf_nodes]
        if self.leaf_var.size and (self.leaf_var.min() < 0 or self.leaf_var.max() >= self.n_vars):
            raise ValueError("expression references a variable outside the model")

        self._groups: List[Tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        order = np.lexsort((self.op, self.level))
        interior = order[self.level[order] > 0]
        if interior.size:
            keys = self.level[interior] * 16 + self.op[interior]
            splits = np.flatnonzero(np.diff(keys)) + 1
            for chunk in np.split(interior, splits):
                self._groups.append(
                    (int(self.op[chunk[0]]), chunk, self.a[chunk], self.b[chunk], self.param[chunk])
                )

    @property
    def size(self) -> int:
        return int(self.op.size)

    def forward(self, point: np.ndarray) -> np.ndarray:
        """Node values at ``point``; raises TapeDomainError on sqrt(<0) or x/~0"""
        x = np.asarray(point, dtype=float)
        v = np.empty(self.size)
        v[self.const_nodes] = self.param[self.const_nodes]
        v[self.leaf_nodes] = x[self.leaf_var]
        with np.errstate(all="ignore"):
            for op, idx, ia, ib, p in self._groups:
                va = v[ia]
                if op == ADD:
                    v[idx] = va + v[ib]
                elif op == SUB:
                    v[idx] = va - v[ib]
                elif op == MUL:
                    v[idx] = va * v[ib]
                elif op == DIV:
                    vb = v[ib]
                    self._check(idx, np.abs(vb) < DIVISION_GUARD, "division by ~0")
                    v[idx] = va / vb
                elif op == POW:
                    bad = (va < 0) & (p != np.round(p))
                    bad |= (va == 0) & (p < 0)
                    self._check(idx, bad, "power outside its domain")
                    v[idx] = va ** p
                elif op == SQRT:
                    self._check(idx, va < 0, "sqrt of negative value")
                    v[idx] = np.sqrt(va)
                elif op == SABS:
                    v[idx] = np.sqrt(va * va + p * p) - p
                elif op == NEG:
                    v[idx] = -va
        return v

    def _check(self, idx: np.ndarray, bad: np.ndarray, message: str) -> None:
        if np.any(bad):
            node = int(idx[np.flatnonzero(bad)[0]])
            raise TapeDomainError(int(self.owner[node]), message)

    def root_values(self, values: np.ndarray) -> np.ndarray:
        return values[self.roots]

    def reverse(self, values: np.ndarray, seeds: np.ndarray) -> np.ndarray:
        """Adjoint of every node for the seeded sum of roots"""
        adj = np.zeros(self.size)
        np.add.at(adj, self.roots, np.asarray(seeds, dtype=float))
        with np.errstate(all="ignore"):
            for op, idx, ia, ib, p in reversed(self._groups):
                g = adj[idx]
                if op == ADD:
                    np.add.at(adj, ia, g)
                    np.add.at(adj, ib, g)
                elif op == SUB:
                    np.add.at(adj, ia, g)
                    np.add.at(adj, ib, -g)
                elif op == MUL:
                    np.add.at(adj, ia, g * values[ib])
                    np.add.at(adj, ib, g * values[ia])
                elif op == DIV:
                    vb = values[ib]
                    np.add.at(adj, ia, g / vb)
                    np.add.at(adj, ib, -g * values[idx] / vb)
                elif op == POW:
                    np.add.at(adj, ia, g * p * values[ia] ** (p - 1.0))
                elif op == SQRT:
                    out = values[idx]
                    local = np.divide(0.5, out, out=np.zeros_like(out), where=out > 0)
                    np.add.at(adj, ia, g * local)
                elif op == SABS:
                    np.add.at(adj, ia, g * values[ia] / (values[idx] + p))
                elif op == NEG:
                    np.add.at(adj, ia, -g)
        return adj

    def gradient(self, values: np.ndarray, seeds: np.ndarray, mask: Optional[np.ndarray] = None) -> np.ndarray:
        """Dense gradient of Σ seeds_r·root_r with respect to the variables"""
        adj = self.reverse(values, seeds)
        leaves = self.leaf_nodes if mask is None else self.leaf_nodes[mask]
        return np.bincount(self.var[leaves], weights=adj[leaves], minlength=self.n_vars)
