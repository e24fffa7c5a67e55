"""Restricted master problem: column pool and LP solve with dual recovery.

The master LP over a pool of binary extreme points x^p is

    min  sum_p cost_p * w_p
    s.t. sum_p activity_kp * w_p <= b_k   for every constraint k
         sum_p w_p = 1
         w >= 0

Duals follow the min/<= convention: mu_k <= 0 for the inequality rows and a
free sigma for the convexity row, so the reduced cost of a column is
cost_p - mu @ activity_p - sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._simplex import EQ, LE, LpInfeasibleError, solve_lp
from .instance import ProblemInstance, as_bits, bits_key, eval_quadratic_form


class RmpInfeasibleError(Exception):
    """Master LP infeasible; ``rows`` are the violated constraint indices
    (value m means the convexity row)."""

    def __init__(self, rows):
        super().__init__(f"restricted master problem infeasible; violated rows: {list(rows)}")
        self.rows = list(rows)


@dataclass
class Column:
    """Extreme point with its objective cost and constraint activities."""

    x: np.ndarray
    cost: float
    activity: np.ndarray

    def key(self) -> bytes:
        return bits_key(self.x)


def build_column(inst: ProblemInstance, x) -> Column:
    bits = as_bits(x, inst.n)
    cost = eval_quadratic_form(inst.Q, bits)
    activity = np.array([eval_quadratic_form(inst.A[k], bits) for k in range(inst.m)])
    return Column(x=bits, cost=cost, activity=activity)


@dataclass
class ColumnPool:
    """Insertion-ordered pool of distinct columns."""

    columns: list[Column] = field(default_factory=list)
    _index: set[bytes] = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def contains(self, x) -> bool:
        return bits_key(x) in self._index

    def add(self, col: Column) -> None:
        key = col.key()
        if key in self._index:
            raise ValueError("duplicate column for bit string already in pool")
        self._index.add(key)
        self.columns.append(col)

    def solutions(self) -> list[np.ndarray]:
        return [col.x for col in self.columns]


@dataclass
class RmpSolution:
    weights: np.ndarray   # lambda, one per pooled column
    primal_obj: float
    mu: np.ndarray        # inequality-row duals, <= 0
    sigma: float          # convexity-row dual

    def dual_obj(self, b) -> float:
        return float(np.dot(b, self.mu) + self.sigma)


def solve_rmp(pool: ColumnPool, b) -> RmpSolution:
    """Solve the master LP over the pool, returning weights and duals."""
    if len(pool) == 0:
        raise ValueError("column pool is empty")
    b = np.asarray(b, dtype=np.float64)
    m = b.size
    costs = np.array([col.cost for col in pool])
    acts = np.array([col.activity for col in pool]).reshape(len(pool), m)
    A = np.vstack([acts.T, np.ones((1, len(pool)))])
    rhs = np.concatenate([b, [1.0]])
    senses = [LE] * m + [EQ]
    try:
        sol = solve_lp(costs, A, rhs, senses)
    except LpInfeasibleError as exc:
        raise RmpInfeasibleError(exc.rows) from exc
    return RmpSolution(weights=sol.x, primal_obj=sol.obj,
                       mu=sol.duals[:m], sigma=float(sol.duals[m]))
