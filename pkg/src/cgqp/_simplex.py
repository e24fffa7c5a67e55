"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves   min c @ x   s.t.  (A x)_r <= b_r or == b_r per row sense,  x >= 0.

Scale target is small restricted master problems (tens of rows, a few hundred
columns), so the tableau is kept dense and re-derived nothing is factorized.
Artificial variables are added to every row, which makes the final tableau's
artificial block equal to B^{-1}; row duals fall out of it directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9

LE = "<="
EQ = "=="


class LpInfeasibleError(Exception):
    """LP has no feasible point; ``rows`` lists the offending row indices."""

    def __init__(self, rows):
        super().__init__(f"infeasible LP; unsatisfiable rows: {list(rows)}")
        self.rows = list(rows)


@dataclass
class LpSolution:
    x: np.ndarray      # structural variables
    obj: float
    duals: np.ndarray  # one multiplier per input row, original orientation


def _pivot(T, basis, r, j):
    T[r] /= T[r, j]
    factors = T[:, j].copy()
    factors[r] = 0.0
    T -= np.outer(factors, T[r])
    basis[r] = j


def _bland_optimize(T, basis, cost, enterable, tol):
    """Run Bland-rule pivots to optimality.  ``enterable`` masks columns that
    may enter the basis."""
    ncols = cost.size
    max_pivots = 10000 + 200 * ncols
    for _ in range(max_pivots):
        rc = cost - cost[basis] @ T[:, :ncols]
        candidates = np.flatnonzero(enterable & (rc < -tol))
        candidates = candidates[~np.isin(candidates, basis)]
        if candidates.size == 0:
            return
        j = int(candidates[0])
        col = T[:, j]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            raise RuntimeError("LP is unbounded")
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        tied = rows[ratios == rmin]
        r = int(tied[np.argmin(basis[tied])])
        _pivot(T, basis, r, j)
    raise RuntimeError("simplex pivot limit exceeded")


def solve_lp(c, A, b, senses, tol: float = PIVOT_TOL) -> LpSolution:
    c = np.asarray(c, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64).reshape(len(b), c.size)
    b = np.asarray(b, dtype=np.float64)
    rows, n_struct = A.shape
    if len(senses) != rows:
        raise ValueError("one sense per row required")

    slack_rows = [r for r, s in enumerate(senses) if s == LE]
    n_slack = len(slack_rows)
    M = np.zeros((rows, n_struct + n_slack))
    M[:, :n_struct] = A
    for idx, r in enumerate(slack_rows):
        M[r, n_struct + idx] = 1.0
    rhs = b.copy()
    flipped = rhs < 0
    M[flipped] *= -1.0
    rhs[flipped] *= -1.0

    art0 = n_struct + n_slack
    ncols = art0 + rows
    T = np.zeros((rows, ncols + 1))
    T[:, :art0] = M
    T[:, art0:ncols] = np.eye(rows)
    T[:, -1] = rhs
    basis = np.arange(art0, ncols)

    enterable = np.ones(ncols, dtype=bool)
    enterable[art0:] = False  # artificials may leave but never re-enter

    # Phase 1: drive the artificial sum to zero.
    cost1 = np.zeros(ncols)
    cost1[art0:] = 1.0
    _bland_optimize(T, basis, cost1, enterable, tol)
    infeasible = [int(basis[r] - art0) for r in range(rows)
                  if basis[r] >= art0 and T[r, -1] > tol]
    if infeasible:
        raise LpInfeasibleError(infeasible)
    # Pivot out artificials stuck in the basis at zero; rows with no
    # eligible column are redundant and keep their artificial at level 0.
    for r in range(rows):
        if basis[r] >= art0:
            eligible = np.flatnonzero((np.abs(T[r, :art0]) > tol) & ~np.isin(np.arange(art0), basis))
            if eligible.size:
                _pivot(T, basis, r, int(eligible[0]))

    # Phase 2: original costs, artificials barred.
    cost2 = np.zeros(ncols)
    cost2[:n_struct] = c
    _bland_optimize(T, basis, cost2, enterable, tol)

    x_full = np.zeros(ncols)
    x_full[basis] = T[:, -1]
    x = x_full[:n_struct]
    # The artificial block of the tableau is B^{-1}, so y = c_B @ B^{-1}.
    y = cost2[basis] @ T[:, art0:ncols]
    y[flipped] *= -1.0
    return LpSolution(x=x, obj=float(c @ x), duals=y)
