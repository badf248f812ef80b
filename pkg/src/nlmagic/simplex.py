"""Dense two-phase primal simplex for small equality-form linear programs.

Solves  min c.x  subject to  A x = b, x >= 0  on a dense tableau.  Bland's
smallest-index rule is used for both the entering and the leaving variable,
which rules out cycling on the degenerate bases these L1 problems produce.
Problem sizes here are tiny (tens of rows, about a hundred columns), so
exactness and simplicity win over sparse machinery.
"""

from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
MAX_PIVOTS = 20000


class SimplexError(RuntimeError):
    """Infeasible system, unbounded objective, or pivot-limit exceeded."""


def _objective_row(tableau, basis, cost):
    """Reduced-cost row [c - c_B B^-1 A | -c_B B^-1 b] for the current basis."""
    c_b = cost[basis]
    row = np.empty(tableau.shape[1])
    row[:-1] = cost - c_b @ tableau[:, :-1]
    row[-1] = -c_b @ tableau[:, -1]
    return row


def _pivot(tableau, obj, basis, row, col):
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    obj -= obj[col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau, obj, basis, n_cols):
    """Bland-rule pivoting until optimality; returns the pivot count."""
    pivots = 0
    basis_arr = np.asarray(basis)
    while True:
        negative = np.nonzero(obj[:n_cols] < -PIVOT_TOL)[0]
        if negative.size == 0:
            return pivots
        entering = int(negative[0])  # Bland: smallest eligible index
        ratios = np.full(tableau.shape[0], np.inf)
        col = tableau[:, entering]
        ok = col > PIVOT_TOL
        ratios[ok] = tableau[ok, -1] / col[ok]
        best = np.min(ratios)
        if not np.isfinite(best):
            raise SimplexError("objective unbounded below")
        # Bland tie-break: among minimal ratios, leave the smallest basic index
        candidates = np.nonzero(ratios <= best + PIVOT_TOL)[0]
        leaving = int(candidates[np.argmin(basis_arr[candidates])])
        _pivot(tableau, obj, basis, leaving, entering)
        basis_arr[leaving] = basis[leaving]
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise SimplexError("degenerate pivot limit exceeded")


def solve_lp(cost: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray):
    """Solve min cost.x, a_eq x = b_eq, x >= 0; returns (x, objective value)."""
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    cost = np.asarray(cost, dtype=float)
    m, n = a.shape
    if b.shape != (m,) or cost.shape != (n,):
        raise ValueError("inconsistent LP dimensions")

    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # phase 1: artificial basis, minimize the artificial sum
    tableau = np.hstack([a, np.eye(m), b[:, None]])
    basis = list(range(n, n + m))
    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    obj = _objective_row(tableau, np.array(basis), cost1)
    _run_simplex(tableau, obj, basis, n + m)
    if -obj[-1] > FEAS_TOL:
        raise SimplexError("equality system is infeasible")

    # drive leftover artificials out of the basis; drop redundant rows
    keep_rows = []
    for i in range(m):
        if basis[i] < n:
            keep_rows.append(i)
            continue
        pivot_col = -1
        for j in range(n):
            if abs(tableau[i, j]) > PIVOT_TOL:
                pivot_col = j
                break
        if pivot_col >= 0:
            _pivot(tableau, obj, basis, i, pivot_col)
            keep_rows.append(i)
        # else: redundant constraint row, dropped below
    if len(keep_rows) < m:
        tableau = tableau[keep_rows]
        basis = [basis[i] for i in keep_rows]

    # phase 2 on the original columns
    tableau = np.hstack([tableau[:, :n], tableau[:, -1:]])
    obj = _objective_row(tableau, np.array(basis), cost)
    _run_simplex(tableau, obj, basis, n)

    x = np.zeros(n)
    for i, var in enumerate(basis):
        x[var] = tableau[i, -1]
    return x, float(cost @ x)
