"""Dense linear programming with a two-phase primal simplex.

The solver is deliberately boring: full tableau, Bland's anti-cycling rule,
lowest-index tie-breaking everywhere. That makes runs deterministic and keeps
the exact optimal basis available for certificates. Problem sizes in this
package stay in the hundreds of rows, where a dense tableau is fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBody, SolverStall

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass
class LinearProgram:
    """maximize objective . x  subject to  G x <= h,  A_eq x = b_eq.

    Variables are free unless ``nonneg`` is set, in which case x >= 0 and the
    usual split into positive and negative parts is skipped.
    """

    objective: np.ndarray
    G: np.ndarray | None = None
    h: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    nonneg: bool = False

    def __post_init__(self):
        self.objective = np.atleast_1d(np.asarray(self.objective, dtype=float))
        n = self.objective.shape[0]
        if self.G is None:
            self.G = np.zeros((0, n))
            self.h = np.zeros(0)
        self.G = np.asarray(self.G, dtype=float).reshape(-1, n)
        self.h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if self.h.shape[0] != self.G.shape[0]:
            raise ValueError("G and h row counts differ")
        if self.A_eq is not None:
            self.A_eq = np.asarray(self.A_eq, dtype=float).reshape(-1, n)
            self.b_eq = np.atleast_1d(np.asarray(self.b_eq, dtype=float))
            if self.b_eq.shape[0] != self.A_eq.shape[0]:
                raise ValueError("A_eq and b_eq row counts differ")
        for arr in (self.objective, self.G, self.h, self.A_eq, self.b_eq):
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValueError("linear program has non-finite data")

    @property
    def n(self) -> int:
        return self.objective.shape[0]


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    value: float | None


def _pivot_loop(tab, obj, basis, n_enterable, max_iter, tol_cost, tol_piv):
    """Bland pivoting on an augmented tableau.

    ``basis`` entries of -1 mark retired (redundant) rows. Only the first
    ``n_enterable`` columns may enter, which is how artificial variables are
    blocked after phase 1.
    """
    m = tab.shape[0]
    for _ in range(max_iter):
        candidates = np.nonzero(obj[:n_enterable] < -tol_cost)[0]
        if candidates.size == 0:
            return OPTIMAL
        enter = int(candidates[0])

        col = tab[:, enter]
        usable = (col > tol_piv) & (basis >= 0)
        if not usable.any():
            return UNBOUNDED
        rows = np.nonzero(usable)[0]
        ratios = tab[rows, -1] / col[rows]
        rmin = float(ratios.min())
        tied = rows[ratios <= rmin + 1e-9 * (1.0 + abs(rmin))]
        leave = int(tied[np.argmin(basis[tied])])

        piv = tab[leave, enter]
        tab[leave, :] /= piv
        other = col.copy()
        other[leave] = 0.0
        tab -= np.outer(other, tab[leave, :])
        obj -= obj[enter] * tab[leave, :]
        basis[leave] = enter
    raise SolverStall(f"simplex did not terminate in {max_iter} pivots")


def solve_lp(lp: LinearProgram, max_iter: int | None = None) -> LpResult:
    n = lp.n
    nx = n if lp.nonneg else 2 * n

    def expand(mat):
        return mat if lp.nonneg else np.hstack([mat, -mat])

    mi = lp.G.shape[0]
    me = 0 if lp.A_eq is None else lp.A_eq.shape[0]
    m = mi + me
    ncols = nx + mi + m  # structural + slacks + artificials

    tab = np.zeros((m, ncols + 1))
    if mi:
        tab[:mi, :nx] = expand(lp.G)
        tab[:mi, nx:nx + mi] = np.eye(mi)
        tab[:mi, -1] = lp.h
    if me:
        tab[mi:, :nx] = expand(lp.A_eq)
        tab[mi:, -1] = lp.b_eq
    neg = tab[:, -1] < 0
    tab[neg, :] *= -1.0
    art0 = nx + mi
    if m:
        tab[:, art0:art0 + m] = np.eye(m)
    basis = np.arange(art0, art0 + m)

    scale_b = 1.0 + (float(np.max(np.abs(tab[:, -1]))) if m else 0.0)
    tol_piv = 1e-9
    if max_iter is None:
        max_iter = 5000 + 30 * (m + ncols)

    # Phase 1: minimize the sum of artificials starting from that basis.
    obj = np.zeros(ncols + 1)
    obj[art0:art0 + m] = 1.0
    for i in range(m):
        obj -= tab[i, :]
    status = _pivot_loop(tab, obj, basis, art0, max_iter,
                         1e-9 * scale_b, tol_piv)
    phase1_val = -obj[-1]
    if status != OPTIMAL or phase1_val > 1e-7 * scale_b:
        return LpResult(INFEASIBLE, None, None)

    for i in range(m):
        if basis[i] >= art0:
            pivot_col = -1
            row = tab[i, :art0]
            hits = np.nonzero(np.abs(row) > tol_piv)[0]
            if hits.size:
                pivot_col = int(hits[0])
            if pivot_col < 0:
                basis[i] = -1  # redundant row, retire it
                tab[i, :] = 0.0
                continue
            piv = tab[i, pivot_col]
            tab[i, :] /= piv
            other = tab[:, pivot_col].copy()
            other[i] = 0.0
            tab -= np.outer(other, tab[i, :])
            basis[i] = pivot_col

    # Phase 2 on the real objective (converted to minimization).
    cost = np.zeros(ncols + 1)
    cost[:nx] = -lp.objective if lp.nonneg else np.concatenate(
        [-lp.objective, lp.objective])
    obj = cost.copy()
    for i in range(m):
        if basis[i] >= 0:
            obj -= cost[basis[i]] * tab[i, :]

    scale_c = 1.0 + float(np.max(np.abs(cost[:nx]), initial=0.0))
    status = _pivot_loop(tab, obj, basis, art0, max_iter,
                         1e-9 * scale_c, tol_piv)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)

    full = np.zeros(ncols)
    for i in range(m):
        if basis[i] >= 0:
            full[basis[i]] = tab[i, -1]
    xi = full[:nx]
    x = xi if lp.nonneg else xi[:n] - xi[n:]
    value = float(np.dot(lp.objective, x))
    return LpResult(OPTIMAL, x, value)


def support_h_polytope(G, h, direction) -> float:
    """Support function max{<x, u> : G x <= h}.

    Returns ``math.inf`` when the polyhedron is unbounded in the given
    direction and raises EmptyBody when it is infeasible.
    """
    direction = np.asarray(direction, dtype=float)
    res = solve_lp(LinearProgram(objective=direction, G=G, h=h))
    if res.status == INFEASIBLE:
        raise EmptyBody("support query over an empty polyhedron")
    if res.status == UNBOUNDED:
        return math.inf
    return res.value
