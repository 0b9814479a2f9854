"""Revised simplex for equality-form LPs with dual extraction.

Dantzig pricing by default; the solver falls back to Bland's rule after a
long run of non-improving (degenerate) pivots and returns to Dantzig once
the objective moves again.  All tie-breaks are by lowest variable index, so
the returned vertex is deterministic.

The basis inverse is held in product form: a sparse LU factorization of a
reference basis plus an eta file of rank-one pivot updates, refactored
periodically.  This keeps per-pivot work near-linear in the row count
instead of quadratic, which matters once instances reach a few thousand
constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

PIVOT_TOL = 1e-9
STALL_LIMIT = 200
REFRESH_EVERY = 200


class SimplexFailure(RuntimeError):
    """Numerical failure or pivot-limit exhaustion inside the solver."""


class InfeasibleStart(SimplexFailure):
    """The supplied starting basis is not primal feasible."""


@dataclass
class SimplexResult:
    z: np.ndarray
    objective: float
    duals: np.ndarray
    basis: np.ndarray
    iterations: int


class _BasisFactor:
    """B^-1 in product form: sparse LU of a reference basis plus eta updates.

    An eta (r, u, u_r) records a pivot that replaced basic row r, where u is
    the entering column expressed in the pre-pivot basis.
    """

    def __init__(self, a_mat: sparse.csc_matrix, basis: np.ndarray):
        try:
            self.lu = splu(a_mat[:, basis].tocsc())
        except (RuntimeError, ValueError) as exc:
            raise SimplexFailure("singular basis matrix") from exc
        self.etas: list[tuple[int, np.ndarray, float]] = []

    def solve(self, v: np.ndarray) -> np.ndarray:
        """B^-1 v."""
        w = self.lu.solve(v)
        for r, u, piv in self.etas:
            wr = w[r] / piv
            w -= u * wr
            w[r] = wr
        return w

    def solve_transpose(self, v: np.ndarray) -> np.ndarray:
        """B^-T v (used for dual prices)."""
        w = np.array(v, dtype=float)
        for r, u, piv in reversed(self.etas):
            w[r] = (w[r] - u @ w + piv * w[r]) / piv
        return self.lu.solve(w, trans="T")

    def update(self, leave_row: int, direction: np.ndarray) -> None:
        self.etas.append((leave_row, direction.copy(), float(direction[leave_row])))


def revised_simplex(
    cost: np.ndarray,
    a_mat: sparse.csc_matrix,
    rhs: np.ndarray,
    basis: np.ndarray,
    tol: float = PIVOT_TOL,
    max_iter: int | None = None,
) -> SimplexResult:
    """Minimize cost @ z subject to a_mat @ z = rhs, z >= 0.

    `basis` must index a feasible starting basis.  Raises InfeasibleStart if
    the basic solution has a negative component, SimplexFailure on
    pivot-limit exhaustion or a singular basis.
    """
    m, n = a_mat.shape
    basis = np.array(basis, dtype=np.intp)
    factor = _BasisFactor(a_mat, basis)
    z_basic = factor.solve(rhs)
    feas_tol = tol * max(1.0, float(np.abs(rhs).max(initial=0.0)))
    if np.any(z_basic < -1e3 * feas_tol):
        raise InfeasibleStart("starting basis is primal infeasible")
    z_basic = np.maximum(z_basic, 0.0)

    if max_iter is None:
        max_iter = 200 * (m + 10)

    a_csc = a_mat.tocsc()
    indptr, indices, data = a_csc.indptr, a_csc.indices, a_csc.data
    a_t = a_csc.T.tocsr()

    best_obj = np.inf
    stall = 0
    bland = False

    for it in range(max_iter):
        c_basis = cost[basis]
        duals = factor.solve_transpose(c_basis)
        reduced = cost - a_t @ duals
        reduced[basis] = 0.0

        if bland:
            candidates = np.flatnonzero(reduced < -tol)
            if candidates.size == 0:
                return SimplexResult(_expand(z_basic, basis, n), float(c_basis @ z_basic), duals, basis, it)
            enter = int(candidates[0])
        else:
            enter = int(np.argmin(reduced))
            if reduced[enter] >= -tol:
                return SimplexResult(_expand(z_basic, basis, n), float(c_basis @ z_basic), duals, basis, it)

        lo, hi = indptr[enter], indptr[enter + 1]
        a_col = np.zeros(m)
        a_col[indices[lo:hi]] = data[lo:hi]
        direction = factor.solve(a_col)

        pos = np.flatnonzero(direction > tol)
        if pos.size == 0:
            raise SimplexFailure("unbounded direction encountered (internal error)")
        ratios = z_basic[pos] / direction[pos]
        t_min = ratios.min()
        ties = pos[np.flatnonzero(ratios <= t_min + feas_tol)]
        leave_row = int(ties[np.argmin(basis[ties])])
        step = max(z_basic[leave_row] / direction[leave_row], 0.0)

        z_basic -= step * direction
        z_basic[leave_row] = step
        z_basic = np.maximum(z_basic, 0.0)
        basis[leave_row] = enter
        factor.update(leave_row, direction)

        obj = float(cost[basis] @ z_basic)
        if obj < best_obj - tol * max(1.0, abs(best_obj)):
            best_obj = obj
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = True

        if len(factor.etas) >= REFRESH_EVERY:
            factor = _BasisFactor(a_mat, basis)
            z_basic = np.maximum(factor.solve(rhs), 0.0)

    raise SimplexFailure(f"pivot limit {max_iter} exceeded")


def _expand(z_basic: np.ndarray, basis: np.ndarray, n: int) -> np.ndarray:
    z = np.zeros(n)
    z[basis] = z_basic
    return z
