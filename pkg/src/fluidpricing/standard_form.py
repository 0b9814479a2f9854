"""Equality standard form of the fluid matching LP.

Variable ordering (columns): x[0,0], x[0,1], ..., x[N-1,N-1] (row-major,
N^2 columns), then y[0..N-1], then the patience slacks delta[i,j] in the
same row-major order -- 2*N^2 + N columns in total.

Row ordering: N flow-balance rows (one per type, RHS lambda[i]), then N^2
patience rows theta[i]*x[i,j] - lambda[j]*y[i] + delta[i,j] = 0 in
row-major (i, j) order -- N^2 + N rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .instance import MatchingInstance


@dataclass
class StandardFormLP:
    """min cost @ z  s.t.  a_mat @ z = rhs,  z >= 0."""

    cost: np.ndarray
    a_mat: sparse.csc_matrix
    rhs: np.ndarray
    n_types: int

    @property
    def n_rows(self) -> int:
        return self.rhs.shape[0]

    @property
    def n_cols(self) -> int:
        return self.cost.shape[0]

    def x_col(self, i: int, j: int) -> int:
        return i * self.n_types + j

    def y_col(self, i: int) -> int:
        return self.n_types ** 2 + i

    def delta_col(self, i: int, j: int) -> int:
        return self.n_types ** 2 + self.n_types + i * self.n_types + j

    def pat_row(self, i: int, j: int) -> int:
        return self.n_types + i * self.n_types + j


def build_standard_form(instance: MatchingInstance, lam: np.ndarray) -> StandardFormLP:
    """Assemble the equality-form LP at arrival rates lam."""
    lam = instance.check_lambda(lam)
    n = instance.n_types
    n2 = n * n
    n_cols = 2 * n2 + n
    n_rows = n2 + n

    cost = np.zeros(n_cols)
    cost[:n2] = instance.pair_cost.ravel()
    cost[n2:n2 + n] = instance.solo_cost

    rows, cols, vals = [], [], []
    # flow balance: sum_j x[j,i] + sum_j x[i,j] + y[i] = lam[i]
    for i in range(n):
        for j in range(n):
            rows.append(i)
            cols.append(i * n + j)
            vals.append(2.0 if i == j else 1.0)
            if i != j:
                rows.append(i)
                cols.append(j * n + i)
                vals.append(1.0)
        rows.append(i)
        cols.append(n2 + i)
        vals.append(1.0)
    # patience rows: theta[i] x[i,j] - lam[j] y[i] + delta[i,j] = 0
    for i in range(n):
        for j in range(n):
            r = n + i * n + j
            if instance.theta[i] != 0.0:
                rows.append(r)
                cols.append(i * n + j)
                vals.append(float(instance.theta[i]))
            rows.append(r)
            cols.append(n2 + i)
            vals.append(-float(lam[j]))
            rows.append(r)
            cols.append(n2 + n + i * n + j)
            vals.append(1.0)

    a_mat = sparse.csc_matrix(
        (vals, (rows, cols)), shape=(n_rows, n_cols), dtype=float
    )
    rhs = np.zeros(n_rows)
    rhs[:n] = lam
    return StandardFormLP(cost=cost, a_mat=a_mat, rhs=rhs, n_types=n)


def all_unmatched_basis(lp: StandardFormLP) -> tuple[np.ndarray, np.ndarray]:
    """Starting basis {y} + {delta} with its analytic inverse.

    The basis matrix is unit lower-triangular up to the -lam[j] couplings, so
    its inverse is written down directly instead of being factored.
    """
    n = lp.n_types
    basis = np.concatenate(
        [np.arange(n * n, n * n + n), np.arange(n * n + n, 2 * n * n + n)]
    ).astype(np.intp)
    lam = lp.rhs[:n]
    b_inv = np.eye(lp.n_rows)
    for i in range(n):
        for j in range(n):
            b_inv[lp.pat_row(i, j), i] = lam[j]
    # reorder rows of b_inv to match basis column order (y_i sits in row i,
    # delta[i,j] in row pat_row(i,j)) -- already consistent by construction.
    return basis, b_inv
