"""Solve the fluid matching LP and extract primal/dual data."""

from __future__ import annotations

import hashlib

import numpy as np

from .instance import FluidSolution, MatchingInstance
from .simplex import SimplexFailure, revised_simplex
from .standard_form import StandardFormLP, all_unmatched_basis, build_standard_form

__all__ = ["solve_fluid_lp", "cost", "SolverError"]


class SolverError(RuntimeError):
    """The embedded LP solver failed on inputs that should be solvable."""


def _basis_tag(basis: np.ndarray) -> str:
    payload = np.sort(basis).astype(np.int64).tobytes()
    return hashlib.sha1(payload).hexdigest()[:12]


def solve_fluid_lp(
    instance: MatchingInstance,
    lam: np.ndarray,
    warm_basis: np.ndarray | None = None,
) -> FluidSolution:
    """Optimal basic solution and duals of the fluid LP at rates lam.

    Deterministic for fixed inputs.  `warm_basis` is an optional starting
    basis (e.g. from a previous solve at nearby rates); if it is infeasible
    at lam the solver silently restarts from the all-unmatched basis.
    """
    solution, _ = solve_with_basis(instance, lam, warm_basis)
    return solution


def cost(instance: MatchingInstance, lam: np.ndarray) -> float:
    """Minimum average matching cost per unit time at rates lam."""
    return solve_fluid_lp(instance, lam).objective


def solve_with_basis(
    instance: MatchingInstance,
    lam: np.ndarray,
    warm_basis: np.ndarray | None = None,
) -> tuple[FluidSolution, np.ndarray]:
    """Like solve_fluid_lp but also returns the optimal basis for reuse."""
    lp = build_standard_form(instance, lam)
    result = None
    if warm_basis is not None:
        try:
            result = revised_simplex(lp.cost, lp.a_mat, lp.rhs, warm_basis)
        except SimplexFailure:
            result = None
    if result is None:
        basis, _ = all_unmatched_basis(lp)
        try:
            result = revised_simplex(lp.cost, lp.a_mat, lp.rhs, basis)
        except SimplexFailure as exc:
            raise SolverError(str(exc)) from exc
    n = instance.n_types
    solution = FluidSolution(
        x=result.z[: n * n].reshape(n, n),
        y=result.z[n * n : n * n + n],
        objective=result.objective,
        gamma=result.duals[:n].copy(),
        eta=result.duals[n:].reshape(n, n).copy(),
        basis_tag=_basis_tag(result.basis),
    )
    return solution, result.basis


def check_solution(instance: MatchingInstance, lam: np.ndarray, sol: FluidSolution, tol: float = 1e-8) -> None:
    """Assert primal feasibility and objective consistency of a solution."""
    lam = np.asarray(lam, dtype=float)
    scale = max(
        1.0,
        float(np.abs(instance.pair_cost).max()),
        float(np.abs(lam).max()),
    )
    flow = sol.x.sum(axis=0) + sol.x.sum(axis=1) + sol.y
    if np.any(np.abs(flow - lam) > tol * scale):
        raise SolverError("flow balance violated")
    patience = instance.theta[:, None] * sol.x - lam[None, :] * sol.y[:, None]
    if np.any(patience > tol * scale * max(1.0, float(instance.theta.max()))):
        raise SolverError("patience bound violated")
    if np.any(sol.x < -tol * scale) or np.any(sol.y < -tol * scale):
        raise SolverError("negative rates")
    obj = float((instance.pair_cost * sol.x).sum() + instance.solo_cost @ sol.y)
    if abs(obj - sol.objective) > tol * max(1.0, abs(obj)):
        raise SolverError("objective mismatch")
