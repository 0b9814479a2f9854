"""Upper-level pricing: maximize revenue minus matching cost over rates.

Implements the minorize-maximization scheme (linear surrogate of the cost
term from LP duals, with an incremental curvature search) and a projected
gradient baseline with step halving, plus a benchmark harness.
"""

from __future__ import annotations

import io
import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .instance import InstanceError, MatchingInstance
from .lp import solve_with_basis

__all__ = [
    "LinearDemand",
    "CustomDemand",
    "PricingResult",
    "RhoLadderError",
    "objective_g",
    "supergradient",
    "mm_solve",
    "pg_solve",
    "benchmark",
    "benchmark_to_csv",
    "BENCHMARK_CSV_COLUMNS",
]

BENCHMARK_CSV_COLUMNS = ["instance_id", "solver", "step0", "seed", "time_s", "iters", "objective"]


class RhoLadderError(RuntimeError):
    """The curvature-constant search exceeded its configured cap."""


@dataclass(frozen=True)
class LinearDemand:
    """Per-type linear inverse demand p_i(rate) = length_i*(1 - rate/max_rate_i).

    solo_length is in distance units (price per unit rate is proportional to
    trip length); max_rate is the rate at which the price hits zero.
    """

    solo_length: np.ndarray
    max_rate: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "solo_length", np.asarray(self.solo_length, dtype=float))
        object.__setattr__(self, "max_rate", np.asarray(self.max_rate, dtype=float))
        if self.solo_length.shape != self.max_rate.shape or self.solo_length.ndim != 1:
            raise InstanceError("solo_length and max_rate must be equal-length vectors")
        if np.any(self.solo_length <= 0) or np.any(self.max_rate <= 0):
            raise InstanceError("solo_length and max_rate must be positive")

    @property
    def n_types(self) -> int:
        return self.solo_length.shape[0]

    def price(self, lam: np.ndarray) -> np.ndarray:
        return self.solo_length * (1.0 - lam / self.max_rate)

    def revenue(self, lam: np.ndarray) -> float:
        return float(np.sum(lam * self.price(lam)))

    def revenue_deriv(self, lam: np.ndarray) -> np.ndarray:
        return self.solo_length * (1.0 - 2.0 * lam / self.max_rate)

    def to_dict(self) -> dict:
        return {
            "kind": "linear",
            "solo_length": self.solo_length.tolist(),
            "max_rate": self.max_rate.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearDemand":
        return cls(solo_length=d["solo_length"], max_rate=d["max_rate"])


class CustomDemand:
    """User-supplied concave per-type revenue functions with derivatives.

    revenue_fns[i] maps a scalar rate to revenue; deriv_fns[i] is its
    derivative.  Midpoint concavity of each revenue function is checked on
    100 sampled pairs over [domain_lower, domain_upper] at construction.
    """

    def __init__(self, revenue_fns, deriv_fns, domain_lower, domain_upper, seed: int = 0):
        if len(revenue_fns) != len(deriv_fns):
            raise InstanceError("revenue and derivative lists must have equal length")
        self.revenue_fns = list(revenue_fns)
        self.deriv_fns = list(deriv_fns)
        self.domain_lower = np.asarray(domain_lower, dtype=float)
        self.domain_upper = np.asarray(domain_upper, dtype=float)
        rng = np.random.default_rng(seed)
        for i, r in enumerate(self.revenue_fns):
            a = rng.uniform(self.domain_lower[i], self.domain_upper[i], 100)
            b = rng.uniform(self.domain_lower[i], self.domain_upper[i], 100)
            mid = np.array([r(0.5 * (x + y)) for x, y in zip(a, b)])
            ends = np.array([0.5 * (r(x) + r(y)) for x, y in zip(a, b)])
            if np.any(mid < ends - 1e-9):
                raise InstanceError(f"revenue function {i} fails midpoint concavity")

    @property
    def n_types(self) -> int:
        return len(self.revenue_fns)

    def revenue(self, lam: np.ndarray) -> float:
        return float(sum(r(l) for r, l in zip(self.revenue_fns, lam)))

    def revenue_deriv(self, lam: np.ndarray) -> np.ndarray:
        return np.array([d(l) for d, l in zip(self.deriv_fns, lam)])


@dataclass
class PricingResult:
    lambda_star: np.ndarray
    objective: float
    trajectory: list[float]
    iterations: int
    rho_final: float
    solver: str
    stepsize_initial: float | None
    wall_time: float
    converged: bool

    def to_dict(self) -> dict:
        return {
            "lambda_star": self.lambda_star.tolist(),
            "objective": self.objective,
            "trajectory": self.trajectory,
            "iterations": self.iterations,
            "rho_final": self.rho_final,
            "solver": self.solver,
            "stepsize_initial": self.stepsize_initial,
            "wall_time": self.wall_time,
            "converged": self.converged,
        }


def objective_g(instance: MatchingInstance, demand, lam: np.ndarray) -> float:
    """Profit rate: revenue at rates lam minus minimum matching cost."""
    lam = np.asarray(lam, dtype=float)
    sol, _ = solve_with_basis(instance, lam)
    return demand.revenue(lam) - sol.objective


def supergradient(instance: MatchingInstance, lam: np.ndarray, rho: float, fluid_solution) -> np.ndarray:
    """v_i = gamma_i + sum_j y_j*eta[j, i] - rho*lam_i, from duals at lam."""
    lam = np.asarray(lam, dtype=float)
    if fluid_solution.gamma.shape != lam.shape:
        raise InstanceError("solution/rate dimension mismatch")
    return fluid_solution.gamma + fluid_solution.eta.T @ fluid_solution.y - rho * lam


def _default_delta_mm(instance: MatchingInstance) -> float:
    scale = float(instance.solo_cost.mean()) / max(1.0, float(np.linalg.norm(instance.lambda_upper)))
    return 0.1 * scale


def _argmax_surrogate(instance, demand, lam_t, v_base, rho):
    """Maximize the separable concave surrogate over the box.

    v_base is the cost linearization gamma + eta^T y at lam_t; the full
    surrogate slope in coordinate i is v_base[i] - rho*lam_t[i].
    """
    lo, hi = instance.lambda_lower, instance.lambda_upper
    if isinstance(demand, LinearDemand):
        l, bar = demand.solo_length, demand.max_rate
        cand = bar * (l - v_base + rho * lam_t) / (2 * l + rho * bar)
        return np.clip(cand, lo, hi)
    out = np.empty(instance.n_types)
    for i in range(instance.n_types):
        out[i] = _bisect_concave(
            lambda x, i=i: demand.deriv_fns[i](x) - rho * x - v_base[i] + rho * lam_t[i],
            lo[i],
            hi[i],
        )
    return out


def _bisect_concave(phi, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Root of a decreasing derivative on [lo, hi], clamped at the ends."""
    if phi(lo) <= 0:
        return lo
    if phi(hi) >= 0:
        return hi
    a, b = lo, hi
    while b - a > tol * max(1.0, abs(b)):
        m = 0.5 * (a + b)
        if phi(m) > 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def mm_solve(
    instance: MatchingInstance,
    demand,
    lambda0: np.ndarray,
    eps: float = 1e-3,
    delta_mm: float | None = None,
    time_cap: float = 1200.0,
    rho_cap: float = 1e6,
) -> PricingResult:
    """Monotone surrogate-maximization solve of the pricing problem.

    Each outer iteration linearizes the cost term at the current rates
    using LP duals, starts the curvature constant rho at zero, and retries
    with rho increased by delta_mm whenever the objective would decrease.
    Stops when the objective improvement falls below eps or the time cap.
    """
    if eps <= 0:
        raise InstanceError("eps must be positive")
    if delta_mm is None:
        delta_mm = _default_delta_mm(instance)
    if delta_mm <= 0:
        raise InstanceError("delta_mm must be positive")
    start = time.monotonic()
    lam = instance.check_lambda(np.asarray(lambda0, dtype=float))

    basis = None
    sol, basis = solve_with_basis(instance, lam, basis)
    g_cur = demand.revenue(lam) - sol.objective
    trajectory = [g_cur]
    rho = 0.0
    iterations = 0
    converged = False

    while True:
        rho = 0.0
        while True:
            v_base = sol.gamma + sol.eta.T @ sol.y
            lam_next = _argmax_surrogate(instance, demand, lam, v_base, rho)
            sol_next, basis = solve_with_basis(instance, lam_next, basis)
            g_next = demand.revenue(lam_next) - sol_next.objective
            if g_next >= g_cur:
                break
            rho += delta_mm
            if rho > rho_cap:
                raise RhoLadderError(
                    f"curvature search exceeded cap {rho_cap:g} at iteration {iterations}"
                )
            if time.monotonic() - start > time_cap:
                return PricingResult(
                    lambda_star=lam,
                    objective=g_cur,
                    trajectory=trajectory,
                    iterations=iterations,
                    rho_final=rho,
                    solver="MM",
                    stepsize_initial=None,
                    wall_time=time.monotonic() - start,
                    converged=False,
                )
        iterations += 1
        trajectory.append(g_next)
        improved = abs(g_next - g_cur)
        lam, sol, g_cur = lam_next, sol_next, g_next
        if improved < eps:
            converged = True
            break
        if time.monotonic() - start > time_cap:
            break

    return PricingResult(
        lambda_star=lam,
        objective=g_cur,
        trajectory=trajectory,
        iterations=iterations,
        rho_final=rho,
        solver="MM",
        stepsize_initial=None,
        wall_time=time.monotonic() - start,
        converged=converged,
    )


def pg_solve(
    instance: MatchingInstance,
    demand,
    lambda0: np.ndarray,
    step0: float = 1.0,
    eps: float = 1e-3,
    time_cap: float = 1200.0,
) -> PricingResult:
    """Projected gradient ascent with step halving on objective decrease."""
    if eps <= 0 or step0 <= 0:
        raise InstanceError("eps and step0 must be positive")
    start = time.monotonic()
    lam = instance.check_lambda(np.asarray(lambda0, dtype=float))
    lo, hi = instance.lambda_lower, instance.lambda_upper

    basis = None
    sol, basis = solve_with_basis(instance, lam, basis)
    g_cur = demand.revenue(lam) - sol.objective
    trajectory = [g_cur]
    step = float(step0)
    iterations = 0
    converged = False

    while True:
        grad = demand.revenue_deriv(lam) - (sol.gamma + sol.eta.T @ sol.y)
        lam_next = np.clip(lam + step * grad, lo, hi)
        sol_next, basis = solve_with_basis(instance, lam_next, basis)
        g_next = demand.revenue(lam_next) - sol_next.objective
        iterations += 1
        trajectory.append(g_next)
        if g_next < g_cur:
            step *= 0.5
        diff = abs(g_next - g_cur)
        lam, sol, g_cur = lam_next, sol_next, g_next
        if diff < eps:
            converged = True
            break
        if time.monotonic() - start > time_cap:
            break

    return PricingResult(
        lambda_star=lam,
        objective=g_cur,
        trajectory=trajectory,
        iterations=iterations,
        rho_final=0.0,
        solver="PG",
        stepsize_initial=float(step0),
        wall_time=time.monotonic() - start,
        converged=converged,
    )


def _parse_solver(spec):
    if isinstance(spec, (tuple, list)):
        name, step0 = spec[0], (spec[1] if len(spec) > 1 else None)
    else:
        name, _, suffix = str(spec).partition(":")
        step0 = float(suffix) if suffix else None
    name = name.upper()
    if name not in ("MM", "PG"):
        raise InstanceError(f"unknown solver {spec!r}")
    if name == "PG" and step0 is None:
        step0 = 1.0
    return name, step0


def benchmark(
    instances,
    demands,
    solvers,
    seeds,
    time_cap: float = 1200.0,
    eps: float = 1e-3,
) -> dict:
    """Run each solver on each instance for each seed; shared start points.

    instances: list of (instance_id, MatchingInstance); demands: one
    DemandModel or a parallel list.  solvers: entries "MM" or "PG:<step0>"
    (or tuples).  Within an (instance, seed) cell every solver starts from
    the same uniformly sampled rate vector.  Failures are recorded in the
    row's error field instead of aborting the table.
    """
    if not solvers:
        raise InstanceError("solver list must be nonempty")
    if not instances or not seeds:
        raise InstanceError("instances and seeds must be nonempty")
    if not isinstance(demands, (list, tuple)):
        demands = [demands] * len(instances)
    if len(demands) != len(instances):
        raise InstanceError("need one demand model per instance")

    parsed = [_parse_solver(s) for s in solvers]
    rows = []
    for (instance_id, instance), demand in zip(instances, demands):
        for seed in seeds:
            rng = np.random.default_rng(seed)
            lam0 = rng.uniform(instance.lambda_lower, instance.lambda_upper)
            for name, step0 in parsed:
                row = {
                    "instance_id": instance_id,
                    "solver": name,
                    "step0": step0,
                    "seed": seed,
                    "time_s": None,
                    "iters": None,
                    "objective": None,
                    "error": None,
                }
                try:
                    if name == "MM":
                        res = mm_solve(instance, demand, lam0, eps=eps, time_cap=time_cap)
                    else:
                        res = pg_solve(
                            instance, demand, lam0, step0=step0, eps=eps, time_cap=time_cap
                        )
                    row.update(
                        time_s=res.wall_time,
                        iters=res.iterations,
                        objective=res.objective,
                    )
                except Exception as exc:  # recorded, not raised
                    row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)

    aggregates = []
    keys = sorted({(r["instance_id"], r["solver"], r["step0"]) for r in rows},
                  key=lambda k: (str(k[0]), k[1], k[2] or 0.0))
    for instance_id, solver, step0 in keys:
        cells = [
            r
            for r in rows
            if r["instance_id"] == instance_id
            and r["solver"] == solver
            and r["step0"] == step0
            and r["error"] is None
        ]
        if not cells:
            continue
        aggregates.append(
            {
                "instance_id": instance_id,
                "solver": solver,
                "step0": step0,
                "mean_time_s": float(np.mean([r["time_s"] for r in cells])),
                "mean_iters": float(np.mean([r["iters"] for r in cells])),
                "mean_objective": float(np.mean([r["objective"] for r in cells])),
            }
        )
    return {"rows": rows, "aggregates": aggregates}


def benchmark_to_csv(result: dict) -> str:
    """Render benchmark rows as CSV with the documented column order."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(BENCHMARK_CSV_COLUMNS)
    for r in result["rows"]:
        writer.writerow([r[c] if r[c] is not None else "" for c in BENCHMARK_CSV_COLUMNS])
    return buf.getvalue()
