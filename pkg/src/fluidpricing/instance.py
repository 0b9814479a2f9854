"""Core domain types: matching instances and fluid LP solutions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InstanceError(ValueError):
    """Raised when an instance or a query point violates its invariants."""


@dataclass(frozen=True)
class MatchingInstance:
    """A dynamic matching market with N agent types.

    theta[i] is the abandonment rate of type i (0 means infinite patience),
    solo_cost[i] the cost of serving an unmatched type-i agent, and
    pair_cost[i, j] the cost of a matched (i, j) pair.  The admissible
    arrival-rate box is [lambda_lower, lambda_upper], componentwise.
    """

    theta: np.ndarray
    solo_cost: np.ndarray
    pair_cost: np.ndarray
    lambda_lower: np.ndarray
    lambda_upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "solo_cost", np.asarray(self.solo_cost, dtype=float))
        object.__setattr__(self, "pair_cost", np.asarray(self.pair_cost, dtype=float))
        object.__setattr__(self, "lambda_lower", np.asarray(self.lambda_lower, dtype=float))
        object.__setattr__(self, "lambda_upper", np.asarray(self.lambda_upper, dtype=float))
        self.validate()

    @property
    def n_types(self) -> int:
        return self.theta.shape[0]

    def validate(self) -> None:
        n = self.theta.shape[0]
        if n < 1:
            raise InstanceError("at least one agent type is required")
        for name in ("theta", "solo_cost", "lambda_lower", "lambda_upper"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise InstanceError(f"{name} must have shape ({n},), got {arr.shape}")
        if self.pair_cost.shape != (n, n):
            raise InstanceError(f"pair_cost must have shape ({n}, {n}), got {self.pair_cost.shape}")
        if np.any(self.theta < 0):
            raise InstanceError("patience rates must be nonnegative")
        if np.any(self.solo_cost <= 0):
            raise InstanceError("solo costs must be positive")
        if np.any(self.pair_cost <= 0):
            raise InstanceError("pair costs must be positive")
        if not np.allclose(self.pair_cost, self.pair_cost.T, rtol=0, atol=1e-12):
            raise InstanceError("pair_cost must be symmetric")
        if not np.allclose(np.diag(self.pair_cost), self.solo_cost, rtol=0, atol=1e-12):
            raise InstanceError("pair_cost diagonal must equal solo_cost")
        dominance = self.pair_cost + 1e-12 >= np.maximum.outer(self.solo_cost, self.solo_cost)
        if not np.all(dominance):
            raise InstanceError("pair_cost[i, j] must dominate max(solo_cost[i], solo_cost[j])")
        if np.any(self.lambda_lower <= 0):
            raise InstanceError("lambda_lower must be strictly positive")
        if np.any(self.lambda_upper < self.lambda_lower):
            raise InstanceError("lambda_upper must dominate lambda_lower")

    def check_lambda(self, lam: np.ndarray) -> np.ndarray:
        """Validate a rate vector against the box; returns it as a float array."""
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.n_types,):
            raise InstanceError(f"lambda must have shape ({self.n_types},), got {lam.shape}")
        if np.any(lam <= 0):
            raise InstanceError("lambda must be strictly positive")
        tol = 1e-9 * np.maximum(1.0, np.abs(self.lambda_upper))
        if np.any(lam < self.lambda_lower - tol) or np.any(lam > self.lambda_upper + tol):
            raise InstanceError("lambda outside the admissible box")
        return lam

    def to_dict(self) -> dict:
        return {
            "n_types": self.n_types,
            "theta": self.theta.tolist(),
            "solo_cost": self.solo_cost.tolist(),
            "pair_cost": self.pair_cost.tolist(),
            "lambda_lower": self.lambda_lower.tolist(),
            "lambda_upper": self.lambda_upper.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MatchingInstance":
        return cls(
            theta=np.asarray(d["theta"], dtype=float),
            solo_cost=np.asarray(d["solo_cost"], dtype=float),
            pair_cost=np.asarray(d["pair_cost"], dtype=float),
            lambda_lower=np.asarray(d["lambda_lower"], dtype=float),
            lambda_upper=np.asarray(d["lambda_upper"], dtype=float),
        )


@dataclass
class FluidSolution:
    """Optimal primal/dual data of the fluid matching LP at one rate vector.

    x[i, j] is the match rate of active type i with passive type j, y[i] the
    unmatched rate.  gamma holds flow-balance duals, eta the patience-bound
    duals, with signs fixed so that gamma[i] + sum_j y[j] * eta[j, i] equals
    the slope of the value function at smooth points.
    """

    x: np.ndarray
    y: np.ndarray
    objective: float
    gamma: np.ndarray
    eta: np.ndarray
    basis_tag: str = ""

    def to_dict(self) -> dict:
        return {
            "x": self.x.ravel().tolist(),
            "y": self.y.tolist(),
            "objective": self.objective,
            "gamma": self.gamma.tolist(),
            "eta": self.eta.ravel().tolist(),
            "basis_tag": self.basis_tag,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FluidSolution":
        y = np.asarray(d["y"], dtype=float)
        n = y.shape[0]
        return cls(
            x=np.asarray(d["x"], dtype=float).reshape(n, n),
            y=y,
            objective=float(d["objective"]),
            gamma=np.asarray(d["gamma"], dtype=float),
            eta=np.asarray(d["eta"], dtype=float).reshape(n, n),
            basis_tag=d.get("basis_tag", ""),
        )
