"""Analytic optimal solutions for one- and two-type markets.

These closed forms serve as an independent oracle for the LP solver: the
two implementations share no code beyond the instance types, so agreement
between them validates both.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .instance import FluidSolution, InstanceError, MatchingInstance

__all__ = [
    "N2Case",
    "N2CaseLabel",
    "SameThetaCase",
    "solve_n1",
    "indicators_n2",
    "solve_n2",
    "solve_n2_same_theta",
]


class N2Case(enum.Enum):
    NoCross = "NoCross"
    FullyMatched = "FullyMatched"
    NoSelfMatch1 = "NoSelfMatch1"
    Y2Zero = "Y2Zero"


class SameThetaCase(enum.Enum):
    Decoupled = "Decoupled"
    FullyMatched = "FullyMatched"


@dataclass(frozen=True)
class N2CaseLabel:
    """Which of the four two-type solution regimes applies, with indicators."""

    case_id: N2Case
    delta1: float
    delta2: float
    delta3: float


def solve_n1(theta1: float, c1: float, lambda1: float) -> FluidSolution:
    """Closed-form optimum of the single-type fluid LP.

    y* = lam*theta/(theta+2lam), x* = lam^2/(theta+2lam),
    cost = c*lam*(theta+lam)/(theta+2lam).
    """
    if lambda1 <= 0:
        raise InstanceError("lambda1 must be strictly positive")
    if theta1 < 0 or c1 <= 0:
        raise InstanceError("theta1 must be nonnegative and c1 positive")
    denom = theta1 + 2.0 * lambda1
    y = lambda1 * theta1 / denom
    x = lambda1 ** 2 / denom
    obj = c1 * lambda1 * (theta1 + lambda1) / denom
    # d cost/d lam, reported as gamma with eta folded to zero so that the
    # supergradient identity gamma + eta^T y = slope holds by construction
    slope = c1 * (theta1 ** 2 + 2 * theta1 * lambda1 + 2 * lambda1 ** 2) / denom ** 2
    return FluidSolution(
        x=np.array([[x]]),
        y=np.array([y]),
        objective=obj,
        gamma=np.array([slope]),
        eta=np.zeros((1, 1)),
        basis_tag="closed_form_n1",
    )


def _require_n2(instance: MatchingInstance) -> None:
    if instance.n_types != 2:
        raise InstanceError("this solver handles exactly two agent types")


def _indicators_sorted(theta, c, c12, lam) -> tuple[float, float, float]:
    """Delta indicators assuming theta[0] <= theta[1]."""
    t1, t2 = theta
    c1, c2 = c
    l1, l2 = lam
    if l2 <= 0:
        raise InstanceError("lambda2 must be positive (it divides Delta2)")
    d1 = c1 * (t1 + l1) / (t1 + 2 * l1) + c2 * (t2 + l2) / (t2 + 2 * l2) - c12
    d2 = (
        (c1 / 2.0) * (1.0 - t1 * (t2 + l1 + 2 * l2) / (l2 * (t2 + 2 * l2)))
        + c2 * (t2 + l2) / (t2 + 2 * l2)
        - c12
    )
    d3 = l1 - l2 - t1
    return d1, d2, d3


def indicators_n2(instance: MatchingInstance, lam: np.ndarray) -> tuple[float, float, float]:
    """The three case indicators of the two-type market.

    Requires theta[0] <= theta[1]; callers with the opposite ordering must
    relabel first (solve_n2 does this internally).
    """
    _require_n2(instance)
    if instance.theta[0] > instance.theta[1]:
        raise InstanceError("indicators require theta[0] <= theta[1]; relabel first")
    lam = np.asarray(lam, dtype=float)
    return _indicators_sorted(
        instance.theta, instance.solo_cost, float(instance.pair_cost[0, 1]), lam
    )


def _classify(d1: float, d2: float, d3: float) -> N2Case:
    # Table conventions taken literally: exact zeros resolve to the weak side.
    if d1 <= 0:
        return N2Case.NoCross
    if d2 < 0:
        return N2Case.FullyMatched
    if d3 < 0:
        return N2Case.NoSelfMatch1
    return N2Case.Y2Zero


def _solve_n2_sorted(theta, c, c12, lam) -> tuple[N2CaseLabel, FluidSolution]:
    t1, t2 = float(theta[0]), float(theta[1])
    c1, c2 = float(c[0]), float(c[1])
    l1, l2 = float(lam[0]), float(lam[1])
    d1, d2, d3 = _indicators_sorted((t1, t2), (c1, c2), c12, (l1, l2))
    case = _classify(d1, d2, d3)

    x = np.zeros((2, 2))
    if case is N2Case.NoCross:
        y1 = t1 * l1 / (t1 + 2 * l1)
        y2 = t2 * l2 / (t2 + 2 * l2)
        x[0, 0] = l1 ** 2 / (t1 + 2 * l1)
        x[1, 1] = l2 ** 2 / (t2 + 2 * l2)
    elif case is N2Case.FullyMatched:
        denom = (
            2 * (l1 + l2) ** 2
            + t1 * (l1 + 2 * l2)
            + t2 * (l2 + 2 * l1)
            + t1 * t2
        )
        y1 = t1 * l1 * (t2 + l1 + l2) / denom
        y2 = t2 * l2 * (t1 + l1 + l2) / denom
        x[0, 0] = l1 * y1 / t1 if t1 > 0 else (l1 - y1) / 2.0
        x[0, 1] = l2 * y1 / t1 if t1 > 0 else 0.0
        x[1, 0] = l1 * y2 / t2 if t2 > 0 else 0.0
        x[1, 1] = l2 * y2 / t2 if t2 > 0 else (l2 - y2) / 2.0
    elif case is N2Case.NoSelfMatch1:
        denom = 2 * l2 ** 2 + t1 * (l1 + 2 * l2) + t2 * l2 + t1 * t2
        y1 = t1 * l1 * (t2 + l1 + l2) / denom
        # y2 numerator is (t1 + l2 - l1), positive here since l1 < l2 + t1;
        # this is what flow balance under the binding constraints yields.
        y2 = t2 * l2 * (t1 + l2 - l1) / denom
        x[0, 1] = l2 * y1 / t1
        x[1, 0] = l1 * y2 / t2
        x[1, 1] = l2 * y2 / t2
    else:  # Y2Zero
        y1 = t1
        y2 = 0.0
        x[0, 1] = l2
        x11 = (l1 - l2 - t1) / 2.0
        if x11 < 0:
            # Delta3 >= 0 only marginally: clamp and rebalance y1 from flow.
            if x11 < -1e-8 * max(1.0, l1):
                raise InstanceError("case-iv self-match rate is significantly negative")
            x11 = 0.0
            y1 = l1 - l2
        x[0, 0] = x11

    y = np.array([y1, y2])
    obj = c1 * (x[0, 0] + y1) + c2 * (x[1, 1] + y2) + c12 * (x[0, 1] + x[1, 0])
    label = N2CaseLabel(case_id=case, delta1=d1, delta2=d2, delta3=d3)
    sol = FluidSolution(
        x=x,
        y=y,
        objective=obj,
        gamma=np.full(2, np.nan),
        eta=np.full((2, 2), np.nan),
        basis_tag=f"closed_form_n2_{case.value}",
    )
    return label, sol


def solve_n2(instance: MatchingInstance, lam: np.ndarray) -> tuple[N2CaseLabel, FluidSolution]:
    """Closed-form optimum of the two-type fluid LP with its case label.

    Types with theta[0] > theta[1] are relabeled internally (the case
    analysis assumes the first type is the more patient one) and the
    solution is mapped back to the caller's ordering.
    """
    _require_n2(instance)
    lam = instance.check_lambda(np.asarray(lam, dtype=float))
    swap = instance.theta[0] > instance.theta[1]
    order = [1, 0] if swap else [0, 1]
    theta = instance.theta[order]
    c = instance.solo_cost[order]
    c12 = float(instance.pair_cost[0, 1])
    label, sol = _solve_n2_sorted(theta, c, c12, lam[order])
    if swap:
        sol = FluidSolution(
            x=sol.x[np.ix_(order, order)],
            y=sol.y[order],
            objective=sol.objective,
            gamma=sol.gamma[order],
            eta=sol.eta[np.ix_(order, order)],
            basis_tag=sol.basis_tag + "_swapped",
        )
    return label, sol


def same_theta_costs(instance: MatchingInstance, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The decoupled and pooled cost expressions for equal patience rates.

    Vectorized over lam arrays of shape (..., 2); the optimal cost is the
    minimum of the two returned arrays.
    """
    _require_n2(instance)
    theta = float(instance.theta[0])
    if instance.theta[1] != theta:
        raise InstanceError("both patience rates must be equal")
    c1, c2 = instance.solo_cost
    c12 = float(instance.pair_cost[0, 1])
    lam = np.asarray(lam, dtype=float)
    l1, l2 = lam[..., 0], lam[..., 1]
    c_dec = c1 * l1 * (theta + l1) / (theta + 2 * l1) + c2 * l2 * (theta + l2) / (theta + 2 * l2)
    c_pool = (
        c1 * l1 * (theta + l1) + c2 * l2 * (theta + l2) + 2 * c12 * l1 * l2
    ) / (theta + 2 * l1 + 2 * l2)
    return c_dec, c_pool


def solve_n2_same_theta(
    instance: MatchingInstance, lam: np.ndarray
) -> tuple[SameThetaCase, FluidSolution]:
    """Closed-form optimum for two types with equal patience rates."""
    _require_n2(instance)
    theta = float(instance.theta[0])
    if instance.theta[1] != theta:
        raise InstanceError("both patience rates must be equal")
    lam = instance.check_lambda(np.asarray(lam, dtype=float))
    l1, l2 = lam
    d1, _, _ = _indicators_sorted(instance.theta, instance.solo_cost,
                                  float(instance.pair_cost[0, 1]), lam)
    x = np.zeros((2, 2))
    if d1 <= 0:
        case = SameThetaCase.Decoupled
        y = lam * theta / (theta + 2 * lam)
        x[0, 0] = l1 ** 2 / (theta + 2 * l1)
        x[1, 1] = l2 ** 2 / (theta + 2 * l2)
    else:
        case = SameThetaCase.FullyMatched
        y = lam * theta / (theta + 2 * l1 + 2 * l2)
        if theta > 0:
            x[:] = np.outer(y, lam) / theta
        else:
            x[0, 0], x[1, 1] = l1 / 2.0, l2 / 2.0
    obj = float((instance.pair_cost * x).sum() + instance.solo_cost @ y)
    sol = FluidSolution(
        x=x,
        y=y,
        objective=obj,
        gamma=np.full(2, np.nan),
        eta=np.full((2, 2), np.nan),
        basis_tag=f"closed_form_same_theta_{case.value}",
    )
    return case, sol
