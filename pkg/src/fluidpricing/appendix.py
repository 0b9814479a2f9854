"""Reference counterexample instances and their diagnostic reproductions.

Five curated instances demonstrate, in order: (1) non-concavity with two
unequal patience rates, (2) non-concavity with four equal patience rates,
(3) tightness of the two-type weak-concavity threshold, (4) weak-concavity
violations persisting at arbitrarily large rates when cross-matching is
perfectly efficient, (5) multimodality and kinks of the pricing objective.
Each runner returns a report of named checks against frozen expected
values and tolerances.
"""

from __future__ import annotations

import numpy as np

from .closed_form import same_theta_costs
from .concavity import certify, jacobi_eigenvalues, numerical_hessian, one_sided_partials
from .instance import InstanceError, MatchingInstance
from .pricing import LinearDemand

__all__ = ["example_instance", "run_example", "EXAMPLE_IDS"]

EXAMPLE_IDS = (1, 2, 3, 4, 5)


def _n2(theta, c, c12, lo, hi):
    return MatchingInstance(
        theta=theta,
        solo_cost=c,
        pair_cost=[[c[0], c12], [c12, c[1]]],
        lambda_lower=[lo, lo],
        lambda_upper=[hi, hi],
    )


def example_instance(example_id: int) -> MatchingInstance:
    """The instance behind each numbered counterexample."""
    if example_id == 1:
        return _n2([1.0, 2.0], [1.0, 1.0], 1.01, 1e-3, 10.0)
    if example_id == 2:
        pair = np.array(
            [
                [0.70, 0.77, 0.83, 0.92],
                [0.77, 0.40, 0.62, 0.74],
                [0.83, 0.62, 0.50, 0.86],
                [0.92, 0.74, 0.86, 0.70],
            ]
        )
        return MatchingInstance(
            theta=[1.0] * 4,
            solo_cost=np.diag(pair),
            pair_cost=pair,
            lambda_lower=[1e-3] * 4,
            lambda_upper=[10.0] * 4,
        )
    if example_id == 3:
        return _n2([1.0, 8.0], [1.0, 1.0], 1.05, 1e-3, 100.0)
    if example_id == 4:
        return _n2([1.0, 8.0], [1.0, 1.0], 1.00, 1e-3, 1e5)
    if example_id == 5:
        return _n2([0.3, 0.3], [1.1, 1.1], 1.65, 0.01, 1.0)
    raise InstanceError(f"unknown example id {example_id}; valid ids are 1..5")


def _check(name, value, lo, hi):
    return {
        "name": name,
        "value": value,
        "expected_range": [lo, hi],
        "pass": bool(lo <= value <= hi),
    }


def _finish(example_id, checks, extra=None):
    report = {
        "example_id": example_id,
        "checks": checks,
        "passed": all(c["pass"] for c in checks),
    }
    if extra:
        report.update(extra)
    return report


def _eigenvalue_example(example_id, lam, lo, hi):
    inst = example_instance(example_id)
    hess, smooth = numerical_hessian(inst, np.asarray(lam), 1e-3)
    top = float(jacobi_eigenvalues(hess)[-1])
    checks = [
        _check("top_hessian_eigenvalue", top, lo, hi),
        {"name": "smooth", "value": smooth, "expected_range": [True, True], "pass": smooth},
    ]
    return _finish(example_id, checks, {"lambda": list(lam)})


def _partials_at(inst, lam):
    step = 1e-5 * max(1.0, lam[0])
    return one_sided_partials(inst, np.asarray(lam), 0, step)


def run_example(example_id: int) -> dict:
    """Run the diagnostic for one example and compare with expected values."""
    if example_id == 1:
        return _eigenvalue_example(1, (0.1, 0.1), 0.02, 0.04)
    if example_id == 2:
        return _eigenvalue_example(2, (0.80, 1.20, 1.20, 0.01), 0.03, 0.05)
    if example_id == 3:
        inst = example_instance(3)
        cert = certify(inst)
        threshold = float(cert.thresholds["Thm1_case_ii"].max())
        left, right = _partials_at(inst, (19.5, 18.5))
        checks = [
            _check("tau1", cert.tau1, 4.2 - 1e-9, 4.2 + 1e-9),
            _check("tau2", cert.tau2, 10.44 - 1e-9, 10.44 + 1e-9),
            _check("lambda2_threshold", threshold, 18.57 - 0.01, 18.57 + 0.01),
            _check("left_partial_at_19.5_18.5", left, 0.49986 - 1e-4, 0.49986 + 1e-4),
            _check("right_partial_at_19.5_18.5", right, 0.5 - 1e-6, 0.5 + 1e-6),
        ]
        return _finish(3, checks)
    if example_id == 4:
        inst = example_instance(4)
        cert = certify(inst)
        expected = {
            (11.0, 10.0): 0.43574,
            (101.0, 100.0): 0.48837,
            (1001.0, 1000.0): 0.49876,
            (10001.0, 10000.0): 0.49988,
        }
        checks = [
            {
                "name": "certificate_rule",
                "value": cert.rule.value if cert.rule else None,
                "expected_range": ["Prop3_unbounded", "Prop3_unbounded"],
                "pass": cert.rule is not None and cert.rule.value == "Prop3_unbounded",
            }
        ]
        for lam, exp_left in expected.items():
            left, right = _partials_at(inst, lam)
            tag = f"at_{int(lam[0])}_{int(lam[1])}"
            checks.append(_check(f"left_partial_{tag}", left, exp_left - 1e-4, exp_left + 1e-4))
            checks.append(_check(f"right_partial_{tag}", right, 0.5 - 1e-6, 0.5 + 1e-6))
        return _finish(4, checks)
    if example_id == 5:
        return _run_example_5()
    raise InstanceError(f"unknown example id {example_id}; valid ids are 1..5")


def example_5_objective_grid(resolution: int = 200):
    """The pricing objective of the multimodality example on a square grid."""
    inst = example_instance(5)
    axis = np.linspace(0.01, 1.0, resolution)
    l1, l2 = np.meshgrid(axis, axis, indexing="ij")
    lam = np.stack([l1, l2], axis=-1)
    c_dec, c_pool = same_theta_costs(inst, lam)
    cost = np.minimum(c_dec, c_pool)
    revenue = l1 * (1 - l1) + l2 * (1 - l2)
    return axis, revenue - cost


def _run_example_5(resolution: int = 200) -> dict:
    axis, g = example_5_objective_grid(resolution)
    interior = g[1:-1, 1:-1]
    strict_max = np.ones_like(interior, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = g[1 + di : resolution - 1 + di, 1 + dj : resolution - 1 + dj]
            strict_max &= interior > neighbor
    maxima_idx = np.argwhere(strict_max) + 1
    maxima = [
        {"lambda": [float(axis[i]), float(axis[j])], "g": float(g[i, j])}
        for i, j in maxima_idx
    ]

    h = axis[1] - axis[0]
    kinks = []
    for grid in (g, g.T):
        fwd = (grid[2:, :] - grid[1:-1, :]) / h
        bwd = (grid[1:-1, :] - grid[:-2, :]) / h
        mism = np.abs(fwd - bwd)
        for i, j in np.argwhere(mism > 1e-3):
            coord = (
                [float(axis[i + 1]), float(axis[j])]
                if grid is g
                else [float(axis[j]), float(axis[i + 1])]
            )
            kinks.append({"lambda": coord, "mismatch": float(mism[i, j])})
    kinks.sort(key=lambda k: -k["mismatch"])

    checks = [
        _check("n_strict_local_maxima", float(len(maxima)), 2.0, float("inf")),
        _check("n_kinks", float(len(kinks)), 1.0, float("inf")),
    ]
    return _finish(
        5,
        checks,
        {"local_maxima": maxima, "kinks": kinks[:10], "resolution": resolution},
    )


def example_5_demand() -> LinearDemand:
    """Unit-slope linear demand of the multimodality example."""
    return LinearDemand(solo_length=[1.0, 1.0], max_rate=[1.0, 1.0])
