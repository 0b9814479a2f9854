"""Concavity certificates and numerical curvature diagnostics.

Certificates apply closed-form sufficient conditions on the instance data
(tau scalars, critical matching efficiencies, per-type rate thresholds).
The numerical side provides finite-difference Hessians, one-sided partial
derivatives for kink detection, and randomized midpoint-concavity probes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .instance import InstanceError, MatchingInstance
from .lp import cost as lp_cost
from .lp import solve_with_basis

__all__ = [
    "Verdict",
    "Rule",
    "ConcavityCertificate",
    "ProbeReport",
    "matching_efficiency",
    "critical_efficiency",
    "certify",
    "numerical_hessian",
    "one_sided_partials",
    "probe_midpoint_concavity",
    "find_weak_concavity_rho",
    "jacobi_eigenvalues",
]

_EQ_TOL = 1e-12


class Verdict(enum.Enum):
    ConcaveCertified = "ConcaveCertified"
    WeaklyConcaveCertified = "WeaklyConcaveCertified"
    Inconclusive = "Inconclusive"
    KnownViolationWitness = "KnownViolationWitness"


class Rule(enum.Enum):
    Thm1_case_i = "Thm1_case_i"
    Thm1_case_ii = "Thm1_case_ii"
    Cor1_case_i = "Cor1_case_i"
    Cor1_case_ii = "Cor1_case_ii"
    Thm2_sameTheta_N2 = "Thm2_sameTheta_N2"
    Thm3_case_i = "Thm3_case_i"
    Thm3_case_ii = "Thm3_case_ii"
    Thm4_case_i = "Thm4_case_i"
    Thm4_case_ii = "Thm4_case_ii"
    Cor3_N3_sameTheta = "Cor3_N3_sameTheta"
    Prop1_linear = "Prop1_linear"
    Prop3_unbounded = "Prop3_unbounded"


@dataclass
class ConcavityCertificate:
    verdict: Verdict
    rule: Rule | None
    tau1: float | None = None
    tau2: float | None = None
    critical_eff: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    required_lower_bounds: np.ndarray | None = None
    witness: dict | None = None

    def record_threshold(self, rule: "Rule", bounds: np.ndarray) -> None:
        self.thresholds[rule.value] = np.asarray(bounds, dtype=float)
        if self.required_lower_bounds is None:
            self.required_lower_bounds = np.asarray(bounds, dtype=float)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rule": self.rule.value if self.rule else None,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "critical_eff": {str(k): v for k, v in self.critical_eff.items()},
            "thresholds": {k: v.tolist() for k, v in self.thresholds.items()},
            "required_lower_bounds": (
                self.required_lower_bounds.tolist()
                if self.required_lower_bounds is not None
                else None
            ),
            "witness": self.witness,
        }


@dataclass
class ProbeReport:
    n_samples: int
    rho: float
    seed: int
    passes: int
    violations: int
    worst_violation: float
    witness: dict | None

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "rho": self.rho,
            "seed": self.seed,
            "passes": self.passes,
            "violations": self.violations,
            "worst_violation": self.worst_violation,
            "witness": self.witness,
        }


def matching_efficiency(instance: MatchingInstance) -> np.ndarray:
    """e[i, j] = 1 - pair_cost[i, j]/(solo_cost[i] + solo_cost[j]); diag 0.5."""
    c = instance.solo_cost
    return 1.0 - instance.pair_cost / np.add.outer(c, c)


def critical_efficiency(instance: MatchingInstance, k: int) -> float:
    """Max over types of the k-th largest row efficiency; 0 for k > N."""
    if k < 1:
        raise InstanceError("k must be a positive integer")
    n = instance.n_types
    if k > n:
        return 0.0
    eff = matching_efficiency(instance)
    rows_sorted = -np.sort(-eff, axis=1)  # descending within each row
    return float(rows_sorted[:, k - 1].max())


def _tau(theta_lo, theta_hi, c_lo, c_hi, c12) -> tuple[float, float]:
    tau1 = c_lo * (theta_hi - 3 * theta_lo) + 2 * c_hi * theta_hi - 2 * c12 * theta_hi
    tau2 = tau1 ** 2 - 8 * c_lo * (2 * c12 - c_lo - c_hi) * theta_lo * (theta_lo + theta_hi)
    return float(tau1), float(tau2)


def certify(instance: MatchingInstance) -> ConcavityCertificate:
    """Apply the sufficient-condition certificates in strength order.

    Rules are tried as: all-patient linearity; two-type equal-patience
    concavity; two-type tau/threshold weak-concavity rules (including the
    unbounded-violation flag); general-N concavity via critical efficiency;
    general-N weak concavity via critical efficiency.  The first rule whose
    hypotheses hold on the instance's box decides the verdict.
    """
    n = instance.n_types
    theta = instance.theta
    lo = instance.lambda_lower
    eff = matching_efficiency(instance)
    crit = {k: critical_efficiency(instance, k) for k in range(1, 5)}
    equal_theta = float(theta.max() - theta.min()) <= _EQ_TOL * max(1.0, float(theta.max()))

    cert = ConcavityCertificate(verdict=Verdict.Inconclusive, rule=None, critical_eff=crit)

    # All types infinitely patient: the value function is linear.
    if np.all(theta == 0.0):
        cert.verdict = Verdict.ConcaveCertified
        cert.rule = Rule.Prop1_linear
        return cert

    if n == 2:
        order = np.argsort(theta, kind="stable")
        t1, t2 = theta[order]
        c1, c2 = instance.solo_cost[order]
        c12 = float(instance.pair_cost[0, 1])
        tau1, tau2 = _tau(t1, t2, c1, c2, c12)
        cert.tau1, cert.tau2 = tau1, tau2
        denom = 2 * c12 - c1 - c2
        e12 = float(eff[0, 1])
        lo2 = float(lo[order][1])  # lower rate bound of the less patient type

        if equal_theta:
            cert.verdict = Verdict.ConcaveCertified
            cert.rule = Rule.Thm2_sameTheta_N2
            return cert
        if t2 < 3 * t1:
            cert.verdict = Verdict.WeaklyConcaveCertified
            cert.rule = Rule.Cor1_case_i
            return cert
        if tau1 <= 0 or tau2 < 0:
            cert.verdict = Verdict.WeaklyConcaveCertified
            cert.rule = Rule.Thm1_case_i
            return cert
        if abs(denom) > _EQ_TOL * max(1.0, c12):
            threshold = (tau1 + np.sqrt(tau2)) / (4 * denom)
            bounds = np.zeros(2)
            bounds[order[1]] = threshold
            cert.record_threshold(Rule.Thm1_case_ii, bounds)
            if lo2 > threshold:
                cert.verdict = Verdict.WeaklyConcaveCertified
                cert.rule = Rule.Thm1_case_ii
                return cert
            if abs(e12 - 0.5) > _EQ_TOL:
                cor_bounds = np.zeros(2)
                cor_bounds[order[1]] = t2 / (4 * (1 - 2 * e12))
                cert.record_threshold(Rule.Cor1_case_ii, cor_bounds)
                if lo2 > cor_bounds[order[1]]:
                    cert.verdict = Verdict.WeaklyConcaveCertified
                    cert.rule = Rule.Cor1_case_ii
                    return cert
        else:
            # tau1 > 0 with perfect cross efficiency and unequal patience:
            # the zero-unmatched region is unbounded, no rate bound helps.
            lam2 = max(c1 * t1 * (t1 + t2) / tau1, float(lo[order][0]) - t1, lo2)
            witness = np.zeros(2)
            witness[order] = [lam2 + t1, lam2]
            cert.verdict = Verdict.KnownViolationWitness
            cert.rule = Rule.Prop3_unbounded
            cert.witness = {
                "lambda": witness.tolist(),
                "note": "zero-unmatched-rate region is unbounded; weak concavity fails beyond any lower bound",
            }
            return cert

    # General-N concavity certificates via critical matching efficiencies.
    if equal_theta:
        e3 = crit[3]
        if abs(e3 - 0.5) > _EQ_TOL:
            thresh = np.full(n, theta.max() * e3 / (1 - 2 * e3))
            cert.record_threshold(Rule.Thm3_case_i, thresh)
            if np.all(lo > thresh):
                cert.verdict = Verdict.ConcaveCertified
                cert.rule = Rule.Thm3_case_i
                return cert
    else:
        e2 = crit[2]
        if abs(e2 - 0.5) > _EQ_TOL:
            thresh = theta * e2 / (1 - 2 * e2)
            cert.record_threshold(Rule.Thm3_case_ii, thresh)
            if np.all(lo > thresh):
                cert.verdict = Verdict.ConcaveCertified
                cert.rule = Rule.Thm3_case_ii
                return cert

    # General-N weak concavity certificates.
    if equal_theta:
        e4 = crit[4]
        if abs(e4 - 0.5) > _EQ_TOL:
            rule = Rule.Cor3_N3_sameTheta if n == 3 else Rule.Thm4_case_i
            thresh = np.full(n, theta.max() * e4 / (1 - 2 * e4))
            cert.record_threshold(rule, thresh)
            if np.all(lo > thresh):
                cert.verdict = Verdict.WeaklyConcaveCertified
                cert.rule = rule
                return cert
    elif theta.max() < 2 * theta.min():
        e3 = crit[3]
        if abs(e3 - 0.5) > _EQ_TOL:
            thresh = theta * e3 / (1 - 2 * e3)
            cert.record_threshold(Rule.Thm4_case_ii, thresh)
            if np.all(lo > thresh):
                cert.verdict = Verdict.WeaklyConcaveCertified
                cert.rule = Rule.Thm4_case_ii
                return cert

    return cert


def _default_step(lam: np.ndarray) -> np.ndarray:
    return 1e-3 * np.maximum(1.0, np.abs(lam))


def numerical_hessian(
    instance: MatchingInstance, lam: np.ndarray, step: float | np.ndarray | None = None
) -> tuple[np.ndarray, bool]:
    """Central second differences of the value function, with a kink flag.

    smooth=False when any coordinate's one-sided first differences disagree
    by more than 10x the step, indicating a kink; the Hessian is still
    returned but should not be trusted there.
    """
    lam = instance.check_lambda(np.asarray(lam, dtype=float))
    n = instance.n_types
    h = np.broadcast_to(
        _default_step(lam) if step is None else np.asarray(step, dtype=float), (n,)
    ).astype(float)
    if np.any(lam - 2 * h < instance.lambda_lower - 1e-15) or np.any(
        lam + 2 * h > instance.lambda_upper + 1e-15
    ):
        raise InstanceError("lambda must be interior to the box by at least 2*step")

    cache: dict[tuple, float] = {}
    basis_holder = [None]

    def c(point: np.ndarray) -> float:
        key = tuple(np.round(point, 14))
        if key not in cache:
            sol, basis = solve_with_basis(instance, point, basis_holder[0])
            basis_holder[0] = basis
            cache[key] = sol.objective
        return cache[key]

    c0 = c(lam)
    hess = np.zeros((n, n))
    smooth = True
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        cp, cm = c(lam + ei), c(lam - ei)
        hess[i, i] = (cp - 2 * c0 + cm) / h[i] ** 2
        fwd = (cp - c0) / h[i]
        bwd = (c0 - cm) / h[i]
        if abs(fwd - bwd) > 10 * h[i]:
            smooth = False
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            val = (
                c(lam + ei + ej) - c(lam + ei - ej) - c(lam - ei + ej) + c(lam - ei - ej)
            ) / (4 * h[i] * h[j])
            hess[i, j] = hess[j, i] = val
    return hess, smooth


def one_sided_partials(
    instance: MatchingInstance, lam: np.ndarray, coord: int, step: float | None = None
) -> tuple[float, float]:
    """Backward and forward difference quotients in one coordinate."""
    lam = instance.check_lambda(np.asarray(lam, dtype=float))
    h = float(step) if step is not None else 1e-5 * max(1.0, abs(lam[coord]))
    e = np.zeros(instance.n_types)
    e[coord] = h
    if lam[coord] - h < instance.lambda_lower[coord] - 1e-15 or (
        lam[coord] + h > instance.lambda_upper[coord] + 1e-15
    ):
        raise InstanceError("lambda +- step leaves the box")
    c0 = lp_cost(instance, lam)
    left = (c0 - lp_cost(instance, lam - e)) / h
    right = (lp_cost(instance, lam + e) - c0) / h
    return left, right


def _sample_cost_triples(
    instance: MatchingInstance, n_samples: int, seed: int, cost_fn=None
):
    """Random midpoint triples (a, b, m) with their cost evaluations.

    Costs do not depend on rho, so one sampling pass supports probing any
    number of rho values.
    """
    rng = np.random.default_rng(seed)
    n = instance.n_types
    lo, hi = instance.lambda_lower, instance.lambda_upper
    a = rng.uniform(lo, hi, size=(n_samples, n))
    b = rng.uniform(lo, hi, size=(n_samples, n))
    m = 0.5 * (a + b)
    if cost_fn is not None:
        ca, cb, cm = cost_fn(a), cost_fn(b), cost_fn(m)
    else:
        basis = None
        costs = np.empty((3, n_samples))
        for block, pts in enumerate((a, b, m)):
            for idx in range(n_samples):
                sol, basis = solve_with_basis(instance, pts[idx], basis)
                costs[block, idx] = sol.objective
        ca, cb, cm = costs
    return a, b, m, ca, cb, cm


def _evaluate_probe(a, b, m, ca, cb, cm, rho: float, seed: int, tol: float = 1e-7) -> ProbeReport:
    shift = lambda pts, c: c - 0.5 * rho * np.sum(pts ** 2, axis=1)  # noqa: E731
    gap = shift(m, cm) - 0.5 * (shift(a, ca) + shift(b, cb))
    bad = gap < -tol
    violations = int(bad.sum())
    worst = float((-gap).max(initial=0.0))
    witness = None
    if violations:
        k = int(np.argmin(gap))
        witness = {
            "a": a[k].tolist(),
            "b": b[k].tolist(),
            "midpoint": m[k].tolist(),
            "cost_a": float(ca[k]),
            "cost_b": float(cb[k]),
            "cost_midpoint": float(cm[k]),
            "violation": float(-gap[k]),
        }
    return ProbeReport(
        n_samples=len(ca),
        rho=rho,
        seed=seed,
        passes=len(ca) - violations,
        violations=violations,
        worst_violation=worst,
        witness=witness,
    )


def probe_midpoint_concavity(
    instance: MatchingInstance,
    n_samples: int = 1000,
    rho: float = 0.0,
    seed: int = 0,
    cost_fn=None,
) -> ProbeReport:
    """Sample midpoint-concavity checks of cost - rho*||lambda||^2/2.

    cost_fn optionally replaces the LP with a vectorized cost evaluator
    (signature: (k, N) array -> (k,) array), e.g. a validated closed form.
    """
    if rho < 0:
        raise InstanceError("rho must be nonnegative")
    triples = _sample_cost_triples(instance, n_samples, seed, cost_fn)
    return _evaluate_probe(*triples, rho=rho, seed=seed)


def find_weak_concavity_rho(
    instance: MatchingInstance,
    n_samples: int = 1000,
    seed: int = 0,
    rho_cap: float = 1e6,
    cost_fn=None,
) -> tuple[float | None, ProbeReport]:
    """Doubling search for a rho passing the midpoint probe.

    Returns (rho, report) on success, (None, last report) if even the cap
    fails.  A passing rho is evidence, not proof, of weak concavity.
    """
    triples = _sample_cost_triples(instance, n_samples, seed, cost_fn)
    report = _evaluate_probe(*triples, rho=0.0, seed=seed)
    if report.violations == 0:
        return 0.0, report
    rho = 1e-3
    while rho <= rho_cap:
        report = _evaluate_probe(*triples, rho=rho, seed=seed)
        if report.violations == 0:
            return rho, report
        rho *= 2.0
    return None, report


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.abs(a).max()))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= 1e-300:
                    continue
                beta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = np.sign(beta) / (abs(beta) + np.sqrt(beta ** 2 + 1)) if beta != 0 else 1.0
                cth = 1.0 / np.sqrt(t ** 2 + 1)
                sth = t * cth
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = cth
                rot[p, q] = sth
                rot[q, p] = -sth
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))
