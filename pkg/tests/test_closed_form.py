import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluidpricing import (
    MatchingInstance,
    N2Case,
    SameThetaCase,
    indicators_n2,
    same_theta_costs,
    solve_fluid_lp,
    solve_n1,
    solve_n2,
    solve_n2_same_theta,
)

from conftest import random_instance


def n2(theta, c, c12, hi=50.0):
    return MatchingInstance(
        theta=theta,
        solo_cost=c,
        pair_cost=[[c[0], c12], [c12, c[1]]],
        lambda_lower=[1e-3, 1e-3],
        lambda_upper=[hi, hi],
    )


def test_n1_formulas():
    theta, c, lam = 1.0, 2.0, 3.0
    sol = solve_n1(theta, c, lam)
    assert sol.y[0] == pytest.approx(lam * theta / (theta + 2 * lam))
    assert sol.x[0, 0] == pytest.approx(lam**2 / (theta + 2 * lam))
    assert sol.objective == pytest.approx(c * lam * (theta + lam) / (theta + 2 * lam))


def test_n1_zero_theta_limit():
    sol = solve_n1(0.0, 1.0, 5.0)
    assert sol.y[0] == pytest.approx(0.0)
    assert sol.x[0, 0] == pytest.approx(2.5)
    assert sol.objective == pytest.approx(2.5)
    assert solve_n1(0.0, 2.0, 3.0).objective == pytest.approx(3.0)


def test_n1_slope_matches_finite_difference():
    theta, c, lam = 0.7, 1.3, 2.0
    h = 1e-6
    fd = (solve_n1(theta, c, lam + h).objective - solve_n1(theta, c, lam - h).objective) / (2 * h)
    sol = solve_n1(theta, c, lam)
    assert sol.gamma[0] == pytest.approx(fd, abs=1e-8)


def test_n1_matches_lp(rng):
    for _ in range(20):
        theta = float(rng.uniform(0.0, 3.0))
        c = float(rng.uniform(0.5, 2.0))
        lam = float(rng.uniform(0.1, 9.0))
        inst = MatchingInstance(
            theta=[theta], solo_cost=[c], pair_cost=[[c]],
            lambda_lower=[1e-3], lambda_upper=[10.0],
        )
        sol = solve_n1(theta, c, lam)
        lp = solve_fluid_lp(inst, np.array([lam]))
        assert sol.objective == pytest.approx(lp.objective, abs=1e-10, rel=1e-10)


def _case_of(inst, lam):
    label, _ = solve_n2(inst, np.asarray(lam))
    return label.case_id


def test_n2_all_cases_reachable_and_match_lp(rng):
    seen = set()
    for _ in range(400):
        c = rng.uniform(0.5, 2.0, 2)
        # near-perfect pooling efficiency makes the cross-heavy cases reachable
        c12 = max(c) + rng.choice([1e-3, 0.3, 1.0]) * rng.uniform(0.0, 1.0)
        theta = rng.uniform(0.05, 3.0, 2)
        inst = n2(theta, c, c12)
        lam2 = rng.uniform(0.05, 5.0)
        lam1 = rng.choice([rng.uniform(0.05, 5.0), lam2 + theta.min() * rng.uniform(0.5, 2.0)])
        lam = np.array([lam1, lam2])
        label, sol = solve_n2(inst, lam)
        seen.add(label.case_id)
        lp = solve_fluid_lp(inst, lam)
        scale = max(1.0, abs(lp.objective))
        assert abs(sol.objective - lp.objective) <= 1e-8 * scale
        # flow balance of the closed-form primal
        flow = sol.x.sum(axis=0) + sol.x.sum(axis=1) + sol.y
        assert np.allclose(flow, lam, atol=1e-9)
    assert seen == {
        N2Case.NoCross,
        N2Case.FullyMatched,
        N2Case.NoSelfMatch1,
        N2Case.Y2Zero,
    }


def test_n2_indicators_require_sorted_theta():
    inst = n2([2.0, 1.0], [1.0, 1.0], 1.5)
    with pytest.raises(Exception):
        indicators_n2(inst, np.array([1.0, 1.0]))


def test_n2_relabeling_symmetry(rng):
    # solving with types swapped must give the transposed solution
    c = [1.0, 1.4]
    inst = n2([0.5, 2.0], c, 1.6)
    swapped = n2([2.0, 0.5], c[::-1], 1.6)
    lam = np.array([1.2, 2.3])
    _, sol = solve_n2(inst, lam)
    _, sol_sw = solve_n2(swapped, lam[::-1])
    assert sol_sw.objective == pytest.approx(sol.objective, rel=1e-12)
    assert np.allclose(sol_sw.y, sol.y[::-1], atol=1e-12)
    assert np.allclose(sol_sw.x, sol.x[::-1, ::-1], atol=1e-12)


def test_same_theta_agrees_with_general_n2(rng):
    for _ in range(50):
        theta = float(rng.uniform(0.1, 2.0))
        c = rng.uniform(0.5, 2.0, 2)
        c12 = max(c) + rng.uniform(0.0, 0.8)
        inst = n2([theta, theta], c, c12)
        lam = rng.uniform(0.1, 5.0, 2)
        case, sol = solve_n2_same_theta(inst, lam)
        _, general = solve_n2(inst, lam)
        assert sol.objective == pytest.approx(general.objective, rel=1e-10)
        assert case in (SameThetaCase.Decoupled, SameThetaCase.FullyMatched)


def test_same_theta_costs_vectorized(rng):
    inst = n2([0.3, 0.3], [1.1, 1.1], 1.65, hi=1.0)
    lam = rng.uniform(0.01, 1.0, (7, 5, 2))
    c_dec, c_pool = same_theta_costs(inst, lam)
    assert c_dec.shape == (7, 5)
    # spot-check one entry against the scalar path
    _, sol = solve_n2_same_theta(inst, lam[3, 2])
    assert min(c_dec[3, 2], c_pool[3, 2]) == pytest.approx(sol.objective, rel=1e-12)


@given(
    theta=st.floats(0.0, 5.0),
    c=st.floats(0.1, 5.0),
    lam=st.floats(0.01, 20.0),
)
@settings(max_examples=200, deadline=None)
def test_n1_invariants_property(theta, c, lam):
    sol = solve_n1(theta, c, lam)
    # flow balance and nonnegativity hold for any parameters
    assert 2 * sol.x[0, 0] + sol.y[0] == pytest.approx(lam, rel=1e-9)
    assert sol.x[0, 0] >= 0 and sol.y[0] >= 0
    # cost is bounded by serving everyone solo and by perfect pairing
    assert c * lam / 2 - 1e-9 <= sol.objective <= c * lam + 1e-9


def test_solve_n2_rejects_wrong_size(rng):
    inst = random_instance(rng, 3)
    with pytest.raises(Exception):
        solve_n2(inst, np.array([1.0, 1.0, 1.0]))
