import numpy as np
import pytest
from scipy import sparse
from scipy.optimize import linprog

from fluidpricing.simplex import InfeasibleStart, revised_simplex
from fluidpricing.standard_form import all_unmatched_basis, build_standard_form

from conftest import random_instance


def test_matches_scipy_on_fluid_lps(rng):
    for _ in range(25):
        n = int(rng.integers(1, 5))
        inst = random_instance(rng, n)
        lam = rng.uniform(0.1, 5.0, n)
        lp = build_standard_form(inst, lam)
        basis, _ = all_unmatched_basis(lp)
        res = revised_simplex(lp.cost, lp.a_mat, lp.rhs, basis)
        ref = linprog(lp.cost, A_eq=lp.a_mat.toarray(), b_eq=lp.rhs, method="highs")
        assert ref.status == 0
        assert res.objective == pytest.approx(ref.fun, abs=1e-8, rel=1e-8)
        # primal feasibility of the returned vertex
        assert np.all(res.z >= -1e-9)
        assert np.allclose(lp.a_mat @ res.z, lp.rhs, atol=1e-8)


def test_duals_satisfy_complementary_slackness(rng):
    inst = random_instance(rng, 3)
    lam = np.array([1.0, 2.0, 0.5])
    lp = build_standard_form(inst, lam)
    basis, _ = all_unmatched_basis(lp)
    res = revised_simplex(lp.cost, lp.a_mat, lp.rhs, basis)
    reduced = lp.cost - lp.a_mat.T @ res.duals
    assert np.all(reduced >= -1e-8)  # dual feasibility
    assert np.all(np.abs(reduced * res.z) < 1e-8)  # complementary slackness


def test_starting_basis_analytic_inverse(rng):
    inst = random_instance(rng, 3)
    lam = np.array([0.7, 1.3, 2.1])
    lp = build_standard_form(inst, lam)
    basis, b_inv = all_unmatched_basis(lp)
    b_dense = lp.a_mat[:, basis].toarray()
    assert np.allclose(b_inv @ b_dense, np.eye(lp.n_rows), atol=1e-12)


def test_infeasible_start_raises():
    from fluidpricing import MatchingInstance

    inst = MatchingInstance(
        theta=[0.1, 1.0],
        solo_cost=[1.0, 1.0],
        pair_cost=[[1.0, 1.5], [1.5, 1.0]],
        lambda_lower=[0.1, 0.1],
        lambda_upper=[10.0, 10.0],
    )
    lp = build_standard_form(inst, np.array([5.0, 0.5]))
    basis, _ = all_unmatched_basis(lp)
    # forcing x[0,1] basic instead of its slack overdraws type-2 arrivals,
    # so the basic value of y[1] goes negative
    bad = basis.copy()
    bad[3] = lp.x_col(0, 1)
    with pytest.raises(InfeasibleStart):
        revised_simplex(lp.cost, lp.a_mat, lp.rhs, bad)


def test_deterministic_vertex(rng):
    inst = random_instance(rng, 3)
    lam = np.array([1.0, 1.0, 1.0])
    lp = build_standard_form(inst, lam)
    basis, _ = all_unmatched_basis(lp)
    r1 = revised_simplex(lp.cost, lp.a_mat, lp.rhs, basis.copy())
    r2 = revised_simplex(lp.cost, lp.a_mat, lp.rhs, basis.copy())
    assert np.array_equal(r1.basis, r2.basis)
    assert np.array_equal(r1.z, r2.z)


def test_small_textbook_lp():
    # min -x1 - 2 x2  s.t. x1 + x2 + s = 4, x1, x2, s >= 0  -> x2 = 4
    cost = np.array([-1.0, -2.0, 0.0])
    a = sparse.csc_matrix(np.array([[1.0, 1.0, 1.0]]))
    rhs = np.array([4.0])
    res = revised_simplex(cost, a, rhs, np.array([2]))
    assert res.objective == pytest.approx(-8.0)
    assert np.allclose(res.z, [0.0, 4.0, 0.0])
