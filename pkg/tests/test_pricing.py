import numpy as np
import pytest

from fluidpricing import (
    CustomDemand,
    LinearDemand,
    MatchingInstance,
    benchmark,
    benchmark_to_csv,
    mm_solve,
    objective_g,
    pg_solve,
    solve_fluid_lp,
    supergradient,
)
from fluidpricing.instance import InstanceError
from fluidpricing.pricing import BENCHMARK_CSV_COLUMNS

from conftest import random_instance


def analytic_instance():
    """theta=0, unit cost: cost(lam) = lam/2, so g = lam(1-lam) - lam/2."""
    return MatchingInstance(
        theta=[0.0], solo_cost=[1.0], pair_cost=[[1.0]],
        lambda_lower=[1e-3], lambda_upper=[1.0],
    )


def unit_demand(n=1):
    return LinearDemand(solo_length=np.ones(n), max_rate=np.ones(n))


def test_linear_demand_basics():
    d = LinearDemand(solo_length=[2.0], max_rate=[4.0])
    lam = np.array([1.0])
    assert d.price(lam)[0] == pytest.approx(1.5)
    assert d.revenue(lam) == pytest.approx(1.5)
    assert d.revenue_deriv(lam)[0] == pytest.approx(1.0)
    with pytest.raises(InstanceError):
        LinearDemand(solo_length=[-1.0], max_rate=[1.0])


def test_custom_demand_concavity_check():
    ok = CustomDemand([lambda x: x * (1 - x)], [lambda x: 1 - 2 * x], [0.0], [1.0])
    assert ok.revenue(np.array([0.25])) == pytest.approx(0.1875)
    with pytest.raises(InstanceError):
        CustomDemand([lambda x: x**3], [lambda x: 3 * x**2], [-1.0], [1.0])


def test_mm_analytic_convergence():
    res = mm_solve(analytic_instance(), unit_demand(), np.array([0.9]), eps=1e-10)
    assert res.converged
    assert res.lambda_star[0] == pytest.approx(0.25, abs=1e-6)
    assert res.objective == pytest.approx(0.0625, abs=1e-6)


def test_mm_trajectory_monotone(rng):
    inst = random_instance(rng, 3, hi=2.0)
    demand = LinearDemand(solo_length=rng.uniform(1.0, 3.0, 3), max_rate=np.full(3, 2.0))
    res = mm_solve(inst, demand, rng.uniform(0.1, 2.0, 3))
    traj = np.asarray(res.trajectory)
    assert np.all(np.diff(traj) >= -1e-9)


def test_pg_analytic_convergence():
    res = pg_solve(analytic_instance(), unit_demand(), np.array([0.9]), step0=10.0, eps=1e-10)
    assert res.lambda_star[0] == pytest.approx(0.25, abs=1e-5)


def test_custom_demand_matches_linear():
    # the same quadratic revenue expressed both ways must give the same optimum
    inst = analytic_instance()
    custom = CustomDemand([lambda x: x * (1 - x)], [lambda x: 1 - 2 * x], [1e-3], [1.0])
    r_lin = mm_solve(inst, unit_demand(), np.array([0.9]), eps=1e-10)
    r_cus = mm_solve(inst, custom, np.array([0.9]), eps=1e-10)
    assert r_cus.lambda_star[0] == pytest.approx(r_lin.lambda_star[0], abs=1e-6)


def test_supergradient_consistency(rng):
    inst = random_instance(rng, 2)
    lam = np.array([1.5, 2.5])
    sol = solve_fluid_lp(inst, lam)
    v0 = supergradient(inst, lam, 0.0, sol)
    v1 = supergradient(inst, lam, 2.0, sol)
    assert np.allclose(v1, v0 - 2.0 * lam)


def test_objective_g(rng):
    inst = analytic_instance()
    lam = np.array([0.5])
    assert objective_g(inst, unit_demand(), lam) == pytest.approx(0.5 * 0.5 - 0.25)


def test_time_cap_partial_result(rng):
    inst = random_instance(rng, 4, hi=3.0)
    demand = LinearDemand(solo_length=rng.uniform(1.0, 2.0, 4), max_rate=np.full(4, 3.0))
    res = pg_solve(inst, demand, rng.uniform(0.5, 2.0, 4), step0=10.0, time_cap=0.0)
    assert not res.converged
    assert res.iterations >= 0  # partial result is still well-formed


def test_benchmark_shape_and_csv(rng):
    inst = random_instance(rng, 2, hi=2.0)
    demand = LinearDemand(solo_length=[1.5, 2.0], max_rate=[2.0, 2.0])
    result = benchmark([("a", inst)], [demand], ["MM", "PG:10"], [0, 1])
    rows = result["rows"]
    assert len(rows) == 4
    solvers = {r["solver"] for r in rows}
    assert solvers == {"MM", "PG"}
    assert result["aggregates"]
    csv_text = benchmark_to_csv(result)
    header = csv_text.splitlines()[0].split(",")
    assert header == BENCHMARK_CSV_COLUMNS
    assert len(csv_text.strip().splitlines()) == 5


def test_benchmark_shared_start_per_seed(rng):
    # MM and PG rows with the same seed must start from the same point,
    # so a 0-iteration budget yields identical first trajectory values
    inst = random_instance(rng, 2, hi=2.0)
    demand = LinearDemand(solo_length=[1.5, 2.0], max_rate=[2.0, 2.0])
    result = benchmark([("a", inst)], [demand], ["MM", "PG:10"], [7])
    objs = [r["objective"] for r in result["rows"]]
    assert len(objs) == 2
