"""Fluid matching LP, closed-form oracles, concavity certificates, pricing.

Core objects:

- :class:`MatchingInstance` / :class:`FluidSolution` — problem data and
  primal/dual solutions of the fluid matching LP.
- :func:`solve_fluid_lp` — parametric LP solve at given arrival rates.
- :func:`solve_n1` / :func:`solve_n2` — closed-form oracles for one and
  two rider types, with regime classification.
- :func:`certify` / :func:`probe_midpoint_concavity` — analytic concavity
  certificates and randomized numerical probes.
- :func:`mm_solve` / :func:`pg_solve` / :func:`benchmark` — upper-level
  pricing optimizers and a comparison harness.
- :func:`build_bundle` / :func:`synth_trips` — instance construction from
  (synthetic) trip data.
"""

from .closed_form import (
    N2Case,
    N2CaseLabel,
    SameThetaCase,
    indicators_n2,
    same_theta_costs,
    solve_n1,
    solve_n2,
    solve_n2_same_theta,
)
from .concavity import (
    ConcavityCertificate,
    ProbeReport,
    Rule,
    Verdict,
    certify,
    critical_efficiency,
    find_weak_concavity_rho,
    jacobi_eigenvalues,
    matching_efficiency,
    numerical_hessian,
    one_sided_partials,
    probe_midpoint_concavity,
)
from .data import (
    DataError,
    TripRecord,
    TypedInstanceBundle,
    build_bundle,
    cluster_trips,
    derive_costs,
    equal_theta,
    load_bundle,
    load_trips_csv,
    save_bundle,
    save_trips_csv,
    synth_trips,
    uniform_theta,
)
from .instance import FluidSolution, InstanceError, MatchingInstance
from .lp import SolverError, check_solution, cost, solve_fluid_lp, solve_with_basis
from .pricing import (
    CustomDemand,
    LinearDemand,
    PricingResult,
    RhoLadderError,
    benchmark,
    benchmark_to_csv,
    mm_solve,
    objective_g,
    pg_solve,
    supergradient,
)
from .simplex import SimplexFailure

__all__ = [
    "MatchingInstance",
    "FluidSolution",
    "InstanceError",
    "SolverError",
    "SimplexFailure",
    "solve_fluid_lp",
    "solve_with_basis",
    "cost",
    "check_solution",
    "N2Case",
    "N2CaseLabel",
    "SameThetaCase",
    "solve_n1",
    "solve_n2",
    "solve_n2_same_theta",
    "indicators_n2",
    "same_theta_costs",
    "Verdict",
    "Rule",
    "ConcavityCertificate",
    "ProbeReport",
    "certify",
    "matching_efficiency",
    "critical_efficiency",
    "numerical_hessian",
    "one_sided_partials",
    "probe_midpoint_concavity",
    "find_weak_concavity_rho",
    "jacobi_eigenvalues",
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
    "DataError",
    "TripRecord",
    "TypedInstanceBundle",
    "synth_trips",
    "cluster_trips",
    "derive_costs",
    "equal_theta",
    "uniform_theta",
    "build_bundle",
    "save_trips_csv",
    "load_trips_csv",
    "save_bundle",
    "load_bundle",
]

__version__ = "0.1.0"
