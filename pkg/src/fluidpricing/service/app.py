"""HTTP service exposing the fluid-matching solvers and diagnostics.

All endpoints are stateless wrappers over the core package; the CLI talks
to this app in-process by default, so the service and command line always
agree on behavior.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from ..appendix import EXAMPLE_IDS, run_example
from ..closed_form import solve_n2
from ..concavity import (
    certify,
    find_weak_concavity_rho,
    jacobi_eigenvalues,
    numerical_hessian,
    one_sided_partials,
    probe_midpoint_concavity,
)
from ..data import DataError, TripRecord, TypedInstanceBundle, build_bundle, synth_trips
from ..data import equal_theta as make_equal_theta
from ..data import uniform_theta as make_uniform_theta
from ..instance import InstanceError
from ..lp import SolverError, solve_fluid_lp
from ..pricing import RhoLadderError, benchmark, mm_solve, pg_solve
from ..simplex import SimplexFailure
from . import schemas

app = FastAPI(
    title="fluid matching pricing service",
    description="Parametric fluid-LP solver, concavity certificates, and pricing optimizers.",
    version="1.0.0",
)


@app.exception_handler(InstanceError)
@app.exception_handler(DataError)
async def _validation_error(request, exc):
    from fastapi.responses import JSONResponse

    return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "validation"})


@app.exception_handler(SolverError)
@app.exception_handler(SimplexFailure)
@app.exception_handler(RhoLadderError)
async def _numerical_error(request, exc):
    from fastapi.responses import JSONResponse

    return JSONResponse(status_code=500, content={"detail": str(exc), "kind": "numerical"})


def _solution_response(sol) -> schemas.SolutionResponse:
    return schemas.SolutionResponse(**sol.to_dict())


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=schemas.SolutionResponse)
def solve(req: schemas.SolveRequest) -> schemas.SolutionResponse:
    instance = req.instance.to_instance()
    sol = solve_fluid_lp(instance, np.asarray(req.lam, dtype=float))
    return _solution_response(sol)


@app.post("/classify", response_model=schemas.ClassifyResponse)
def classify(req: schemas.SolveRequest) -> schemas.ClassifyResponse:
    instance = req.instance.to_instance()
    label, sol = solve_n2(instance, np.asarray(req.lam, dtype=float))
    return schemas.ClassifyResponse(
        case_id=label.case_id.value,
        delta1=label.delta1,
        delta2=label.delta2,
        delta3=label.delta3,
        solution=_solution_response(sol),
    )


@app.post("/certify", response_model=schemas.CertificateResponse)
def certify_endpoint(req: schemas.CertifyRequest) -> schemas.CertificateResponse:
    cert = certify(req.instance.to_instance())
    return schemas.CertificateResponse(**cert.to_dict())


@app.post("/diagnose/hessian", response_model=schemas.HessianResponse)
def hessian(req: schemas.HessianRequest) -> schemas.HessianResponse:
    instance = req.instance.to_instance()
    h, smooth = numerical_hessian(instance, np.asarray(req.lam, dtype=float), req.step)
    return schemas.HessianResponse(
        hessian=h.tolist(),
        smooth=smooth,
        eigenvalues=jacobi_eigenvalues(h).tolist(),
    )


@app.post("/diagnose/partials", response_model=schemas.PartialsResponse)
def partials(req: schemas.PartialsRequest) -> schemas.PartialsResponse:
    instance = req.instance.to_instance()
    if not 0 <= req.coord < instance.n_types:
        raise InstanceError(f"coord must be in [0, {instance.n_types})")
    left, right = one_sided_partials(
        instance, np.asarray(req.lam, dtype=float), req.coord, req.step
    )
    return schemas.PartialsResponse(left=left, right=right)


@app.post("/probe", response_model=schemas.ProbeResponse)
def probe(req: schemas.ProbeRequest) -> schemas.ProbeResponse:
    instance = req.instance.to_instance()
    if req.rho is not None:
        report = probe_midpoint_concavity(instance, req.n_samples, req.rho, req.seed)
        rho = req.rho
    else:
        rho, report = find_weak_concavity_rho(instance, req.n_samples, req.seed)
    d = report.to_dict()
    d["rho"] = rho
    return schemas.ProbeResponse(**d)


@app.post("/price", response_model=schemas.PriceResponse)
def price(req: schemas.PriceRequest) -> schemas.PriceResponse:
    instance = req.instance.to_instance()
    demand = req.demand.to_demand()
    if req.lambda0 is not None:
        lam0 = np.asarray(req.lambda0, dtype=float)
    else:
        rng = np.random.default_rng(req.seed)
        lam0 = rng.uniform(instance.lambda_lower, instance.lambda_upper)
    solver = req.solver.lower()
    if solver == "mm":
        result = mm_solve(
            instance, demand, lam0, eps=req.eps, delta_mm=req.delta_mm, time_cap=req.time_cap
        )
    elif solver == "pg":
        result = pg_solve(
            instance, demand, lam0, step0=req.step0, eps=req.eps, time_cap=req.time_cap
        )
    else:
        raise InstanceError(f"unknown solver {req.solver!r}; use 'mm' or 'pg'")
    return schemas.PriceResponse(**result.to_dict())


@app.post("/benchmark", response_model=schemas.BenchmarkResponse)
def benchmark_endpoint(req: schemas.BenchmarkRequest) -> schemas.BenchmarkResponse:
    instances = [(item.instance_id, item.instance.to_instance()) for item in req.instances]
    demands = [item.demand.to_demand() for item in req.instances]
    result = benchmark(
        instances, demands, req.solvers, req.seeds, time_cap=req.time_cap, eps=req.eps
    )
    return schemas.BenchmarkResponse(**result)


@app.post("/synth", response_model=list[schemas.TripPayload])
def synth(req: schemas.SynthRequest) -> list[schemas.TripPayload]:
    trips = synth_trips(req.n_trips, req.n_hotspots, req.spread, req.extent, req.seed)
    return [
        schemas.TripPayload(
            origin_x=t.origin[0],
            origin_y=t.origin[1],
            dest_x=t.destination[0],
            dest_y=t.destination[1],
            timestamp=t.timestamp,
        )
        for t in trips
    ]


@app.post("/ingest", response_model=schemas.BundleResponse)
def ingest(req: schemas.IngestRequest) -> schemas.BundleResponse:
    trips = [
        TripRecord(origin=(t.origin_x, t.origin_y), destination=(t.dest_x, t.dest_y), timestamp=t.timestamp)
        for t in req.trips
    ]
    if req.theta_mode == "equal":
        theta = make_equal_theta(req.n_types, req.theta)
    elif req.theta_mode == "uniform":
        theta = make_uniform_theta(req.n_types, req.theta_low, req.theta_high, req.seed)
    else:
        raise InstanceError(f"unknown theta_mode {req.theta_mode!r}")
    bundle = build_bundle(
        trips,
        req.n_types,
        theta,
        c_per_mile=req.c_per_mile,
        hours=req.hours,
        seed=req.seed,
    )
    return _bundle_response(bundle)


def _bundle_response(bundle: TypedInstanceBundle) -> schemas.BundleResponse:
    return schemas.BundleResponse(
        matching=schemas.InstancePayload.from_instance(bundle.matching),
        demand=schemas.DemandPayload(
            solo_length=bundle.demand.solo_length.tolist(),
            max_rate=bundle.demand.max_rate.tolist(),
        ),
        cluster_centers=bundle.cluster_centers.tolist(),
        counts=bundle.counts.tolist(),
    )


@app.get("/examples/{example_id}", response_model=schemas.ExampleResponse)
def example(example_id: int) -> schemas.ExampleResponse:
    if example_id not in EXAMPLE_IDS:
        raise HTTPException(status_code=404, detail=f"valid example ids: {list(EXAMPLE_IDS)}")
    report = run_example(example_id)
    extra = {
        k: v for k, v in report.items() if k not in ("example_id", "checks", "passed")
    }
    return schemas.ExampleResponse(
        example_id=report["example_id"],
        passed=report["passed"],
        checks=report["checks"],
        extra=extra,
    )
