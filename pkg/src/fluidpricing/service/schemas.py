"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field

from ..instance import MatchingInstance
from ..pricing import LinearDemand


class InstancePayload(BaseModel):
    theta: list[float]
    solo_cost: list[float]
    pair_cost: list[list[float]]
    lambda_lower: list[float]
    lambda_upper: list[float]

    def to_instance(self) -> MatchingInstance:
        return MatchingInstance.from_dict(self.model_dump())

    @classmethod
    def from_instance(cls, instance: MatchingInstance) -> "InstancePayload":
        d = instance.to_dict()
        d.pop("n_types", None)
        return cls(**d)


class DemandPayload(BaseModel):
    solo_length: list[float]
    max_rate: list[float]

    def to_demand(self) -> LinearDemand:
        return LinearDemand(solo_length=self.solo_length, max_rate=self.max_rate)


class SolveRequest(BaseModel):
    instance: InstancePayload
    lam: list[float] = Field(alias="lambda")

    model_config = {"populate_by_name": True}


class SolutionResponse(BaseModel):
    x: list[float]
    y: list[float]
    objective: float
    gamma: list[float]
    eta: list[float]
    basis_tag: str


class ClassifyResponse(BaseModel):
    case_id: str
    delta1: float
    delta2: float
    delta3: float
    solution: SolutionResponse


class CertifyRequest(BaseModel):
    instance: InstancePayload


class CertificateResponse(BaseModel):
    verdict: str
    rule: Optional[str]
    tau1: Optional[float]
    tau2: Optional[float]
    critical_eff: dict[str, float]
    thresholds: dict[str, list[float]]
    required_lower_bounds: Optional[list[float]]
    witness: Optional[dict[str, Any]]


class HessianRequest(BaseModel):
    instance: InstancePayload
    lam: list[float] = Field(alias="lambda")
    step: Optional[float] = None

    model_config = {"populate_by_name": True}


class HessianResponse(BaseModel):
    hessian: list[list[float]]
    smooth: bool
    eigenvalues: list[float]


class PartialsRequest(BaseModel):
    instance: InstancePayload
    lam: list[float] = Field(alias="lambda")
    coord: int
    step: Optional[float] = None

    model_config = {"populate_by_name": True}


class PartialsResponse(BaseModel):
    left: float
    right: float


class ProbeRequest(BaseModel):
    instance: InstancePayload
    n_samples: int = 1000
    rho: Optional[float] = None  # omitted: doubling search for a passing rho
    seed: int = 0


class ProbeResponse(BaseModel):
    n_samples: int
    rho: Optional[float]
    seed: int
    passes: int
    violations: int
    worst_violation: float
    witness: Optional[dict[str, Any]]


class PriceRequest(BaseModel):
    instance: InstancePayload
    demand: DemandPayload
    solver: str = "mm"
    lambda0: Optional[list[float]] = None
    seed: int = 0
    eps: float = 1e-3
    delta_mm: Optional[float] = None
    step0: float = 1.0
    time_cap: float = 1200.0


class PriceResponse(BaseModel):
    lambda_star: list[float]
    objective: float
    trajectory: list[float]
    iterations: int
    rho_final: float
    solver: str
    stepsize_initial: Optional[float]
    wall_time: float
    converged: bool


class BenchmarkInstancePayload(BaseModel):
    instance_id: str
    instance: InstancePayload
    demand: DemandPayload


class BenchmarkRequest(BaseModel):
    instances: list[BenchmarkInstancePayload]
    solvers: list[str] = ["MM", "PG:1", "PG:10", "PG:100"]
    seeds: list[int] = [0, 1, 2]
    eps: float = 1e-3
    time_cap: float = 1200.0


class BenchmarkResponse(BaseModel):
    rows: list[dict[str, Any]]
    aggregates: list[dict[str, Any]]


class TripPayload(BaseModel):
    origin_x: float
    origin_y: float
    dest_x: float
    dest_y: float
    timestamp: Optional[float] = None


class SynthRequest(BaseModel):
    n_trips: int
    n_hotspots: int = 5
    spread: float = 1.0
    extent: float = 20.0
    seed: int = 0


class IngestRequest(BaseModel):
    trips: list[TripPayload]
    n_types: int
    theta_mode: str = "equal"  # "equal" or "uniform"
    theta: float = 1.0
    theta_low: float = 0.2
    theta_high: float = 2.0
    c_per_mile: float = 0.9
    hours: float = 1.0
    seed: int = 0


class BundleResponse(BaseModel):
    matching: InstancePayload
    demand: DemandPayload
    cluster_centers: list[list[float]]
    counts: list[float]


class ExampleResponse(BaseModel):
    example_id: int
    passed: bool
    checks: list[dict[str, Any]]
    extra: dict[str, Any] = {}
