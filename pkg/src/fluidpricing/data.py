"""Instance construction from trip data: clustering, costs, demand, I/O."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import InstanceError, MatchingInstance
from .pricing import LinearDemand

__all__ = [
    "TripRecord",
    "TypedInstanceBundle",
    "DataError",
    "synth_trips",
    "cluster_trips",
    "derive_costs",
    "build_bundle",
    "equal_theta",
    "uniform_theta",
    "save_trips_csv",
    "load_trips_csv",
    "save_bundle",
    "load_bundle",
]

DEFAULT_LAMBDA_LOWER = 1e-3


class DataError(ValueError):
    """Malformed trip data or bundle files."""


@dataclass(frozen=True)
class TripRecord:
    """One trip: planar origin and destination coordinates in miles."""

    origin: tuple[float, float]
    destination: tuple[float, float]
    timestamp: float | None = None

    def __post_init__(self):
        coords = (*self.origin, *self.destination)
        if not all(math.isfinite(v) for v in coords):
            raise DataError("trip coordinates must be finite")

    @property
    def is_zero_length(self) -> bool:
        return self.origin == self.destination

    def as_vector(self) -> np.ndarray:
        return np.array([*self.origin, *self.destination], dtype=float)


@dataclass
class TypedInstanceBundle:
    """A matching instance plus its linear demand and provenance."""

    matching: MatchingInstance
    demand: LinearDemand
    cluster_centers: np.ndarray  # (N, 4): origin_x, origin_y, dest_x, dest_y
    counts: np.ndarray  # trips per hour per type

    def to_dict(self) -> dict:
        return {
            "matching": self.matching.to_dict(),
            "demand": self.demand.to_dict(),
            "cluster_centers": self.cluster_centers.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TypedInstanceBundle":
        return cls(
            matching=MatchingInstance.from_dict(d["matching"]),
            demand=LinearDemand.from_dict(d["demand"]),
            cluster_centers=np.asarray(d["cluster_centers"], dtype=float),
            counts=np.asarray(d["counts"], dtype=float),
        )


def synth_trips(
    n_trips: int,
    n_hotspots: int = 5,
    spread: float = 1.0,
    extent: float = 20.0,
    seed: int = 0,
) -> list[TripRecord]:
    """Gaussian-mixture origin/destination generator, deterministic by seed.

    Hotspot centers are sampled uniformly in a square of the given extent;
    each trip picks an origin hotspot and a destination hotspot and adds
    isotropic Gaussian noise of the given spread (miles).
    """
    if n_trips < 1 or n_hotspots < 1 or spread < 0 or extent <= 0:
        raise DataError("invalid generator parameters")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, extent, size=(n_hotspots, 2))
    o_idx = rng.integers(0, n_hotspots, size=n_trips)
    d_idx = rng.integers(0, n_hotspots, size=n_trips)
    origins = centers[o_idx] + rng.normal(0.0, spread, size=(n_trips, 2)) if spread > 0 else centers[o_idx]
    dests = centers[d_idx] + rng.normal(0.0, spread, size=(n_trips, 2)) if spread > 0 else centers[d_idx]
    return [
        TripRecord(origin=(float(o[0]), float(o[1])), destination=(float(d[0]), float(d[1])))
        for o, d in zip(origins, dests)
    ]


def _kmeans_pp_init(points: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty((n, points.shape[1]))
    centers[0] = points[rng.integers(len(points))]
    dist2 = np.sum((points - centers[0]) ** 2, axis=1)
    for k in range(1, n):
        total = dist2.sum()
        if total <= 0:
            centers[k:] = points[rng.integers(len(points), size=n - k)]
            break
        probs = dist2 / total
        centers[k] = points[rng.choice(len(points), p=probs)]
        dist2 = np.minimum(dist2, np.sum((points - centers[k]) ** 2, axis=1))
    return centers


def cluster_trips(
    trips: list[TripRecord], n: int, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """K-means over 4-dimensional (origin, destination) vectors.

    Returns (assignment, centers).  Seeded k-means++ initialization, Lloyd
    iterations until the relative inertia change drops below 1e-6 or 300
    iterations.
    """
    if n < 1:
        raise DataError("need at least one cluster")
    if len(trips) < n:
        raise DataError(f"need at least {n} trips for {n} clusters, got {len(trips)}")
    points = np.stack([t.as_vector() for t in trips])
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(points, n, rng)
    prev_inertia = np.inf
    assignment = np.zeros(len(points), dtype=int)
    for _ in range(300):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        assignment = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(len(points)), assignment].sum())
        for k in range(n):
            mask = assignment == k
            if mask.any():
                centers[k] = points[mask].mean(axis=0)
            else:  # re-seed an empty cluster at the worst-served point
                centers[k] = points[np.argmax(d2[np.arange(len(points)), assignment])]
        if prev_inertia - inertia <= 1e-6 * max(1.0, prev_inertia):
            break
        prev_inertia = inertia
    d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    assignment = np.argmin(d2, axis=1)
    return assignment, centers


def _route_length(o_i, d_i, o_j, d_j) -> float:
    """Shortest of the four shared-route pickup/dropoff orderings."""

    def leg(a, b):
        return float(np.hypot(a[0] - b[0], a[1] - b[1]))

    return min(
        leg(o_i, o_j) + leg(o_j, d_i) + leg(d_i, d_j),
        leg(o_i, o_j) + leg(o_j, d_j) + leg(d_j, d_i),
        leg(o_j, o_i) + leg(o_i, d_j) + leg(d_j, d_i),
        leg(o_j, o_i) + leg(o_i, d_i) + leg(d_i, d_j),
    )


def derive_costs(centers: np.ndarray, c_per_mile: float) -> tuple[np.ndarray, np.ndarray]:
    """Solo and pooled trip costs from cluster-center OD pairs.

    Pooled lengths are clamped below by both solo lengths so the resulting
    cost matrix satisfies the instance invariants; the diagonal is the solo
    length exactly.
    """
    if c_per_mile <= 0:
        raise DataError("c_per_mile must be positive")
    centers = np.asarray(centers, dtype=float)
    n = centers.shape[0]
    origins, dests = centers[:, :2], centers[:, 2:]
    solo_len = np.hypot(*(origins - dests).T)
    pooled = np.empty((n, n))
    for i in range(n):
        pooled[i, i] = solo_len[i]
        for j in range(i + 1, n):
            raw = _route_length(origins[i], dests[i], origins[j], dests[j])
            pooled[i, j] = pooled[j, i] = max(raw, solo_len[i], solo_len[j])
    return c_per_mile * solo_len, c_per_mile * pooled


def equal_theta(n: int, theta: float) -> np.ndarray:
    """Common patience rate for all types."""
    if theta < 0:
        raise DataError("theta must be nonnegative")
    return np.full(n, float(theta))


def uniform_theta(n: int, theta_low: float, theta_high: float, seed: int = 0) -> np.ndarray:
    """Per-type patience rates drawn uniformly from [theta_low, theta_high]."""
    if not 0 <= theta_low <= theta_high:
        raise DataError("need 0 <= theta_low <= theta_high")
    rng = np.random.default_rng(seed)
    return rng.uniform(theta_low, theta_high, n)


def build_bundle(
    trips: list[TripRecord],
    n_types: int,
    theta: np.ndarray,
    c_per_mile: float = 0.9,
    hours: float = 1.0,
    lambda_lower: float = DEFAULT_LAMBDA_LOWER,
    seed: int = 0,
) -> TypedInstanceBundle:
    """Cluster trips into types and assemble instance + linear demand.

    The per-type maximum rate is the cluster's trips per hour; solo trip
    lengths give both the matching costs (scaled by c_per_mile) and the
    linear demand slopes.
    """
    if hours <= 0:
        raise DataError("hours must be positive")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n_types,):
        raise DataError(f"theta must have shape ({n_types},)")
    assignment, centers = cluster_trips(trips, n_types, seed)
    solo_cost, pair_cost = derive_costs(centers, c_per_mile)
    if np.any(solo_cost <= 0):
        raise DataError("a cluster center has a zero-length trip; cannot derive positive costs")
    counts = np.bincount(assignment, minlength=n_types) / hours
    max_rate = np.maximum(counts, lambda_lower)
    matching = MatchingInstance(
        theta=theta,
        solo_cost=solo_cost,
        pair_cost=pair_cost,
        lambda_lower=np.full(n_types, lambda_lower),
        lambda_upper=max_rate,
    )
    demand = LinearDemand(solo_length=solo_cost / c_per_mile, max_rate=max_rate)
    return TypedInstanceBundle(
        matching=matching, demand=demand, cluster_centers=centers, counts=counts
    )


_TRIP_COLUMNS = ["origin_x", "origin_y", "dest_x", "dest_y"]


def save_trips_csv(trips: list[TripRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        has_ts = any(t.timestamp is not None for t in trips)
        writer.writerow(_TRIP_COLUMNS + (["timestamp"] if has_ts else []))
        for t in trips:
            row = [repr(t.origin[0]), repr(t.origin[1]), repr(t.destination[0]), repr(t.destination[1])]
            if has_ts:
                row.append("" if t.timestamp is None else repr(t.timestamp))
            writer.writerow(row)


def load_trips_csv(path: str | Path) -> list[TripRecord]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        missing = [c for c in _TRIP_COLUMNS if c not in header]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        idx = {c: header.index(c) for c in header}
        trips = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                ox = float(row[idx["origin_x"]])
                oy = float(row[idx["origin_y"]])
                dx = float(row[idx["dest_x"]])
                dy = float(row[idx["dest_y"]])
                ts = None
                if "timestamp" in idx and len(row) > idx["timestamp"] and row[idx["timestamp"]].strip():
                    ts = float(row[idx["timestamp"]])
            except (ValueError, IndexError) as exc:
                raise DataError(f"{path}: malformed row at line {lineno}: {exc}") from None
            trips.append(TripRecord(origin=(ox, oy), destination=(dx, dy), timestamp=ts))
    if not trips:
        raise DataError(f"{path}: no trip rows")
    return trips


def save_bundle(bundle: TypedInstanceBundle, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(bundle.to_dict(), fh, indent=2)


def load_bundle(path: str | Path) -> TypedInstanceBundle:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        with open(path) as fh:
            payload = json.load(fh)
        return TypedInstanceBundle.from_dict(payload)
    except (json.JSONDecodeError, KeyError, TypeError, InstanceError) as exc:
        raise DataError(f"{path}: invalid bundle: {exc}") from exc
