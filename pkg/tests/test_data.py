import numpy as np
import pytest

from fluidpricing import (
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


def test_synth_trips_deterministic():
    a = synth_trips(100, seed=3)
    b = synth_trips(100, seed=3)
    assert len(a) == 100
    assert a[0].origin == b[0].origin
    assert all(np.isfinite(t.as_vector()).all() for t in a)


def test_trip_record_validation():
    with pytest.raises(DataError):
        TripRecord(origin=(0.0, np.nan), destination=(1.0, 1.0))


def test_cluster_trips_shapes():
    trips = synth_trips(300, seed=0)
    assignment, centers = cluster_trips(trips, 6, seed=0)
    assert assignment.shape == (300,)
    assert centers.shape == (6, 4)
    assert set(np.unique(assignment)) <= set(range(6))
    # every cluster is used
    assert len(np.unique(assignment)) == 6


def test_derive_costs_dominance():
    trips = synth_trips(200, seed=1)
    _, centers = cluster_trips(trips, 5, seed=1)
    solo, pair = derive_costs(centers, 0.9)
    assert np.all(solo > 0)
    assert np.allclose(pair, pair.T)
    assert np.allclose(np.diag(pair), solo)
    assert np.all(pair + 1e-12 >= np.maximum.outer(solo, solo))


def test_theta_builders():
    assert np.allclose(equal_theta(3, 0.5), [0.5, 0.5, 0.5])
    th = uniform_theta(4, 0.2, 2.0, seed=1)
    assert th.shape == (4,)
    assert np.all((th >= 0.2) & (th <= 2.0))


def test_build_bundle_valid():
    trips = synth_trips(500, seed=2)
    bundle = build_bundle(trips, 5, equal_theta(5, 1.0), c_per_mile=0.9)
    inst = bundle.matching
    assert inst.n_types == 5
    assert bundle.demand.n_types == 5
    assert bundle.counts.sum() == pytest.approx(500)
    # demand ceiling dominates the lower bound of the rate box
    assert np.all(bundle.demand.max_rate >= inst.lambda_lower)
    inst.validate()


def test_trips_csv_roundtrip(tmp_path):
    trips = synth_trips(50, seed=4)
    path = tmp_path / "trips.csv"
    save_trips_csv(trips, path)
    again = load_trips_csv(path)
    assert len(again) == 50
    assert again[7].origin == pytest.approx(trips[7].origin)


def test_trips_csv_bad_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("origin_x,origin_y,dest_x,dest_y\n1.0,2.0,oops,4.0\n")
    with pytest.raises(DataError, match="line 2"):
        load_trips_csv(path)
    empty = tmp_path / "empty.csv"
    empty.write_text("origin_x,origin_y,dest_x,dest_y\n")
    with pytest.raises(DataError):
        load_trips_csv(empty)


def test_bundle_roundtrip(tmp_path):
    trips = synth_trips(200, seed=5)
    bundle = build_bundle(trips, 3, equal_theta(3, 0.7))
    path = tmp_path / "bundle.json"
    save_bundle(bundle, path)
    again = load_bundle(path)
    assert isinstance(again, TypedInstanceBundle)
    assert np.allclose(again.matching.pair_cost, bundle.matching.pair_cost)
    assert np.allclose(again.demand.max_rate, bundle.demand.max_rate)
    assert np.allclose(again.cluster_centers, bundle.cluster_centers)


def test_build_bundle_rejects_too_few_trips():
    trips = synth_trips(3, seed=0)
    with pytest.raises(DataError):
        build_bundle(trips, 10, equal_theta(10, 1.0))
