import json

import pytest
from click.testing import CliRunner

from fluidpricing.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(
        json.dumps(
            {
                "theta": [1.0, 2.0],
                "solo_cost": [1.0, 1.0],
                "pair_cost": [[1.0, 1.01], [1.01, 1.0]],
                "lambda_lower": [1e-3, 1e-3],
                "lambda_upper": [10.0, 10.0],
            }
        )
    )
    return str(path)


def test_solve_json(runner, instance_file):
    res = runner.invoke(main, ["solve", "--instance", instance_file, "--lam", "0.5,0.7"])
    assert res.exit_code == 0, res.output
    body = json.loads(res.output)
    assert body["objective"] == pytest.approx(0.83171905697, abs=1e-8)


def test_solve_table_format(runner, instance_file):
    res = runner.invoke(
        main,
        ["solve", "--instance", instance_file, "--lam", "0.5 0.7", "--format", "table"],
    )
    assert res.exit_code == 0
    assert "objective" in res.output


def test_validation_exit_code(runner, instance_file):
    res = runner.invoke(main, ["solve", "--instance", instance_file, "--lam", "0.5,-1"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["solve", "--instance", "/nope.json", "--lam", "1,1"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["solve", "--instance", instance_file, "--lam", "a,b"])
    assert res.exit_code == 2


def test_classify(runner, instance_file):
    res = runner.invoke(main, ["classify", "--instance", instance_file, "--lam", "0.5,0.7"])
    assert res.exit_code == 0
    assert json.loads(res.output)["case_id"] == "FullyMatched"


def test_certify(runner, instance_file):
    res = runner.invoke(main, ["certify", "--instance", instance_file])
    assert res.exit_code == 0
    assert json.loads(res.output)["verdict"] == "WeaklyConcaveCertified"


def test_diagnose_partials(runner, instance_file):
    res = runner.invoke(
        main,
        ["diagnose", "--instance", instance_file, "--lam", "0.5,0.7",
         "--mode", "partials", "--coord", "0"],
    )
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["left"] == pytest.approx(body["right"], abs=1e-4)


def test_examples_command(runner):
    res = runner.invoke(main, ["examples", "1", "--format", "table"])
    assert res.exit_code == 0
    assert "PASS" in res.output
    res = runner.invoke(main, ["examples", "9"])
    assert res.exit_code == 2


def test_full_pipeline(runner, tmp_path):
    trips = str(tmp_path / "trips.csv")
    bundle = str(tmp_path / "bundle.json")
    res = runner.invoke(main, ["synth", "--n-trips", "150", "--seed", "1", "--out", trips])
    assert res.exit_code == 0, res.output
    res = runner.invoke(
        main,
        ["ingest", "--trips", trips, "--n-types", "3", "--theta", "1.0", "--out", bundle],
    )
    assert res.exit_code == 0, res.output
    res = runner.invoke(main, ["price", "--bundle", bundle, "--solver", "mm"])
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["converged"] is True
    out_csv = str(tmp_path / "bench.csv")
    res = runner.invoke(
        main,
        ["benchmark", "--bundle", bundle, "--solver", "MM", "--solver", "PG:10",
         "--seed", "0", "--out", out_csv],
    )
    assert res.exit_code == 0, res.output
    lines = open(out_csv).read().strip().splitlines()
    assert lines[0].startswith("instance_id,solver,step0,seed")
    assert len(lines) == 3


def test_price_time_cap_partial_exit_code(runner, tmp_path):
    trips = str(tmp_path / "trips.csv")
    bundle = str(tmp_path / "bundle.json")
    runner.invoke(main, ["synth", "--n-trips", "150", "--seed", "1", "--out", trips])
    runner.invoke(
        main, ["ingest", "--trips", trips, "--n-types", "3", "--out", bundle]
    )
    res = runner.invoke(
        main, ["price", "--bundle", bundle, "--solver", "pg", "--time-cap", "0"]
    )
    assert res.exit_code == 4


def test_ingest_bad_csv(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("origin_x,origin_y,dest_x,dest_y\n1,2,zzz,4\n")
    res = runner.invoke(main, ["ingest", "--trips", str(bad), "--n-types", "2"])
    assert res.exit_code == 2
