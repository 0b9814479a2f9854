"""Command-line front end.

The CLI is a thin HTTP client: by default it mounts the service app
in-process, so no server needs to be running; `--server URL` points it at
a remote deployment instead.  Exit codes: 0 success, 2 input/validation
error, 3 numerical failure, 4 time-cap partial result.
"""

from __future__ import annotations

import csv as csv_mod
import io
import json
import sys
from pathlib import Path

import click
import httpx

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _request(ctx, method: str, path: str, **kwargs) -> dict:
    client = _client(ctx.obj.get("server"))
    try:
        resp = client.request(method, path, **kwargs)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    if resp.status_code == 422:
        detail = resp.json().get("detail", "validation error")
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_INPUT)
    if resp.status_code == 404:
        click.echo(f"error: {resp.json().get('detail', 'not found')}", err=True)
        sys.exit(EXIT_INPUT)
    if resp.status_code >= 500:
        try:
            detail = resp.json().get("detail", "numerical failure")
        except Exception:
            detail = "numerical failure"
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_NUMERICAL)
    return resp.json()


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        click.echo(f"error: no such file: {path}", err=True)
        sys.exit(EXIT_INPUT)
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        click.echo(f"error: {path}: invalid JSON: {exc}", err=True)
        sys.exit(EXIT_INPUT)


def _instance_payload(bundle: str | None, instance: str | None) -> dict:
    if (bundle is None) == (instance is None):
        click.echo("error: provide exactly one of --bundle or --instance", err=True)
        sys.exit(EXIT_INPUT)
    if bundle:
        payload = _load_json(bundle)
        if "matching" not in payload:
            click.echo(f"error: {bundle}: not a bundle (no 'matching' field)", err=True)
            sys.exit(EXIT_INPUT)
        d = dict(payload["matching"])
        d.pop("n_types", None)
        return d
    d = _load_json(instance)
    d.pop("n_types", None)
    return d


def _parse_vector(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        click.echo(f"error: {name} must be a comma- or space-separated number list", err=True)
        sys.exit(EXIT_INPUT)


def _flatten(prefix: str, value, out: list) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, value))


def _emit(data: dict, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(data, indent=2, default=str))
        return
    pairs: list = []
    _flatten("", data, pairs)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv_mod.writer(buf)
        writer.writerow(["key", "value"])
        for k, v in pairs:
            writer.writerow([k, json.dumps(v) if isinstance(v, list) else v])
        click.echo(buf.getvalue(), nl=False)
    else:  # table
        width = max((len(k) for k, _ in pairs), default=0)
        for k, v in pairs:
            click.echo(f"{k.ljust(width)}  {v}")


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


_format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv", "table"]), default="json",
    show_default=True, help="Output format.",
)
_bundle_option = click.option("--bundle", type=str, default=None, help="Bundle JSON file.")
_instance_option = click.option("--instance", "instance_path", type=str, default=None,
                                help="Instance JSON file.")


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Fluid matching LP, concavity certificates, and pricing optimizers."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@_bundle_option
@_instance_option
@click.option("--lam", "--lambda", "lam", required=True, help="Arrival rates, e.g. '1.0,2.0'.")
@_format_option
@click.pass_context
def solve(ctx, bundle, instance_path, lam, fmt):
    """Solve the fluid LP at the given arrival rates."""
    payload = {
        "instance": _instance_payload(bundle, instance_path),
        "lambda": _parse_vector(lam, "--lam"),
    }
    _emit(_request(ctx, "POST", "/solve", json=payload), fmt)


@main.command()
@_bundle_option
@_instance_option
@click.option("--lam", "--lambda", "lam", required=True, help="Arrival rates (two types).")
@_format_option
@click.pass_context
def classify(ctx, bundle, instance_path, lam, fmt):
    """Classify the two-type optimal-solution regime via closed forms."""
    payload = {
        "instance": _instance_payload(bundle, instance_path),
        "lambda": _parse_vector(lam, "--lam"),
    }
    _emit(_request(ctx, "POST", "/classify", json=payload), fmt)


@main.command()
@_bundle_option
@_instance_option
@_format_option
@click.pass_context
def certify(ctx, bundle, instance_path, fmt):
    """Apply concavity certificates to the instance's rate box."""
    payload = {"instance": _instance_payload(bundle, instance_path)}
    _emit(_request(ctx, "POST", "/certify", json=payload), fmt)


@main.command()
@_bundle_option
@_instance_option
@click.option("--lam", "--lambda", "lam", required=True, help="Arrival rates.")
@click.option("--mode", type=click.Choice(["hessian", "partials"]), default="hessian",
              show_default=True)
@click.option("--coord", type=int, default=0, show_default=True,
              help="Coordinate for one-sided partials.")
@click.option("--step", type=float, default=None, help="Finite-difference step.")
@_format_option
@click.pass_context
def diagnose(ctx, bundle, instance_path, lam, mode, coord, step, fmt):
    """Numerical curvature diagnostics: Hessian or one-sided partials."""
    payload = {
        "instance": _instance_payload(bundle, instance_path),
        "lambda": _parse_vector(lam, "--lam"),
        "step": step,
    }
    if mode == "hessian":
        _emit(_request(ctx, "POST", "/diagnose/hessian", json=payload), fmt)
    else:
        payload["coord"] = coord
        _emit(_request(ctx, "POST", "/diagnose/partials", json=payload), fmt)


@main.command()
@_bundle_option
@_instance_option
@click.option("--n-samples", type=int, default=1000, show_default=True)
@click.option("--rho", type=float, default=None,
              help="Curvature shift; omitted: doubling search for a passing value.")
@click.option("--seed", type=int, default=0, show_default=True)
@_format_option
@click.pass_context
def probe(ctx, bundle, instance_path, n_samples, rho, seed, fmt):
    """Randomized midpoint-concavity probe of the value function."""
    payload = {
        "instance": _instance_payload(bundle, instance_path),
        "n_samples": n_samples,
        "rho": rho,
        "seed": seed,
    }
    _emit(_request(ctx, "POST", "/probe", json=payload), fmt)


@main.command()
@click.option("--bundle", type=str, required=True, help="Bundle JSON with matching + demand.")
@click.option("--solver", type=click.Choice(["mm", "pg"]), default="mm", show_default=True)
@click.option("--lambda0", default=None, help="Start rates; default samples uniformly by seed.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@click.option("--delta-mm", type=float, default=None, help="Curvature increment for MM.")
@click.option("--step0", type=float, default=1.0, show_default=True, help="Initial PG step.")
@click.option("--time-cap", type=float, default=1200.0, show_default=True)
@_format_option
@click.pass_context
def price(ctx, bundle, solver, lambda0, seed, eps, delta_mm, step0, time_cap, fmt):
    """Maximize profit over arrival rates with MM or projected gradient."""
    b = _load_json(bundle)
    if "matching" not in b or "demand" not in b:
        click.echo(f"error: {bundle}: bundle needs 'matching' and 'demand'", err=True)
        sys.exit(EXIT_INPUT)
    matching = dict(b["matching"])
    matching.pop("n_types", None)
    demand = {k: b["demand"][k] for k in ("solo_length", "max_rate")}
    payload = {
        "instance": matching,
        "demand": demand,
        "solver": solver,
        "lambda0": _parse_vector(lambda0, "--lambda0") if lambda0 else None,
        "seed": seed,
        "eps": eps,
        "delta_mm": delta_mm,
        "step0": step0,
        "time_cap": time_cap,
    }
    result = _request(ctx, "POST", "/price", json=payload)
    _emit(result, fmt)
    if not result.get("converged", False):
        sys.exit(EXIT_PARTIAL)


@main.command()
@click.option("--trips", "trips_path", type=str, required=True, help="Trips CSV file.")
@click.option("--n-types", type=int, required=True)
@click.option("--theta-mode", type=click.Choice(["equal", "uniform"]), default="equal",
              show_default=True)
@click.option("--theta", type=float, default=1.0, show_default=True,
              help="Common patience rate (equal mode).")
@click.option("--theta-low", type=float, default=0.2, show_default=True)
@click.option("--theta-high", type=float, default=2.0, show_default=True)
@click.option("--c-per-mile", type=click.Choice(["0.7", "0.9", "1.1"]), default="0.9",
              show_default=True, help="Per-mile cost.")
@click.option("--hours", type=float, default=1.0, show_default=True,
              help="Observation window the trips cover.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=str, default=None, help="Write the bundle JSON here.")
@_format_option
@click.pass_context
def ingest(ctx, trips_path, n_types, theta_mode, theta, theta_low, theta_high,
           c_per_mile, hours, seed, out, fmt):
    """Cluster a trips CSV into an instance bundle with linear demand."""
    from .data import DataError, load_trips_csv

    try:
        trips = load_trips_csv(trips_path)
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    payload = {
        "trips": [
            {
                "origin_x": t.origin[0],
                "origin_y": t.origin[1],
                "dest_x": t.destination[0],
                "dest_y": t.destination[1],
                "timestamp": t.timestamp,
            }
            for t in trips
        ],
        "n_types": n_types,
        "theta_mode": theta_mode,
        "theta": theta,
        "theta_low": theta_low,
        "theta_high": theta_high,
        "c_per_mile": float(c_per_mile),
        "hours": hours,
        "seed": seed,
    }
    result = _request(ctx, "POST", "/ingest", json=payload)
    if out:
        _write_out(json.dumps(result, indent=2) + "\n", out)
        click.echo(f"bundle written to {out}")
    else:
        _emit(result, fmt)


@main.command()
@click.option("--n-trips", type=int, required=True)
@click.option("--n-hotspots", type=int, default=5, show_default=True)
@click.option("--spread", type=float, default=1.0, show_default=True)
@click.option("--extent", type=float, default=20.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=str, default=None, help="Write trips CSV here.")
@click.pass_context
def synth(ctx, n_trips, n_hotspots, spread, extent, seed, out):
    """Generate synthetic trips (Gaussian-mixture origins/destinations)."""
    payload = {
        "n_trips": n_trips,
        "n_hotspots": n_hotspots,
        "spread": spread,
        "extent": extent,
        "seed": seed,
    }
    trips = _request(ctx, "POST", "/synth", json=payload)
    buf = io.StringIO()
    writer = csv_mod.writer(buf)
    writer.writerow(["origin_x", "origin_y", "dest_x", "dest_y"])
    for t in trips:
        writer.writerow([repr(t["origin_x"]), repr(t["origin_y"]),
                         repr(t["dest_x"]), repr(t["dest_y"])])
    _write_out(buf.getvalue(), out)
    if out:
        click.echo(f"{len(trips)} trips written to {out}")


@main.command()
@click.option("--bundle", "bundles", type=str, multiple=True, required=True,
              help="Bundle JSON file; repeatable.")
@click.option("--solver", "solvers", multiple=True,
              default=("MM", "PG:1", "PG:10", "PG:100"), show_default=True)
@click.option("--seed", "seeds", type=int, multiple=True, default=(0, 1, 2), show_default=True)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@click.option("--time-cap", type=float, default=1200.0, show_default=True)
@click.option("--out", type=str, default=None, help="Write rows CSV here.")
@_format_option
@click.pass_context
def benchmark(ctx, bundles, solvers, seeds, eps, time_cap, out, fmt):
    """Benchmark solvers across bundles and seeds; shared starting rates."""
    items = []
    for path in bundles:
        b = _load_json(path)
        if "matching" not in b or "demand" not in b:
            click.echo(f"error: {path}: bundle needs 'matching' and 'demand'", err=True)
            sys.exit(EXIT_INPUT)
        matching = dict(b["matching"])
        matching.pop("n_types", None)
        items.append(
            {
                "instance_id": Path(path).stem,
                "instance": matching,
                "demand": {k: b["demand"][k] for k in ("solo_length", "max_rate")},
            }
        )
    payload = {
        "instances": items,
        "solvers": list(solvers),
        "seeds": list(seeds),
        "eps": eps,
        "time_cap": time_cap,
    }
    result = _request(ctx, "POST", "/benchmark", json=payload)
    if fmt == "csv" or out:
        from .pricing import benchmark_to_csv

        text = benchmark_to_csv(result)
        if out:
            _write_out(text, out)
            click.echo(f"benchmark rows written to {out}")
        else:
            click.echo(text, nl=False)
    else:
        _emit(result, fmt)


@main.command()
@click.argument("example_id", type=int)
@_format_option
@click.pass_context
def examples(ctx, example_id, fmt):
    """Reproduce a numbered counterexample and print PASS/FAIL checks."""
    result = _request(ctx, "GET", f"/examples/{example_id}")
    if fmt == "json":
        _emit(result, fmt)
    else:
        for c in result["checks"]:
            status = "PASS" if c["pass"] else "FAIL"
            click.echo(f"{status}  {c['name']} = {c['value']} (expected {c['expected_range']})")
        click.echo(("PASS" if result["passed"] else "FAIL") + f"  example {example_id}")
    if not result["passed"]:
        sys.exit(EXIT_NUMERICAL)


if __name__ == "__main__":
    main()
