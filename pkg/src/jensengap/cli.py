"""Command-line front end: a thin client of the FastAPI service.

Without ``--server`` the commands talk to an in-process copy of the
service; with ``--server URL`` they talk to a running one.  Exit status
is nonzero iff an asserted check is violated or the input is invalid;
paper-literal variant rows are informational and never affect it.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click


def _client(server: str | None):
    import httpx
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app)


def _post(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        click.echo(f"error: {detail}", err=True)
        sys.exit(2)
    return resp.json()


def _load_instance(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read instance file: {exc}", err=True)
        sys.exit(2)


def _write_reports(csv_text: str, json_text: str, report: str | None,
                   as_json: bool) -> None:
    if report:
        Path(report).write_text(csv_text)
        if as_json:
            Path(report).with_suffix(".json").write_text(json_text)
    else:
        click.echo(json_text if as_json else csv_text, nl=False)


def _shared_options(fn):
    for opt in (
        click.option("--tol", type=float, default=1e-9, show_default=True),
        click.option("--eq-tol", type=float, default=1e-9, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--report", type=click.Path(dir_okay=False),
                     help="Write the CSV report to this path."),
        click.option("--json", "as_json", is_flag=True,
                     help="Emit the JSON report mirror."),
    ):
        fn = opt(fn)
    return fn


@click.group()
@click.option("--server", envvar="JENSENGAP_SERVER", default=None,
              help="URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Verify Jensen-type inequalities on pairs of measure spaces."""
    ctx.obj = server


@main.command()
@click.option("--instance", "instance_path",
              type=click.Path(exists=True, dir_okay=False),
              help="Instance JSON file.")
@click.option("--gen", "generator", help="Generator spec, e.g. "
              "matrix:p=5,q=5,c=3 or hypergraph:p=6,q=4,k=3.")
@click.option("--phi", "phis", multiple=True, default=("id", "log"),
              show_default=True, help="phi spec (repeatable).")
@click.option("--checks", "check_names", multiple=True, default=("all",),
              show_default=True, help="Check name (repeatable).")
@click.option("--trials", type=int, default=100, show_default=True)
@_shared_options
@click.pass_context
def verify(ctx, instance_path, generator, phis, check_names, trials, tol,
           eq_tol, seed, report, as_json):
    """Run the check suite on one instance."""
    if (instance_path is None) == (generator is None):
        click.echo("error: provide exactly one of --instance and --gen",
                   err=True)
        sys.exit(2)
    payload = {
        "instance": _load_instance(instance_path) if instance_path else None,
        "generator": generator,
        "checks": list(check_names),
        "phi": list(phis),
        "tol": tol, "eq_tol": eq_tol, "seed": seed, "trials": trials,
    }
    body = _post(ctx.obj, "/verify", payload)
    _write_reports(body["csv"], body["json_report"], report, as_json)
    for skip in body["skipped"]:
        click.echo(f"skipped {skip['check']} ({skip['phi']}): "
                   f"{skip['reason']}", err=True)
    sys.exit(0 if body["ok"] else 1)


@main.command()
@click.option("--count", type=int, default=1000, show_default=True)
@click.option("--phi", "phis", multiple=True, default=("id", "log"),
              show_default=True)
@click.option("--literal-power-mean", is_flag=True,
              help="Also run the paper-literal power-mean variant "
                   "(informational; its violations do not affect exit "
                   "status).")
@_shared_options
@click.pass_context
def fuzz(ctx, count, phis, literal_power_mean, tol, eq_tol, seed, report,
         as_json):
    """Fuzz random instances and shrink any violating one."""
    payload = {"count": count, "seed": seed, "phi": list(phis),
               "tol": tol, "eq_tol": eq_tol,
               "literal_power_mean": literal_power_mean}
    body = _post(ctx.obj, "/fuzz", payload)
    _write_reports(body["csv"], body["json_report"], report, as_json)
    asserted = [v for v in body["violations"]
                if not v["check"].endswith(":paper-literal")]
    click.echo(f"tried {body['instances_tried']} instances, "
               f"{len(body['violations'])} violation(s) recorded", err=True)
    sys.exit(0 if not asserted else 1)


@main.command()
@click.option("--instance", "instance_path",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--gen", "generator")
@click.option("--family", required=True,
              help="phi family spec, e.g. pow:0.25..4:0.25.")
@_shared_options
@click.pass_context
def sweep(ctx, instance_path, generator, family, tol, eq_tol, seed, report,
          as_json):
    """Check one instance across a parameterized phi family."""
    if (instance_path is None) == (generator is None):
        click.echo("error: provide exactly one of --instance and --gen",
                   err=True)
        sys.exit(2)
    payload = {
        "instance": _load_instance(instance_path) if instance_path else None,
        "generator": generator, "family": family,
        "tol": tol, "eq_tol": eq_tol, "seed": seed,
    }
    body = _post(ctx.obj, "/sweep", payload)
    _write_reports(body["csv"], body["json_report"], report, as_json)
    sys.exit(0 if body["ok"] else 1)


@main.command()
@click.option("--gen", "generator", required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False),
              help="Write the instance JSON here (default stdout).")
@click.pass_context
def generate(ctx, generator, seed, out):
    """Generate a random instance and emit its JSON."""
    body = _post(ctx.obj, "/generate", {"generator": generator, "seed": seed})
    text = json.dumps(body["instance"], indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the verification service with uvicorn."""
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
