"""Command-line entry points: data generation, trials, serving, coverage math."""

from __future__ import annotations

import json
import pathlib
from dataclasses import fields as dc_fields

import click
import numpy as np

from .dataset import load_table, read_raw_csv, skyline, write_csv
from .harness import TrialConfig, Metrics, emit_report, gen_uniform, run_trials, summarize
from .single_round import confidence_after, coverage_probability, rounds_for_confidence


@click.group()
def main():
    """Interactive favorite-tuple search under sparse unknown preferences."""


@main.command()
@click.option("--n", type=int, default=10_000, show_default=True)
@click.option("--d", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen(n, d, seed, out):
    """Write a synthetic uniform dataset as CSV."""
    ds = gen_uniform(n, d, np.random.default_rng(seed))
    write_csv(ds, out)
    click.echo(f"wrote {n} x {d} dataset to {out}")


def _config_from_file(path: str | None) -> dict:
    if not path:
        return {}
    data = json.loads(pathlib.Path(path).read_text())
    allowed = {f.name for f in dc_fields(TrialConfig)}
    bad = set(data) - allowed
    if bad:
        raise click.BadParameter(f"unknown config keys: {sorted(bad)}")
    return data


@main.command()
@click.option("--dataset", "dataset_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="CSV input; omit for synthetic data.")
@click.option("--n", type=int, multiple=True, help="Synthetic row counts (repeatable).")
@click.option("--d", type=int, multiple=True, help="Synthetic dimensionalities (repeatable).")
@click.option("--dint", type=int, multiple=True, help="True key counts (repeatable).")
@click.option("--mode", type=click.Choice(["p1", "p2"]), default=None)
@click.option("--q", type=int, default=None, help="Question budget in p2 mode.")
@click.option("--k", "K", type=int, default=None, help="Returned set size in p2 mode.")
@click.option("--reps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON file with TrialConfig fields; flags override.")
@click.option("--report", "report_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for metrics.csv, summary.txt, and figures.")
@click.option("--no-figures", is_flag=True, default=False)
def simulate(dataset_path, n, d, dint, mode, q, K, reps, seed, config_path,
             report_dir, no_figures):
    """Run simulated-user trials over a parameter grid and report metrics."""
    base = _config_from_file(config_path)
    overrides = {"dataset_path": dataset_path, "mode": mode, "q": q, "K": K,
                 "reps": reps, "seed": seed}
    base.update({k: v for k, v in overrides.items() if v is not None})

    ns = list(n) or [base.get("n", TrialConfig.n)]
    ds_ = list(d) or [base.get("d", TrialConfig.d)]
    dints = list(dint) or [base.get("d_int", TrialConfig.d_int)]
    rows: list[Metrics] = []
    for nn in ns:
        for dd in ds_:
            for di in dints:
                kw = dict(base)
                kw.update(n=nn, d=dd, d_int=di)
                cfg = TrialConfig(**kw)
                rows.append(run_trials(cfg))
    click.echo(summarize(rows), nl=False)
    if report_dir:
        paths = emit_report(rows, report_dir, figures=not no_figures)
        click.echo("report files:")
        for p in paths:
            click.echo(f"  {p}")


@main.command()
@click.option("--cand", type=int, required=True, help="Candidate dimension count.")
@click.option("--dint", type=int, required=True, help="Assumed key dimension count.")
@click.option("--w", type=int, default=6, show_default=True)
@click.option("--conf", type=float, default=None,
              help="Target confidence; prints the rounds needed for it.")
def coverage(cand, dint, w, conf):
    """Coverage probability of a w-dimension sample, bound, and round counts."""
    p, bound = coverage_probability(cand, dint, w)
    click.echo(f"P_cover = {p} = {float(p):.6f}")
    click.echo(f"lower bound = {bound:.6f}")
    if conf is not None:
        rounds = rounds_for_confidence(float(p), conf)
        click.echo(f"rounds for confidence {conf}: {rounds}")
    else:
        for rounds in (10, 22, 50):
            click.echo(f"confidence after {rounds} rounds: "
                       f"{confidence_after(float(p), rounds):.4f}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dataset", "dataset_paths", type=click.Path(exists=True, dir_okay=False),
              multiple=True, help="CSV datasets to register (repeatable).")
@click.option("--synthetic", "synthetic_spec", default=None,
              help="Register a synthetic dataset, format n,d[,seed].")
@click.option("--ttl", type=float, default=3600.0, show_default=True,
              help="Idle session expiry in seconds (expiry behaves as quit).")
def serve(port, host, dataset_paths, synthetic_spec, ttl):
    """Start the HTTP session API (and the registry the web UI talks to)."""
    import uvicorn

    from .api import RegisteredDataset, create_app, register_dataset

    registry: dict[str, RegisteredDataset] = {}
    for path in dataset_paths:
        name = pathlib.Path(path).stem
        raw = read_raw_csv(path)
        register_dataset(registry, name, skyline(load_table(raw)), raw)
    if synthetic_spec:
        parts = [int(x) for x in synthetic_spec.split(",")]
        nn, dd = parts[0], parts[1]
        seed = parts[2] if len(parts) > 2 else 0
        register_dataset(registry, f"synthetic-{nn}x{dd}",
                         gen_uniform(nn, dd, np.random.default_rng(seed)))
    if not registry:
        register_dataset(registry, "demo",
                         gen_uniform(2000, 20, np.random.default_rng(0)))
        click.echo("no datasets given; registered synthetic 'demo' (2000 x 20)")
    app = create_app(registry, ttl_seconds=ttl)
    click.echo(f"serving {sorted(registry)} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
