"""bellgeo command line: sampling, NL distances, volumes, histograms, norm
statistics, analytic cycle volumes, and paper-table reproduction.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .cycle import MAX_N, local_volume_ratio, pyramid_volume
from .distance import DEFAULT_EPS, LPFailureError
from .experiments import (
    ExperimentSpec,
    InvalidSpecError,
    draw_samples,
    make_evaluator,
    reproduce as run_reproduce,
    run_22d,
    run_histogram,
    run_volume,
)
from .norms import NumericalFailure, norm_experiment
from .sampler import SamplerConfig, SamplingMethod

EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3


def _fail_invalid(msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(EXIT_INVALID_CONFIG)


def _fail_numerical(msg: str):
    click.echo(f"numerical failure: {msg}", err=True)
    sys.exit(EXIT_NUMERICAL)


def _scenario_options(fn):
    opts = [
        click.option("--scenario", "scenario_kind",
                     type=click.Choice(["2m2", "N22", "22d", "cycle"]),
                     default=None, help="scenario family"),
        click.option("--m", type=int, default=None, help="settings per party (2m2/22d)"),
        click.option("--N", "N", type=int, default=None, help="number of parties (N22)"),
        click.option("--d", type=int, default=None, help="outcomes per measurement (22d)"),
        click.option("--n", type=int, default=None, help="cycle length (cycle)"),
        click.option("--framework", type=click.Choice(["complete", "full"]),
                     default=None),
        click.option("--method", type=click.Choice(["gibbs", "reject", "iid"]),
                     default=None),
        click.option("--samples", "n_samples", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--eps", type=float, default=None),
        click.option("--bins", type=int, default=None),
        click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="JSON config mirroring ExperimentSpec"),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_spec(config_path, **cli_values) -> ExperimentSpec:
    doc = {}
    if config_path is not None:
        try:
            with open(config_path) as f:
                doc = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            _fail_invalid(f"cannot read config {config_path}: {exc}")
    doc.update({k: v for k, v in cli_values.items() if v is not None})
    if "scenario_kind" not in doc:
        _fail_invalid("a scenario is required (--scenario or config file)")
    try:
        if "hist_range" in doc:
            doc["hist_range"] = tuple(doc["hist_range"])
        spec = ExperimentSpec(**doc)
        spec.scenario()  # validate the scenario descriptor eagerly
    except (InvalidSpecError, TypeError, ValueError) as exc:
        _fail_invalid(str(exc))
    return spec


def _emit(text: str, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w") as f:
            f.write(text)


@click.group()
def main():
    """Geometry of Bell correlations: sampling, distances, volumes, norms."""


@main.command()
@_scenario_options
@click.option("--out", type=click.Path(), default=None)
def sample(config_path, out, **cli_values):
    """Draw uniform samples from the nonsignalling polytope (CSV)."""
    spec = _build_spec(config_path, **cli_values)
    try:
        batch = draw_samples(spec)
    except InvalidSpecError as exc:
        _fail_invalid(str(exc))
    except RuntimeError as exc:
        _fail_numerical(str(exc))
    if out is None:
        import io
        import tempfile

        with tempfile.NamedTemporaryFile("r", suffix=".csv") as tmp:
            batch.to_csv(tmp.name)
            click.echo(tmp.read(), nl=False)
    else:
        batch.to_csv(out)


@main.command()
@_scenario_options
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def distance(config_path, out, as_json, **cli_values):
    """Sample the NS polytope and report NL per sample (CSV sample_index,nl)."""
    spec = _build_spec(config_path, **cli_values)
    try:
        batch = draw_samples(spec)
        ev = make_evaluator(spec.scenario())
        values = ev.distances(batch.samples, eps=spec.eps)
    except InvalidSpecError as exc:
        _fail_invalid(str(exc))
    except (LPFailureError, np.linalg.LinAlgError, RuntimeError) as exc:
        _fail_numerical(str(exc))
    if as_json:
        doc = {
            "spec": json.loads(spec.to_json()),
            "n_samples": len(values),
            "local_count": int(np.sum(values <= spec.eps)),
            "mean_nl": float(values.mean()),
            "max_nl": float(values.max()),
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", out)
        return
    lines = [
        f"# scenario: {spec.scenario().describe()}",
        f"# eps: {spec.eps:.6g}",
        f"# seed: {spec.seed}",
        "sample_index,nl",
    ]
    lines += [f"{i},{v:.17g}" for i, v in enumerate(values)]
    _emit("\n".join(lines) + "\n", out)


@main.command()
@_scenario_options
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def volume(config_path, out, as_json, **cli_values):
    """Estimate the local fraction of the nonsignalling polytope."""
    spec = _build_spec(config_path, **cli_values)
    try:
        if spec.scenario_kind == "22d":
            report, _, near_boundary = run_22d(spec)
        else:
            report = run_volume(spec)
            near_boundary = None
    except InvalidSpecError as exc:
        _fail_invalid(str(exc))
    except (LPFailureError, np.linalg.LinAlgError, RuntimeError) as exc:
        _fail_numerical(str(exc))
    if as_json:
        doc = report.json_doc()
        doc["spec"] = json.loads(spec.to_json())
        if near_boundary is not None:
            doc["near_boundary"] = near_boundary
        _emit(json.dumps(doc, sort_keys=True) + "\n", out)
        return
    if out is None:
        import tempfile

        with tempfile.NamedTemporaryFile("r", suffix=".csv") as tmp:
            report.to_csv(tmp.name)
            click.echo(tmp.read(), nl=False)
    else:
        report.to_csv(out)
    if near_boundary is not None:
        click.echo(
            f"# near-boundary: NL<=10eps {near_boundary['frac_le_10eps']:.6g},"
            f" NL<=100eps {near_boundary['frac_le_100eps']:.6g}",
            err=True,
        )


@main.command()
@_scenario_options
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def histogram(config_path, out, as_json, **cli_values):
    """Histogram of NL values over the nonlocal samples."""
    spec = _build_spec(config_path, **cli_values)
    try:
        hist = run_histogram(spec)
    except InvalidSpecError as exc:
        _fail_invalid(str(exc))
    except (LPFailureError, np.linalg.LinAlgError, RuntimeError) as exc:
        _fail_numerical(str(exc))
    if as_json:
        doc = {
            "spec": json.loads(spec.to_json()),
            "edges": hist.edges.tolist(),
            "counts": hist.counts.tolist(),
            "total": hist.total,
            "local_count": hist.local_count,
            "mode_bin": hist.mode_bin,
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", out)
        return
    if out is None:
        import tempfile

        with tempfile.NamedTemporaryFile("r", suffix=".csv") as tmp:
            hist.to_csv(tmp.name)
            click.echo(tmp.read(), nl=False)
    else:
        hist.to_csv(out)


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--samples", "n_samples", type=int, default=1000)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def norms(m, n_samples, seed, out, as_json):
    """π-norm / γ₂-norm statistics of uniform hypercube correlation matrices."""
    if m < 1 or n_samples < 1:
        _fail_invalid("m and --samples must be positive")
    try:
        stats = norm_experiment(
            m, n_samples, SamplerConfig(n_samples=n_samples, seed=seed,
                                        method=SamplingMethod.IID_BOX)
        )
    except ValueError as exc:
        _fail_invalid(str(exc))
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        _fail_numerical(str(exc))
    if as_json:
        doc = {
            "m": stats.m,
            "n_samples": stats.n_samples,
            "frac_pi_le_1": stats.frac_pi_le_1,
            "frac_gamma2_le_1": stats.frac_gamma2_le_1,
            "median_ratio": stats.median_ratio,
            "mean_flatness": stats.mean_flatness,
            "frac_classical_normalized": stats.frac_classical_normalized,
        }
        _emit(json.dumps(doc, sort_keys=True) + "\n", out)
        return
    text = ("m,n_samples,frac_pi_le_1,frac_gamma2_le_1,median_ratio,"
            "mean_flatness\n" + stats.csv_row() + "\n")
    _emit(text, out)


@main.command("cycle-analytic")
@click.option("--n", "n_max", type=int, default=6,
              help="emit rows for n = 2 .. n_max")
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def cycle_analytic(n_max, out, as_json):
    """Exact pyramid volumes and local-volume ratios of cycle scenarios."""
    if not 2 <= n_max <= MAX_N:
        _fail_invalid(f"--n must be in [2, {MAX_N}]")
    rows = [(n, pyramid_volume(n), local_volume_ratio(n))
            for n in range(2, n_max + 1)]
    if as_json:
        doc = [{"n": n, "pyramid_volume": pv, "local_ratio": lr}
               for n, pv, lr in rows]
        _emit(json.dumps(doc) + "\n", out)
        return
    lines = ["n,pyramid_volume,local_ratio"]
    lines += [f"{n},{pv:.17g},{lr:.17g}" for n, pv, lr in rows]
    _emit("\n".join(lines) + "\n", out)


@main.command("reproduce")
@click.argument("table_id",
                type=click.Choice(["I", "II", "III", "IV", "V", "cycle-analytic"]))
@click.option("--seed", type=int, default=2024)
@click.option("--scale", type=float, default=1.0,
              help="multiplier on the default sample counts")
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
def reproduce_cmd(table_id, seed, scale, out, as_json):
    """Re-run one published table and compare against its quoted values."""
    if scale <= 0:
        _fail_invalid("--scale must be positive")

    def progress(row):
        if not as_json:
            verdict = "OK" if row["pass"] else "FAIL"
            click.echo(
                f'{row["label"]:30s} paper {row["paper_percent"]:9.4f}%  '
                f'computed {row["computed_percent"]:9.4f}%  '
                f'tol ±{row["tolerance_pp"]:.2f}pp  {verdict}'
            )

    try:
        report = run_reproduce(table_id, seed=seed, scale=scale,
                               progress=progress)
    except InvalidSpecError as exc:
        _fail_invalid(str(exc))
    except (LPFailureError, NumericalFailure, np.linalg.LinAlgError,
            RuntimeError) as exc:
        _fail_numerical(str(exc))
    if as_json:
        _emit(json.dumps(report, sort_keys=True) + "\n", out)
    else:
        summary = "PASS" if report["pass"] else "FAIL"
        click.echo(f'table {table_id}: {summary}')
        if out is not None:
            with open(out, "w") as f:
                f.write(json.dumps(report, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
