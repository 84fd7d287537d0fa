"""Command-line entry point ``interp``."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import experiments as ex
from .core import BasePoint, EvaluationOracle, bundled_instance, load_instance
from .errors import InterpError
from .lp import certificate_csv, dual_certificate, rigorous_lp
from .moments import IndexScheme, collect_moments, natural_indices
from .sdp import super_resolution


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _load(instance: str):
    """Instance from a JSON path or a bundled name; returns ``(g, degree_bound)``."""
    path = Path(instance)
    if path.suffix == ".json" or path.exists():
        g, bound, _ = load_instance(path)
        return g, bound if bound is not None else 10
    inst = bundled_instance(instance)
    return inst.polynomial, inst.degree_bound


@click.group()
def main():
    """Sparse polynomial interpolation from black-box evaluations."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, help="Write the table here instead of stdout.")
def run(config_path, out):
    """Run an experiment described by a JSON config."""
    cfg = ex.ExperimentConfig.from_json(Path(config_path).read_text())
    _emit(ex.run_experiment(cfg, progress=lambda name: click.echo(f"done {name}", err=True)), out)


@main.command("min-evals")
@click.option("--instance", required=True, help="Instance JSON path or bundled name (p1..p10, showcase).")
@click.option("--method", required=True, type=click.Choice(ex.METHODS))
@click.option("--scheme", default=None, type=click.Choice(["a1", "a2", "inf"]))
@click.option("--cap", default=ex.DEGREE_CAP, show_default=True, help="Largest degree tried.")
@click.option("--epsilon", default=0.1, show_default=True, help="Rank threshold.")
@click.option("--out", default=None)
def min_evals(instance, method, scheme, cap, epsilon, out):
    """Smallest evaluation count recovering the instance exactly."""
    g, bound = _load(instance)
    res = ex.find_min_evaluations(g, method, scheme, degree_bound=bound, cap=cap, epsilon=epsilon)
    payload = {"method": method, "status": res.status, "evaluations": res.evaluations,
               "degree": res.degree, "cell": res.cell()}
    _emit(json.dumps(payload) + "\n", out)


@main.command()
@click.option("--instance", required=True)
@click.option("--amplitude", default=ex.NOISE_AMPLITUDE, show_default=True)
@click.option("--trials", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--methods", default="rigorous_lp,superres,toeplitz_prony", show_default=True)
@click.option("--scheme", default=None, type=click.Choice(["a1", "a2", "inf"]))
@click.option("--degree", default=None, type=int, help="Trial degree; defaults to the noiseless maximum.")
@click.option("--epsilon", default=0.1, show_default=True)
@click.option("--format", "fmt", default="markdown", type=click.Choice(["markdown", "csv"]))
@click.option("--out", default=None)
def noise(instance, amplitude, trials, seed, methods, scheme, degree, epsilon, fmt, out):
    """Mean relative error under uniform evaluation noise."""
    g, bound = _load(instance)
    names = [m.strip() for m in methods.split(",") if m.strip()]
    for m in names:
        if m not in ex.METHODS:
            raise click.BadParameter(f"unknown method {m!r}", param_hint="--methods")
    d = degree if degree is not None else ex.noise_degree(g, names, scheme, bound)
    summary = ex.noise_trial_suite(g, names, d, trials, seed, amplitude, epsilon, scheme, bound)
    cells = {s.method: f"{s.mean:.2f}% (sd {s.std:.2f})" for s in summary}
    _emit(ex.emit_table([ex.TableRow(str(g), cells)], names, fmt), out)


@main.command()
@click.option("--n", "n", required=True, type=int)
@click.option("--degree", required=True, type=int)
@click.option("--terms", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", default=None)
def gen(n, degree, terms, seed, out):
    """Draw a random sparse polynomial as instance JSON."""
    g = ex.generate_instance(n, degree, terms, seed)
    _emit(json.dumps(g.to_dict(degree, seed), indent=2) + "\n", out)


@main.command()
@click.option("--instance", required=True)
@click.option("--phi", default="integer_angles", type=click.Choice(["integer_angles", "roots_of_unity"]))
@click.option("--order", default=None, type=int, help="Root-of-unity order.")
@click.option("--scheme", default="a1", type=click.Choice(["a1", "a2"]))
@click.option("--d-max", default=ex.DEGREE_CAP, show_default=True)
@click.option("--out", default=None)
def trace(instance, phi, order, scheme, d_max, out):
    """Super-resolution trace as CSV (order, tv_value, atom_count)."""
    g, _ = _load(instance)
    point = ex.base_point(g, phi, order)
    result = super_resolution(EvaluationOracle(g), point, scheme, 0, d_max)
    _emit(result.to_csv(), out)


@main.command()
@click.option("--instance", required=True)
@click.option("--degree", required=True, type=int)
@click.option("--scheme", default="a1", type=click.Choice(["a1", "a2"]))
@click.option("--out", default=None)
def certificate(instance, degree, scheme, out):
    """Dual polynomial of the rigorous LP on its candidate grid, as CSV."""
    g, bound = _load(instance)
    phi = BasePoint.integer_angles(g.dimension)
    seq = collect_moments(EvaluationOracle(g), phi, IndexScheme(scheme, degree, g.dimension))
    _, sol = rigorous_lp(seq, phi, bound, return_solution=True)
    _emit(certificate_csv(dual_certificate(sol, phi, natural_indices(g.dimension, bound))), out)


def entry() -> None:
    try:
        main(standalone_mode=False)
    except InterpError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(1)


if __name__ == "__main__":
    entry()
