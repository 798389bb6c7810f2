"""Command-line front end.

Every command reads its parameters with the precedence CLI flag >
--config JSON file > built-in default, writes CSV/JSON artifacts into
--out, and prints a one-line summary.  Numerical failures exit 1 with a
single-line error JSON on stderr naming the failing operation; usage
errors exit 2.
"""

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import curves, derivative, invariant
from .errors import CircinvError
from .fourier import PeriodicFn
from .invariant import _fmt
from .reconstruct import (ReconstructionProblem, reconstruct as run_reconstruct,
                          stability_estimate, write_trace)

DEFAULTS = {
    "r": 1.0,
    "modes": 32,
    "grid": 512,
    "curve": None,
    "out": ".",
    "seed": 0,
    "k": 1,
    "amplitude": 0.02,
    "pairs": 20,
    "max_iter": 50,
}


def _merge(config_path, flags):
    """Resolve parameters: explicit flag > config file > default."""
    merged = dict(DEFAULTS)
    if config_path is not None:
        with open(config_path) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def common_options(fn):
    @click.option("--r", type=float, default=None, help=f"disk radius [default {DEFAULTS['r']}]")
    @click.option("--modes", type=int, default=None, help=f"Fourier modes [default {DEFAULTS['modes']}]")
    @click.option("--grid", type=int, default=None, help=f"grid size [default {DEFAULTS['grid']}]")
    @click.option("--curve", "curve_path", type=click.Path(exists=True, dir_okay=False),
                  default=None, help="curve JSON file [default: built-in]")
    @click.option("--out", type=click.Path(file_okay=False), default=None,
                  help=f"output directory [default {DEFAULTS['out']}]")
    @click.option("--seed", type=int, default=None, help=f"RNG seed [default {DEFAULTS['seed']}]")
    @click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                  default=None, help="JSON config file (flags override it)")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)

    return wrapper


def run_guarded(fn):
    """Translate library errors into a one-line error JSON and exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CircinvError as exc:
            payload = {
                "error": type(exc).__name__,
                "operation": exc.operation or "unknown",
                "message": str(exc),
            }
            click.echo(json.dumps(payload), err=True)
            sys.exit(1)

    return wrapper


def _outdir(params):
    out = Path(params["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _get_curve(params):
    if params["curve"] is not None:
        return curves.load_curve(params["curve"])
    return curves.make_circle(1.0, params["modes"], params["grid"])


def _sampled_curve(params):
    if params["curve"] is not None:
        return curves.load_curve(params["curve"])
    rng = np.random.default_rng(params["seed"])
    return curves.sample_perturbed_circle(
        rng, params["amplitude"], n_modes=params["modes"],
        grid_size=params["grid"])


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


@click.group()
@click.version_option(package_name="circinv")
def main():
    """Circular-area integral invariant toolbox."""


@main.command("invariant")
@common_options
@run_guarded
def cmd_invariant(config_path, curve_path, **flags):
    """Invariant profile of a curve via the analytic chord formula."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    cur = _get_curve(params)
    prof = invariant.invariant_analytic(cur, params["r"])
    prof.write_csv(out / "invariant.csv")
    prof.write_json(out / "invariant.json")
    lo, hi = prof.values.samples.min(), prof.values.samples.max()
    click.echo(f"invariant: r={_fmt(params['r'])} min={_fmt(lo)} max={_fmt(hi)}")


@main.command("oracle-compare")
@common_options
@run_guarded
def cmd_oracle_compare(config_path, curve_path, **flags):
    """Analytic invariant against the disk/polygon area oracle."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    cur = _get_curve(params)
    prof = invariant.invariant_analytic(cur, params["r"])
    oracle = invariant.invariant_oracle(cur, params["r"])
    diff = np.abs(prof.values.samples - oracle)
    with open(out / "oracle_compare.csv", "w") as fh:
        fh.write("phi,analytic,oracle,abs_diff\n")
        for phi, a, o, d in zip(cur.grid, prof.values.samples, oracle, diff):
            fh.write(f"{_fmt(phi)},{_fmt(a)},{_fmt(o)},{_fmt(d)}\n")
    _write_json(out / "oracle_compare.json",
                {"r": params["r"], "max_abs_diff": float(diff.max()),
                 "grid_size": cur.grid_size})
    click.echo(f"oracle-compare: max_abs_diff={_fmt(diff.max())}")


@main.command("derivative-check")
@common_options
@click.option("--pairs", type=int, default=None,
              help=f"number of random (curve, field) trials [default {DEFAULTS['pairs']}]")
@click.option("--amplitude", type=float, default=None,
              help=f"perturbation amplitude [default {DEFAULTS['amplitude']}]")
@run_guarded
def cmd_derivative_check(config_path, curve_path, **flags):
    """Directional derivative against central finite differences."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    rng = np.random.default_rng(params["seed"])
    eps_grid = (1e-2, 1e-3, 1e-4)
    rows = []
    for trial in range(params["pairs"]):
        cur = curves.sample_perturbed_circle(
            rng, params["amplitude"], n_modes=params["modes"],
            grid_size=params["grid"])
        phis = cur.grid
        coef = rng.standard_normal(14)
        a_samples = np.zeros(cur.grid_size)
        for j in range(2, 9):
            a_samples += coef[2 * j - 4] * np.cos(j * phis)
            a_samples += coef[2 * j - 3] * np.sin(j * phis)
        a_samples /= np.abs(a_samples).max()
        field = curves.lift_normal(PeriodicFn(a_samples), cur,
                                  check_admissible=False)
        frechet = derivative.frechet_derivative(cur, params["r"], field)
        sup = np.abs(frechet.samples).max()
        errs = []
        for eps in eps_grid:
            ip = invariant.invariant_analytic(field.perturb(+eps), params["r"],
                                              validate=False)
            im = invariant.invariant_analytic(field.perturb(-eps), params["r"],
                                              validate=False)
            fd = (ip.values.samples - im.values.samples) / (2.0 * eps)
            errs.append(float(np.abs(fd - frechet.samples).max() / sup))
        rows.append(errs)
    rows = np.asarray(rows)
    slopes = np.log10(rows[:, 0] / rows[:, 1])
    with open(out / "derivative_check.csv", "w") as fh:
        fh.write("trial,rel_err_1e-2,rel_err_1e-3,rel_err_1e-4,slope\n")
        for i, (e, s) in enumerate(zip(rows, slopes)):
            fh.write(f"{i},{_fmt(e[0])},{_fmt(e[1])},{_fmt(e[2])},{_fmt(s)}\n")
    summary = {
        "trials": int(params["pairs"]),
        "r": params["r"],
        "seed": params["seed"],
        "max_rel_err_1e-4": float(rows[:, 2].max()),
        "mean_slope": float(slopes.mean()),
    }
    _write_json(out / "derivative_check.json", summary)
    click.echo(f"derivative-check: max_rel_err={_fmt(rows[:, 2].max())} "
               f"mean_slope={_fmt(slopes.mean())}")


@main.command("spectrum")
@common_options
@run_guarded
def cmd_spectrum(config_path, curve_path, **flags):
    """Circle-case eigenvalues d_j of the invariant derivative."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    theta = invariant.theta_circle(params["r"])
    spec = derivative.Spectrum.build(theta, params["modes"])
    spec.write_csv(out / "spectrum.csv")
    _write_json(out / "spectrum.json",
                {"r": params["r"], "theta": theta, "n_max": params["modes"]})
    tail = np.abs(spec.values[2:]).min() if params["modes"] >= 2 else float("nan")
    click.echo(f"spectrum: theta={_fmt(theta)} d_0={_fmt(spec.values[0])} "
               f"min_abs_d={_fmt(tail)}")


@main.command("injectivity")
@common_options
@run_guarded
def cmd_injectivity(config_path, curve_path, **flags):
    """Operator matrix, singular values, and injectivity margins."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    cur = _get_curve(params)
    op = derivative.assemble_operator(cur, params["r"], n_modes=params["modes"])
    op.write_csv(out / "operator.csv")
    op.write_json(out / "operator.json")
    margin = derivative.injectivity_margin(op)
    raw = derivative.injectivity_margin(op, constrained=False)
    sine = derivative.sine_inequality_check(
        np.linspace(0.05, np.pi - 0.05, 100), max(2, 2 * params["modes"]))
    _write_json(out / "injectivity.json", {
        "constrained_margin": margin,
        "unconstrained_margin": raw,
        "sine_check": sine,
        "r": params["r"],
        "n_modes": params["modes"],
    })
    click.echo(f"injectivity: margin={_fmt(margin)} unconstrained={_fmt(raw)}")


@main.command("reconstruct")
@common_options
@click.option("--amplitude", type=float, default=None,
              help=f"synthetic target amplitude [default {DEFAULTS['amplitude']}]")
@click.option("--max-iter", type=int, default=None,
              help=f"Gauss-Newton iteration cap [default {DEFAULTS['max_iter']}]")
@run_guarded
def cmd_reconstruct(config_path, curve_path, **flags):
    """Round-trip: invert the invariant of a known synthetic curve."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    gstar = _sampled_curve(params)
    target = invariant.invariant_analytic(gstar, params["r"])
    problem = ReconstructionProblem(
        target=target, r=params["r"], max_iter=params["max_iter"],
        tol_residual=1e-8)
    recovered, trace = run_reconstruct(problem)
    write_trace(trace, out / "reconstruct_trace.json")
    curves.save_curve(recovered, out / "reconstructed_curve.json")
    dev = curves.curve_ck_dist(recovered, gstar, 0)
    _write_json(out / "reconstruct.json", {
        "final_residual": trace[-1]["residual"],
        "iterations": trace[-1]["iter"],
        "recovery_dev": dev,
        "r": params["r"],
        "seed": params["seed"],
    })
    click.echo(f"reconstruct: final_residual={_fmt(trace[-1]['residual'])} "
               f"iters={trace[-1]['iter']} dev={_fmt(dev)}")


@main.command("stability")
@common_options
@click.option("--pairs", type=int, default=None,
              help=f"number of curve pairs [default {DEFAULTS['pairs']}]")
@click.option("--amplitude", type=float, default=None,
              help=f"perturbation amplitude [default {DEFAULTS['amplitude']}]")
@click.option("--k", type=int, default=None,
              help=f"derivative order of the norm [default {DEFAULTS['k']}]")
@run_guarded
def cmd_stability(config_path, curve_path, **flags):
    """Empirical stability constant over random curve pairs."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    report = stability_estimate(
        params["pairs"], params["amplitude"], params["r"], params["k"],
        seed=params["seed"], n_modes=params["modes"],
        grid_size=params["grid"])
    report.write_csv(out / "stability_pairs.csv")
    report.write_json(out / "stability.json")
    click.echo(f"stability: c_hat={_fmt(report.c_hat)} pairs={params['pairs']}")


@main.command("invariance-suite")
@common_options
@click.option("--amplitude", type=float, default=None,
              help=f"perturbation amplitude [default {DEFAULTS['amplitude']}]")
@run_guarded
def cmd_invariance_suite(config_path, curve_path, **flags):
    """Euclidean, grid-shift, and scaling invariance checks."""
    params = _merge(config_path, dict(flags, curve=curve_path))
    out = _outdir(params)
    cur = _sampled_curve(params)
    report = invariant.invariance_suite(cur, params["r"])
    _write_json(out / "invariance.json", report.to_dict())
    status = "pass" if report.max_dev <= 1e-9 else "FAIL"
    click.echo(f"invariance-suite: max_dev={_fmt(report.max_dev)} [{status}]")


if __name__ == "__main__":
    main()
