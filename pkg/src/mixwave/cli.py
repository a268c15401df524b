"""Command-line entry points: simulate, spectrum, decay-fit, oracle, preset."""

from __future__ import annotations

import functools
import logging

import click

from . import io
from .config import PRESET_NAMES, load_config, preset, save_config, emit_config
from .errors import CapacityError, NumericalBreakdownError
from .experiment import emit_plotdata, fit_decay, run_experiment, run_spectrum_experiment
from .fracdiff import (
    TEST_FUNCTIONS,
    caputo_exponential_analytic,
    diffusive_derivative_series,
)
from .operators import build_diffusive_grid


def surface_errors(f):
    """Turn domain errors into clean one-line CLI failures."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (ValueError, OSError, CapacityError, NumericalBreakdownError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


@click.group()
@click.option("--verbose", is_flag=True, help="Log preset expansions and progress.")
def main(verbose: bool):
    """Two-component damped wave mixture: simulation and analysis tools."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--strict/--no-strict", default=True, help="Reject unknown config keys.")
@click.option("--plots/--no-plots", default=True, help="Also write plot-ready CSV/SVG files.")
@surface_errors
def simulate(config_path: str, strict: bool, plots: bool):
    """Run the time integration described by CONFIG_PATH."""
    cfg = load_config(config_path, strict=strict)
    bundle = run_experiment(cfg)
    if plots:
        emit_plotdata(bundle)
    click.echo(f"steps: {bundle.summary['steps']}")
    click.echo(f"final energy: {bundle.summary['final_energy']:.6e}")
    click.echo(f"artifacts in: {bundle.out_dir}")


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--dense", "method", flag_value="dense", help="Force the dense eigensolver.")
@click.option("--krylov", "method", flag_value="krylov", help="Force the Arnoldi eigensolver.")
@click.option("--k", default=6, show_default=True, help="Eigenvalue count for the Arnoldi path.")
@click.option("--seed", default=0, show_default=True, help="Start-vector seed for the Arnoldi path.")
@click.option("--strict/--no-strict", default=True)
@surface_errors
def spectrum(config_path: str, method: str | None, k: int, seed: int, strict: bool):
    """Compute the generator spectrum for CONFIG_PATH and write spectrum.csv."""
    cfg = load_config(config_path, strict=strict)
    bundle = run_spectrum_experiment(cfg, method=method or "auto", k=k, seed=seed)
    emit_plotdata(bundle)
    for key, value in bundle.summary.items():
        click.echo(f"{key}: {value}")
    click.echo(f"artifacts in: {bundle.out_dir}")


@main.command("decay-fit")
@click.argument("energy_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--window", required=True, help="Fit window as 't_min,t_max'.")
@click.option("--alpha", required=True, type=float, help="Fractional order for reference slopes.")
@surface_errors
def decay_fit(energy_csv: str, window: str, alpha: float):
    """Fit a log-log decay slope to the 'total' column of ENERGY_CSV."""
    try:
        t_min, t_max = (float(v) for v in window.split(","))
    except ValueError:
        raise click.BadParameter(f"window must be 't_min,t_max', got {window!r}")
    records = io.read_energy_csv(energy_csv)
    fit = fit_decay(records, (t_min, t_max), alpha)
    click.echo(f"window: [{fit.window[0]:g}, {fit.window[1]:g}]")
    click.echo(f"points: {fit.n_points} (excluded non-positive: {fit.n_excluded})")
    click.echo(f"slope: {fit.slope:.6f}")
    click.echo(f"intercept: {fit.intercept:.6f}")
    click.echo(f"r_squared: {fit.r_squared:.8f}")
    for ref in fit.references:
        click.echo(f"reference slope {ref.slope:+.4f}: rms log10 residual {ref.rms_residual:.4e}")


@main.command()
@click.option("--alpha", required=True, type=float, help="Fractional order in (0, 1).")
@click.option("--eta", default=0.0, show_default=True, type=float, help="Exponential weight.")
@click.option("--f", "f_id", default="identity", show_default=True,
              type=click.Choice(TEST_FUNCTIONS), help="Driven test function.")
@click.option("--modes", default=4000, show_default=True, help="Quadrature mode count.")
@click.option("--dxi", default=0.05, show_default=True, type=float, help="Quadrature spacing.")
@click.option("--dt", default=1e-3, show_default=True, type=float, help="Time step.")
@click.option("--t-final", default=1.0, show_default=True, type=float, help="Final time.")
@click.option("--rows", default=10, show_default=True, help="Number of table rows.")
@surface_errors
def oracle(f_id: str, alpha: float, eta: float, modes: int, dxi: float, dt: float,
           t_final: float, rows: int):
    """Compare the diffusive realization against the analytic derivative."""
    grid = build_diffusive_grid(alpha, modes, dxi)
    n_steps = int(round(t_final / dt))
    sample_every = max(1, n_steps // rows)
    times, outs = diffusive_derivative_series(f_id, grid, eta, dt, t_final, sample_every)
    click.echo("t,diffusive,analytic,rel_error")
    for t, out in zip(times, outs):
        exact = caputo_exponential_analytic(f_id, alpha, eta, float(t))
        rel = abs(out - exact) / abs(exact) if exact != 0 else float("nan")
        click.echo(f"{t:.6g},{out:.10e},{exact:.10e},{rel:.3e}")


@main.command("preset")
@click.argument("name", type=click.Choice(PRESET_NAMES))
@click.option("--emit", "emit_path", type=click.Path(dir_okay=False), default=None,
              help="Write the expanded config to this path instead of stdout.")
def preset_cmd(name: str, emit_path: str | None):
    """Expand a named experiment preset to a fully explicit config."""
    cfg = preset(name)
    if emit_path is None:
        click.echo(emit_config(cfg), nl=False)
    else:
        save_config(cfg, emit_path)
        click.echo(f"wrote {emit_path}")


if __name__ == "__main__":
    main()
