"""Experiment harness: configured runs, decay-rate fitting, plot-data emission."""

from __future__ import annotations

import json
import logging
import time as _time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig, emit_config
from .errors import NumericalBreakdownError
from .integrator import EnergyRecord, initialize, run
from .operators import assemble_generator, build_operator_set
from .spectrum import SpectrumReport, dominant_eigenvalues, full_spectrum

logger = logging.getLogger(__name__)


@dataclass
class Snapshot:
    time: float
    u: np.ndarray
    v: np.ndarray


@dataclass
class RunBundle:
    """Everything one experiment produced, with the paths it was written to."""

    config: ExperimentConfig
    out_dir: Path
    records: list[EnergyRecord]
    energy_csv: Path
    snapshots: list[Snapshot]
    snapshot_paths: list[Path]
    summary: dict
    summary_path: Path
    spectrum: SpectrumReport | None = None


def _prepare_out_dir(cfg: ExperimentConfig) -> Path:
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    probe = out_dir / ".write-probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from exc
    return out_dir


def run_experiment(cfg: ExperimentConfig) -> RunBundle:
    """Initialize, step to the final time, and write the artifact bundle.

    Writes the energy series CSV, component snapshots (u, v and their sum) at
    the configured times, and a JSON summary.  Snapshot times are matched to
    the nearest observed step (observations happen every ``cadence`` steps).
    """
    out_dir = _prepare_out_dir(cfg)
    grid = cfg.grid()
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always")
        material = cfg.material()
        diffusive = cfg.diffusive()
        caught = [str(w.message) for w in wlist]
    for message in caught:
        warnings.warn(message, stacklevel=2)

    params = cfg.newmark()
    ops = build_operator_set(
        material, grid, diffusive, dt=params.dt, beta=params.beta, gamma=params.gamma,
        damping=cfg.damping,
    )
    state = initialize(
        ops,
        diffusive,
        cfg.u0.evaluate(grid),
        cfg.v0.evaluate(grid),
        cfg.u1.evaluate(grid),
        cfg.v1.evaluate(grid),
    )

    n_steps = int(round(cfg.t_final / params.dt))
    snapshot_steps: dict[int, float] = {}
    for t_req in cfg.snapshot_times:
        k = int(round(t_req / params.dt))
        k = min(max(k, 0), n_steps)
        k -= k % cfg.cadence  # snapshots fire on observed steps only
        snapshot_steps[k] = t_req

    snapshots: list[Snapshot] = []

    def snapshot_observer(s, _record):
        if s.step_index in snapshot_steps:
            n = grid.n_cells
            snapshots.append(Snapshot(time=s.time, u=s.disp[:n].copy(), v=s.disp[n:].copy()))

    wall_start = _time.perf_counter()
    state, records = run(
        state,
        ops,
        diffusive,
        params,
        cfg.t_final,
        observers=[snapshot_observer],
        cadence=cfg.cadence,
        energy_variant=cfg.energy_variant,
    )
    wall = _time.perf_counter() - wall_start

    energy_csv = io.write_energy_csv(out_dir / "energy.csv", records)
    snapshot_paths: list[Path] = []
    for snap in snapshots:
        tag = f"{snap.time:g}"
        if cfg.snapshot_format == "bin":
            snapshot_paths.append(
                io.write_fields_bin(out_dir / f"fields_t{tag}.bin", snap.u, snap.v, grid.nx, grid.ny)
            )
        else:
            snapshot_paths.append(io.write_field_csv(out_dir / f"u_t{tag}.csv", snap.u, grid.nx, grid.ny))
            snapshot_paths.append(io.write_field_csv(out_dir / f"v_t{tag}.csv", snap.v, grid.nx, grid.ny))
            snapshot_paths.append(
                io.write_field_csv(out_dir / f"sum_t{tag}.csv", snap.u + snap.v, grid.nx, grid.ny)
            )

    summary = {
        "steps": state.step_index,
        "final_time": state.time,
        "initial_energy": records[0].total,
        "final_energy": records[-1].total,
        "wall_seconds": wall,
        "energy_variant": cfg.energy_variant,
        "damping": cfg.damping,
        "elasticity_ok": material.elasticity_ok,
        "warnings": caught,
        "config": {
            line.split(" = ", 1)[0]: line.split(" = ", 1)[1]
            for line in emit_config(cfg).strip().split("\n")
        },
    }
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")

    return RunBundle(
        config=cfg,
        out_dir=out_dir,
        records=records,
        energy_csv=energy_csv,
        snapshots=snapshots,
        snapshot_paths=snapshot_paths,
        summary=summary,
        summary_path=summary_path,
    )


def run_spectrum_experiment(
    cfg: ExperimentConfig,
    method: str = "auto",
    k: int = 6,
    seed: int = 0,
    dense_limit: int = 4096,
) -> RunBundle:
    """Assemble the generator for a config and record its spectrum.

    ``method`` is 'dense', 'krylov', or 'auto' (dense when the size permits).
    The eigenvalues land in spectrum.csv inside the output directory and on
    the returned bundle; no time stepping happens.
    """
    out_dir = _prepare_out_dir(cfg)
    grid = cfg.grid()
    material = cfg.material()
    diffusive = cfg.diffusive()
    size = (diffusive.n_modes + 2) * 2 * grid.n_cells
    if method == "auto":
        method = "dense" if size <= dense_limit else "krylov"
    report = None
    if method == "dense":
        gen = assemble_generator(material, grid, diffusive, sparse=False, dense_limit=dense_limit)
        report = full_spectrum(gen, dense_limit=dense_limit)
        csv_path = io.write_spectrum_csv(out_dir / "spectrum.csv", report.eigenvalues)
        summary = {
            "method": "dense",
            "size": report.size,
            "max_real_part": report.max_real_part,
            "classification": report.classification(),
            "n_imaginary_axis": report.n_imaginary_axis,
        }
    elif method == "krylov":
        gen = assemble_generator(material, grid, diffusive, sparse=True, dense_limit=dense_limit)
        result = dominant_eigenvalues(gen, k=k, seed=seed)
        if result.values.size == 0:
            raise NumericalBreakdownError(
                "Arnoldi iteration returned no converged eigenvalues; raise max_iter or k"
            )
        csv_path = io.write_spectrum_csv(out_dir / "spectrum.csv", result.values, result.residuals)
        eigenvalues = result.values
        report = SpectrumReport(
            eigenvalues=eigenvalues,
            max_real_part=float(eigenvalues.real.max()),
            dominant=eigenvalues[np.abs(eigenvalues) >= np.abs(eigenvalues).max() * (1 - 1e-9)],
            n_imaginary_axis=0,
            size=size,
            tolerance=0.0,
        )
        summary = {
            "method": "krylov",
            "size": size,
            "k": k,
            "converged": result.converged,
            "max_real_part_of_dominant": float(eigenvalues.real.max()),
        }
    else:
        raise ValueError(f"method must be dense, krylov or auto, got {method!r}")
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")
    return RunBundle(
        config=cfg,
        out_dir=out_dir,
        records=[],
        energy_csv=csv_path,
        snapshots=[],
        snapshot_paths=[],
        summary=summary,
        summary_path=summary_path,
        spectrum=report,
    )


# ---------------------------------------------------------------------------
# Decay fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReferenceFit:
    """Best offset and RMS log-residual for a fixed reference slope."""

    slope: float
    intercept: float
    rms_residual: float


@dataclass(frozen=True)
class DecayFit:
    """Least-squares power-law fit of an energy series on a log-log window."""

    window: tuple[float, float]
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    n_excluded: int
    references: tuple[ReferenceFit, ...]


def fit_decay(
    records: list[EnergyRecord],
    window: tuple[float, float],
    alpha: float,
) -> DecayFit:
    """Fit log10(E) against log10(t) over the window.

    Records outside the window or with non-positive energy are excluded (the
    latter counted in ``n_excluded``); at least 10 usable points are required.
    Residuals against the reference slopes -1/(1-alpha) and -1 are reported
    with the offset of each reference chosen optimally, so they are invariant
    under rescaling the energy.
    """
    t_min, t_max = window
    if t_min <= 0:
        raise ValueError(f"window start must be positive for a log-log fit, got {t_min}")
    if t_max <= t_min:
        raise ValueError(f"empty window {window}")
    t = np.array([r.time for r in records])
    e = np.array([r.total for r in records])
    in_window = (t >= t_min) & (t <= t_max)
    usable = in_window & (e > 0)
    n_excluded = int(np.count_nonzero(in_window & ~usable))
    if np.count_nonzero(usable) < 10:
        raise ValueError(
            f"need at least 10 records with positive energy in {window}, "
            f"found {np.count_nonzero(usable)}"
        )
    x = np.log10(t[usable])
    y = np.log10(e[usable])
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    y_hat = design @ (slope, intercept)
    ss_res = float(np.sum((y - y_hat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot

    references = []
    for ref_slope in (-1.0 / (1.0 - alpha), -1.0):
        ref_intercept = float(np.mean(y - ref_slope * x))
        rms = float(np.sqrt(np.mean((y - ref_slope * x - ref_intercept) ** 2)))
        references.append(ReferenceFit(slope=ref_slope, intercept=ref_intercept, rms_residual=rms))

    return DecayFit(
        window=(float(t_min), float(t_max)),
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r_squared),
        n_points=int(np.count_nonzero(usable)),
        n_excluded=n_excluded,
        references=tuple(references),
    )


# ---------------------------------------------------------------------------
# Plot data
# ---------------------------------------------------------------------------


def emit_plotdata(bundle: RunBundle, window: tuple[float, float] | None = None) -> list[Path]:
    """Write plot-ready CSVs and SVG renderings for a run bundle.

    * energy_linear.csv: the energy split against time;
    * energy_loglog.csv: rows with t > 0 and E > 0 only, plus reference
      columns C1/t and C2/t^2 anchored at the first retained (or first
      in-window) point;
    * sum_t*.csv: heatmap grids of u+v at the snapshot times;
    * spectrum_scatter.csv: re/im pairs when the bundle carries a spectrum;
    * an SVG rendering next to each CSV.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = bundle.out_dir
    written: list[Path] = []
    records = bundle.records
    cfg = bundle.config

    if records:
        t = np.array([r.time for r in records])
        total = np.array([r.total for r in records])

        path = out_dir / "energy_linear.csv"
        lines = ["t,kinetic,elastic,diffusive,total"]
        for r in records:
            lines.append(
                ",".join(
                    io.format_float(v) for v in (r.time, r.kinetic, r.elastic, r.diffusive, r.total)
                )
            )
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(t, total, label="total")
        ax.plot(t, [r.kinetic for r in records], label="kinetic", alpha=0.7)
        ax.plot(t, [r.elastic for r in records], label="elastic", alpha=0.7)
        ax.set_xlabel("t")
        ax.set_ylabel("energy")
        ax.legend()
        fig.savefig(out_dir / "energy.svg")
        plt.close(fig)
        written.append(out_dir / "energy.svg")

        keep = (t > 0) & (total > 0)
        if window is not None:
            keep &= (t >= window[0]) & (t <= window[1])
        if np.any(keep):
            tk, ek = t[keep], total[keep]
            c1 = ek[0] * tk[0]
            c2 = ek[0] * tk[0] ** 2
            path = out_dir / "energy_loglog.csv"
            lines = ["t,total,ref_c1_over_t,ref_c2_over_t2"]
            for ti, ei in zip(tk, ek):
                lines.append(
                    ",".join(io.format_float(v) for v in (ti, ei, c1 / ti, c2 / ti**2))
                )
            path.write_text("\n".join(lines) + "\n")
            written.append(path)

            fig, ax = plt.subplots(figsize=(6, 4))
            ax.loglog(tk, ek, label="E(t)")
            ax.loglog(tk, c1 / tk, "--", label="C1/t")
            ax.loglog(tk, c2 / tk**2, ":", label="C2/t^2")
            ax.set_xlabel("t")
            ax.set_ylabel("energy")
            ax.legend()
            fig.savefig(out_dir / "energy_loglog.svg")
            plt.close(fig)
            written.append(out_dir / "energy_loglog.svg")

    grid = cfg.grid()
    for snap in bundle.snapshots:
        tag = f"{snap.time:g}"
        total_field = (snap.u + snap.v).reshape(grid.ny, grid.nx)
        path = io.write_field_csv(out_dir / f"plot_sum_t{tag}.csv", snap.u + snap.v, grid.nx, grid.ny)
        written.append(path)
        fig, ax = plt.subplots(figsize=(5, 4))
        im = ax.imshow(
            total_field,
            origin="lower",
            extent=(0, grid.lx, 0, grid.ly),
            aspect="equal",
        )
        fig.colorbar(im, ax=ax)
        ax.set_title(f"u+v at t={tag}")
        fig.savefig(out_dir / f"plot_sum_t{tag}.svg")
        plt.close(fig)
        written.append(out_dir / f"plot_sum_t{tag}.svg")

    if bundle.spectrum is not None:
        ev = bundle.spectrum.eigenvalues
        path = out_dir / "spectrum_scatter.csv"
        lines = ["re,im"]
        for lam in ev:
            lines.append(f"{io.format_float(lam.real)},{io.format_float(lam.imag)}")
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.scatter(ev.real, ev.imag, s=6)
        ax.axvline(0.0, color="k", lw=0.5)
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        fig.savefig(out_dir / "spectrum.svg")
        plt.close(fig)
        written.append(out_dir / "spectrum.svg")

    return written
