"""Experiment configuration: flat key-value files, presets, initial conditions.

Config files are plain text, one ``section.key = value`` pair per line, with
``#`` comments and blank lines ignored::

    grid.I = 200
    material.a12 = -0.5
    init.u0 = gaussian(0.5, 0.0, 0.01)
    snapshot.times = 1.0, 3.0, 10.0

Unknown keys are rejected in strict mode (the default) and warned about
otherwise.  ``emit_config`` writes a fully explicit file; load(emit(cfg))
reproduces cfg field for field.

Schema (defaults in parentheses):

    preset                 expand a named preset first, then apply overrides
    grid.l1, grid.l2       rectangle side lengths (1.0, 1.0)
    grid.I, grid.J         interior cell counts per direction (20, 20)
    material.rho1/.rho2    densities (1.0, 1.0)
    material.a11/.a12/.a22 elasticity coefficients (1.0, 0.0, 1.0)
    material.coupling      zero-order exchange coefficient (0.0)
    material.alpha         fractional order in (0,1) (0.5)
    material.eta           exponential weight >= 0 (0.0)
    diffusive.modes        quadrature mode count (100)
    diffusive.dxi          quadrature spacing (0.1)
    newmark.beta/.gamma    integrator parameters (0.25, 0.5)
    newmark.dt             time step (0.01)
    time.final             final time (10.0)
    init.u0/.v0/.u1/.v1    initial fields: zero | gaussian(cx, cy, sigma[, amp])
                           | cone(cx, cy, radius) | bump6(cx, cy, radius)
    init.preset            initial-condition preset tag expanding all four
                           fields: gaussian-pair | cone-bump
    damping.enabled        on | off (on)
    energy.variant         quadrature | paper (quadrature)
    observer.cadence       record energy every this many steps (1)
    snapshot.times         comma list of snapshot times (empty)
    snapshot.format        csv | bin (csv)
    output.dir             artifact directory (out)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .grid import GridSpec, build_grid
from .integrator import ENERGY_VARIANTS, NewmarkParams
from .operators import DiffusiveGrid, MaterialParams

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Initial-condition families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialField:
    """Parametric initial field: zero, gaussian, cone, or sixth-degree bump.

    * gaussian: amp * exp(-((x-cx)^2 + (y-cy)^2) / (2 sigma^2)); amp defaults
      to 1/(sigma*sqrt(2)).
    * cone: 1 - r/radius inside the disk of the given radius, 0 outside.
    * bump6: (1 - (r/radius)^2)^3 inside the disk, 0 outside.
    """

    kind: str
    cx: float = 0.0
    cy: float = 0.0
    sigma: float = 0.01
    amplitude: float | None = None
    radius: float = 0.1

    KINDS = ("zero", "gaussian", "cone", "bump6")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown initial-field kind {self.kind!r}; choose from {self.KINDS}")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise ValueError(f"gaussian width must be positive, got {self.sigma}")
        if self.kind in ("cone", "bump6") and not self.radius > 0:
            raise ValueError(f"support radius must be positive, got {self.radius}")

    def evaluate(self, g: GridSpec) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros(g.n_cells)
        x, y = g.meshgrid()
        if self.kind == "gaussian":
            amp = self.amplitude if self.amplitude is not None else 1.0 / (self.sigma * math.sqrt(2.0))
            r2 = (x - self.cx) ** 2 + (y - self.cy) ** 2
            return (amp * np.exp(-r2 / (2.0 * self.sigma**2))).ravel()
        r2 = ((x - self.cx) ** 2 + (y - self.cy) ** 2) / self.radius**2
        if self.kind == "cone":
            return np.where(r2 < 1.0, 1.0 - np.sqrt(r2), 0.0).ravel()
        return np.where(r2 < 1.0, (1.0 - r2) ** 3, 0.0).ravel()


ZERO_FIELD = InitialField("zero")


def parse_initial_field(text: str) -> InitialField:
    text = text.strip()
    if text == "zero":
        return ZERO_FIELD
    if "(" not in text or not text.endswith(")"):
        raise ValueError(f"cannot parse initial field {text!r}")
    kind, _, args_text = text.partition("(")
    kind = kind.strip()
    args = [float(a) for a in args_text[:-1].split(",") if a.strip()]
    if kind == "gaussian":
        if len(args) == 3:
            return InitialField("gaussian", cx=args[0], cy=args[1], sigma=args[2])
        if len(args) == 4:
            return InitialField("gaussian", cx=args[0], cy=args[1], sigma=args[2], amplitude=args[3])
        raise ValueError(f"gaussian takes (cx, cy, sigma[, amplitude]), got {text!r}")
    if kind in ("cone", "bump6"):
        if len(args) != 3:
            raise ValueError(f"{kind} takes (cx, cy, radius), got {text!r}")
        return InitialField(kind, cx=args[0], cy=args[1], radius=args[2])
    raise ValueError(f"unknown initial-field kind {kind!r}")


def format_initial_field(f: InitialField) -> str:
    if f.kind == "zero":
        return "zero"
    if f.kind == "gaussian":
        args = [f.cx, f.cy, f.sigma] + ([] if f.amplitude is None else [f.amplitude])
        return "gaussian(" + ", ".join(repr(a) for a in args) + ")"
    return f"{f.kind}({f.cx!r}, {f.cy!r}, {f.radius!r})"


# Initial-condition preset tags: a pair of off-center narrow gaussians, and a
# cone displacement with a smooth sixth-degree velocity bump.
IC_PRESETS = {
    "gaussian-pair": {
        "u0": InitialField("gaussian", cx=0.5, cy=0.0, sigma=0.01),
        "v0": InitialField("gaussian", cx=0.0, cy=0.5, sigma=0.01),
        "u1": ZERO_FIELD,
        "v1": ZERO_FIELD,
    },
    "cone-bump": {
        "u0": InitialField("cone", cx=0.5, cy=0.5, radius=0.1),
        "v0": ZERO_FIELD,
        "u1": ZERO_FIELD,
        "v1": InitialField("bump6", cx=0.5, cy=0.5, radius=0.1),
    },
}


# ---------------------------------------------------------------------------
# ExperimentConfig
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully explicit description of one simulation or spectrum experiment."""

    lx: float = 1.0
    ly: float = 1.0
    nx: int = 20
    ny: int = 20
    rho1: float = 1.0
    rho2: float = 1.0
    a11: float = 1.0
    a12: float = 0.0
    a22: float = 1.0
    coupling: float = 0.0
    alpha: float = 0.5
    eta: float = 0.0
    n_modes: int = 100
    dxi: float = 0.1
    beta: float = 0.25
    gamma: float = 0.5
    dt: float = 0.01
    t_final: float = 10.0
    u0: InitialField = ZERO_FIELD
    v0: InitialField = ZERO_FIELD
    u1: InitialField = ZERO_FIELD
    v1: InitialField = ZERO_FIELD
    damping: bool = True
    energy_variant: str = "quadrature"
    cadence: int = 1
    snapshot_times: tuple[float, ...] = ()
    snapshot_format: str = "csv"
    out_dir: str = "out"

    def grid(self) -> GridSpec:
        return build_grid(self.lx, self.ly, self.nx, self.ny)

    def material(self) -> MaterialParams:
        return MaterialParams(
            rho1=self.rho1,
            rho2=self.rho2,
            a11=self.a11,
            a12=self.a12,
            a22=self.a22,
            coupling=self.coupling,
            alpha=self.alpha,
            eta=self.eta,
        )

    def diffusive(self) -> DiffusiveGrid:
        return DiffusiveGrid(self.alpha, self.n_modes, self.dxi)

    def newmark(self) -> NewmarkParams:
        return NewmarkParams(dt=self.dt, beta=self.beta, gamma=self.gamma)

    def validate(self) -> "ExperimentConfig":
        """Construct every domain object once so range violations surface here."""
        self.grid()
        self.material()
        self.diffusive()
        self.newmark()
        if self.energy_variant not in ENERGY_VARIANTS:
            raise ValueError(
                f"energy.variant must be one of {ENERGY_VARIANTS}, got {self.energy_variant!r}"
            )
        if self.snapshot_format not in ("csv", "bin"):
            raise ValueError(f"snapshot.format must be csv or bin, got {self.snapshot_format!r}")
        if self.cadence < 1:
            raise ValueError(f"observer.cadence must be >= 1, got {self.cadence}")
        if self.t_final < 0:
            raise ValueError(f"time.final must be >= 0, got {self.t_final}")
        return self


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _parse_times(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


# key in file -> (attribute, parser, formatter)
KEY_TABLE: dict[str, tuple[str, object, object]] = {
    "grid.l1": ("lx", float, repr),
    "grid.l2": ("ly", float, repr),
    "grid.I": ("nx", int, str),
    "grid.J": ("ny", int, str),
    "material.rho1": ("rho1", float, repr),
    "material.rho2": ("rho2", float, repr),
    "material.a11": ("a11", float, repr),
    "material.a12": ("a12", float, repr),
    "material.a22": ("a22", float, repr),
    "material.coupling": ("coupling", float, repr),
    "material.alpha": ("alpha", float, repr),
    "material.eta": ("eta", float, repr),
    "diffusive.modes": ("n_modes", int, str),
    "diffusive.dxi": ("dxi", float, repr),
    "newmark.beta": ("beta", float, repr),
    "newmark.gamma": ("gamma", float, repr),
    "newmark.dt": ("dt", float, repr),
    "time.final": ("t_final", float, repr),
    "init.u0": ("u0", parse_initial_field, format_initial_field),
    "init.v0": ("v0", parse_initial_field, format_initial_field),
    "init.u1": ("u1", parse_initial_field, format_initial_field),
    "init.v1": ("v1", parse_initial_field, format_initial_field),
    "damping.enabled": ("damping", _parse_bool, lambda b: "on" if b else "off"),
    "energy.variant": ("energy_variant", str, str),
    "observer.cadence": ("cadence", int, str),
    "snapshot.times": ("snapshot_times", _parse_times, lambda ts: ", ".join(repr(t) for t in ts)),
    "snapshot.format": ("snapshot_format", str, str),
    "output.dir": ("out_dir", str, str),
}


def parse_config(text: str, strict: bool = True, source: str = "<config>") -> ExperimentConfig:
    """Parse the flat key-value format into a validated ExperimentConfig."""
    values: dict[str, object] = {}
    preset_name: str | None = None
    ic_preset: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "preset":
            preset_name = value
            continue
        if key == "init.preset":
            ic_preset = value
            continue
        if key not in KEY_TABLE:
            if strict:
                raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
            logger.warning("%s:%d: ignoring unknown key %r", source, lineno, key)
            continue
        attr, parser, _ = KEY_TABLE[key]
        try:
            values[attr] = parser(value)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc

    if preset_name is not None:
        cfg = preset(preset_name)
        logger.info("%s: expanded preset %r:\n%s", source, preset_name, emit_config(cfg))
    else:
        cfg = ExperimentConfig()
    if ic_preset is not None:
        if ic_preset not in IC_PRESETS:
            raise ValueError(
                f"{source}: unknown init.preset {ic_preset!r}; choose from {sorted(IC_PRESETS)}"
            )
        logger.info("%s: expanded init.preset %r", source, ic_preset)
        cfg = replace(cfg, **IC_PRESETS[ic_preset])
    if values:
        cfg = replace(cfg, **values)
    return cfg.validate()


def load_config(path, strict: bool = True) -> ExperimentConfig:
    """Load and validate a config file (see module docstring for the schema)."""
    path = Path(path)
    return parse_config(path.read_text(), strict=strict, source=str(path))


def emit_config(cfg: ExperimentConfig) -> str:
    """Serialize a config fully explicitly; load(emit(cfg)) == cfg."""
    lines = []
    for key, (attr, _, formatter) in KEY_TABLE.items():
        lines.append(f"{key} = {formatter(getattr(cfg, attr))}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.write_text(emit_config(cfg))
    return path


# ---------------------------------------------------------------------------
# Experiment presets
# ---------------------------------------------------------------------------


def _example1(reduced: bool) -> ExperimentConfig:
    # Two narrow gaussians interacting under strong cross-diffusion.  The
    # elasticity matrix of this preset is indefinite (a11*a22 < a12^2);
    # loading it triggers the elasticity warning and long runs grow without
    # bound, which is why the reduced variant stops at t = 1.
    base = dict(
        lx=1.0,
        ly=1.0,
        rho1=1.0,
        rho2=1.0,
        a11=0.1,
        a12=-0.5,
        a22=0.1,
        coupling=1.0,
        alpha=0.5,
        eta=0.0,
        beta=0.25,
        gamma=0.5,
        dt=0.01,
        damping=True,
        energy_variant="quadrature",
        snapshot_format="csv",
        **IC_PRESETS["gaussian-pair"],
    )
    if reduced:
        return ExperimentConfig(
            nx=20, ny=20, n_modes=100, dxi=0.1, t_final=1.0, cadence=1,
            snapshot_times=(1.0,), out_dir="out/example1-reduced", **base,
        )
    return ExperimentConfig(
        nx=200, ny=200, n_modes=1000, dxi=0.1, t_final=10.0, cadence=1,
        snapshot_times=(1.0, 3.0, 10.0), out_dir="out/example1", **base,
    )


def _example2(reduced: bool) -> ExperimentConfig:
    # Spectrum-oriented preset: well-posed elasticity, a few modes, positive
    # weight, sized for the generator eigensolve rather than time stepping.
    base = dict(
        lx=1.0,
        ly=1.0,
        rho1=1.0,
        rho2=1.0,
        a11=1.0,
        a12=0.1,
        a22=1.0,
        coupling=1.0,
        alpha=0.5,
        eta=0.1,
        n_modes=3,
        dxi=1.0,
        beta=0.25,
        gamma=0.5,
        dt=0.01,
        t_final=1.0,
        cadence=1,
        damping=True,
        energy_variant="quadrature",
        snapshot_format="csv",
    )
    if reduced:
        return ExperimentConfig(nx=10, ny=10, out_dir="out/example2-reduced", **base)
    return ExperimentConfig(nx=100, ny=100, out_dir="out/example2", **base)


def _example3(reduced: bool) -> ExperimentConfig:
    # Long-horizon decay preset: cone displacement and smooth velocity bump,
    # positive weight, well-posed elasticity, run far past the transient.
    base = dict(
        lx=1.0,
        ly=1.0,
        rho1=1.0,
        rho2=1.0,
        a11=1.0,
        a12=0.1,
        a22=1.0,
        coupling=1.0,
        alpha=0.5,
        eta=1.0,
        beta=0.25,
        gamma=0.5,
        damping=True,
        energy_variant="quadrature",
        snapshot_format="csv",
        **IC_PRESETS["cone-bump"],
    )
    if reduced:
        return ExperimentConfig(
            nx=20, ny=20, n_modes=100, dxi=0.1, dt=0.05, t_final=1000.0, cadence=10,
            snapshot_times=(), out_dir="out/example3-reduced", **base,
        )
    return ExperimentConfig(
        nx=200, ny=200, n_modes=1000, dxi=0.1, dt=0.01, t_final=10000.0, cadence=100,
        snapshot_times=(100.0, 10000.0), out_dir="out/example3", **base,
    )


_PRESETS = {
    "example1": lambda: _example1(False),
    "example1-reduced": lambda: _example1(True),
    "example2": lambda: _example2(False),
    "example2-reduced": lambda: _example2(True),
    "example3": lambda: _example3(False),
    "example3-reduced": lambda: _example3(True),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> ExperimentConfig:
    """Fully explicit config for a named preset (see PRESET_NAMES)."""
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    return factory().validate()
