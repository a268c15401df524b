"""Finite-volume simulation of a two-component wave mixture with fractional damping.

The package covers the full pipeline: cell-centered mesh and 5-point Dirichlet
Laplacian, assembly of the coupled mass/stiffness/damping operators, a
memory-free realization of the weighted fractional time derivative through
relaxation modes, an energy-conserving implicit time stepper, eigenvalue
analysis of the first-order generator, and a config-driven experiment harness
with decay-rate fitting.
"""

from .config import (
    ExperimentConfig,
    InitialField,
    PRESET_NAMES,
    emit_config,
    load_config,
    parse_config,
    preset,
    save_config,
)
from .errors import CapacityError, NumericalBreakdownError
from .experiment import (
    DecayFit,
    RunBundle,
    emit_plotdata,
    fit_decay,
    run_experiment,
    run_spectrum_experiment,
)
from .fracdiff import (
    ScalarDiffusiveState,
    caputo_exponential_analytic,
    diffusive_derivative_series,
    diffusive_output,
    step_scalar_modes,
)
from .grid import GridSpec, apply_laplacian, build_grid, laplacian_matrix
from .integrator import (
    EnergyRecord,
    NewmarkParams,
    SimState,
    energy,
    initialize,
    run,
    step,
)
from .kernels import active_backend
from .operators import (
    DiffusiveGrid,
    MaterialParams,
    OperatorSet,
    assemble_generator,
    assemble_mass,
    assemble_stiffness,
    build_diffusive_grid,
    build_operator_set,
    damping_coefficient,
    mass_diagonal,
)
from .spectrum import (
    KrylovEigenvalues,
    SpectrumReport,
    TrendRow,
    dominant_eigenvalues,
    full_spectrum,
    stability_trend,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DecayFit",
    "DiffusiveGrid",
    "EnergyRecord",
    "ExperimentConfig",
    "GridSpec",
    "InitialField",
    "KrylovEigenvalues",
    "MaterialParams",
    "NewmarkParams",
    "NumericalBreakdownError",
    "OperatorSet",
    "PRESET_NAMES",
    "RunBundle",
    "ScalarDiffusiveState",
    "SimState",
    "SpectrumReport",
    "TrendRow",
    "active_backend",
    "apply_laplacian",
    "assemble_generator",
    "assemble_mass",
    "assemble_stiffness",
    "build_diffusive_grid",
    "build_grid",
    "build_operator_set",
    "caputo_exponential_analytic",
    "damping_coefficient",
    "diffusive_derivative_series",
    "diffusive_output",
    "dominant_eigenvalues",
    "emit_config",
    "emit_plotdata",
    "energy",
    "fit_decay",
    "full_spectrum",
    "initialize",
    "laplacian_matrix",
    "load_config",
    "mass_diagonal",
    "parse_config",
    "preset",
    "run",
    "run_experiment",
    "run_spectrum_experiment",
    "save_config",
    "stability_trend",
    "step",
    "step_scalar_modes",
    "__version__",
]
