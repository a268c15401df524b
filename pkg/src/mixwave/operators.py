"""Assembly of the semi-discrete operators: mass, stiffness, damping, generator.

The second-order-in-time system solved by the integrator is

    M d2U/dt2 + K U + F(t) = 0,        U = [u; v] stacked x-fastest fields,

where F is the memory-free damping force carried by a stack of first-order
relaxation modes on a truncated quadrature grid in the auxiliary variable xi.
This module also assembles the first-order block generator over the state
(U, dU/dt, modes) whose spectrum witnesses stability.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, NumericalBreakdownError
from .grid import GridSpec, laplacian_matrix


@dataclass(frozen=True)
class MaterialParams:
    """Densities, elasticity coefficients, coupling, and damping parameters.

    ``coupling`` multiplies the zero-order exchange term +/- coupling*(u - v);
    ``alpha`` in (0, 1) is the order of the fractional-derivative damping and
    ``eta`` >= 0 its exponential weight.  The elasticity matrix
    [[a11, a12], [a12, a22]] should be positive definite; construction still
    succeeds when it is not (``elasticity_ok`` False) but a warning is issued,
    because an indefinite elasticity makes the wave system itself unstable.
    """

    rho1: float
    rho2: float
    a11: float
    a12: float
    a22: float
    coupling: float = 0.0
    alpha: float = 0.5
    eta: float = 0.0

    def __post_init__(self):
        if not (self.rho1 > 0 and self.rho2 > 0):
            raise ValueError("densities must be positive")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"fractional order must lie in (0, 1), got {self.alpha}")
        if self.eta < 0:
            raise ValueError(f"exponential weight must be >= 0, got {self.eta}")
        if self.coupling < 0:
            raise ValueError(f"coupling coefficient must be >= 0, got {self.coupling}")
        if not self.elasticity_ok:
            warnings.warn(
                f"elasticity matrix [[{self.a11}, {self.a12}], [{self.a12}, {self.a22}]] "
                "is not positive definite: elastic energy may be negative and the "
                "undamped system admits exponentially growing solutions",
                stacklevel=2,
            )

    @property
    def elasticity_ok(self) -> bool:
        return self.a11 > 0 and self.a11 * self.a22 - self.a12**2 > 0


@dataclass(frozen=True)
class DiffusiveGrid:
    """Truncated quadrature grid for the diffusive damping representation.

    Nodes xi_l = l * dxi for l = 1..n_modes with kernel weights
    mu_l = xi_l^((2*alpha - 1)/2).  ``prefactor`` is sin(alpha*pi)/pi, the
    constant multiplying the mode integral; the symmetric negative-xi half of
    the integral is folded in as a factor 2 wherever the quadrature is used,
    so only positive nodes are materialized.  n_modes = 0 is a valid empty
    grid (damping disabled).
    """

    alpha: float
    n_modes: int
    dxi: float
    xi: np.ndarray = field(init=False, repr=False, compare=False)
    mu: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"fractional order must lie in (0, 1), got {self.alpha}")
        if self.n_modes < 0:
            raise ValueError(f"mode count must be >= 0, got {self.n_modes}")
        if not self.dxi > 0:
            raise ValueError(f"mode spacing must be positive, got {self.dxi}")
        xi = self.dxi * np.arange(1, self.n_modes + 1, dtype=np.float64)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "mu", xi ** ((2.0 * self.alpha - 1.0) / 2.0))

    @property
    def prefactor(self) -> float:
        return float(np.sin(self.alpha * np.pi) / np.pi)


def build_diffusive_grid(alpha: float, n_modes: int, dxi: float) -> DiffusiveGrid:
    """Construct a non-empty diffusive quadrature grid."""
    if n_modes < 1:
        raise ValueError(f"mode count must be >= 1, got {n_modes}")
    return DiffusiveGrid(float(alpha), int(n_modes), float(dxi))


def mass_diagonal(p: MaterialParams, g: GridSpec) -> np.ndarray:
    """Diagonal of the 2*n_cells mass matrix: rho1 on the u block, rho2 on v."""
    n = g.n_cells
    out = np.empty(2 * n)
    out[:n] = p.rho1
    out[n:] = p.rho2
    return out


def assemble_mass(p: MaterialParams, g: GridSpec) -> sp.dia_matrix:
    """Block-diagonal mass matrix diag(rho1 I, rho2 I)."""
    return sp.diags(mass_diagonal(p, g))


def assemble_stiffness(p: MaterialParams, g: GridSpec) -> sp.csr_matrix:
    """Stiffness including elastic blocks and the zero-order coupling.

        K = [[-a11 D2, -a12 D2], [-a12 D2, -a22 D2]]
            + coupling * [[I, -I], [-I, I]]

    with D2 the Dirichlet 5-point Laplacian.  Exactly symmetric; positive
    semidefinite whenever the elasticity matrix is.
    """
    d2 = laplacian_matrix(g)
    eye = sp.identity(g.n_cells, format="csr")
    ac = p.coupling
    k = sp.bmat(
        [
            [-p.a11 * d2 + ac * eye, -p.a12 * d2 - ac * eye],
            [-p.a12 * d2 - ac * eye, -p.a22 * d2 + ac * eye],
        ],
        format="csr",
    )
    k.sort_indices()
    return k


def damping_coefficient(d: DiffusiveGrid, dt: float, eta: float) -> float:
    """Scalar coefficient of the folded damping matrix (a multiple of I).

    Folding the Crank-Nicolson mode update into the momentum equation turns
    the implicit part of the damping force into c_augm * I with

        c_augm = dt * prefactor * sum_l 2 mu_l^2 dxi / (2 + dt (xi_l^2 + eta)).

    Empty grids give 0 (damping disabled).
    """
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if d.n_modes == 0:
        return 0.0
    denom = 2.0 + dt * (d.xi**2 + eta)
    return float(dt * d.prefactor * np.sum(2.0 * d.mu**2 * d.dxi / denom))


@dataclass
class OperatorSet:
    """Assembled operators plus the factorized implicit system matrix.

    ``system_matrix`` is M + gamma*dt*c_augm*I + beta*dt^2*K, factorized once
    at construction; ``solve`` applies the cached factorization.  The set is
    immutable after construction apart from the instrumentation counters
    ``n_factorizations`` / ``n_solves`` and safe to share across threads for
    concurrent matrix-vector products.
    """

    mass: sp.dia_matrix
    mass_diag: np.ndarray
    stiffness: sp.csr_matrix
    c_augm: float
    system_matrix: sp.csc_matrix
    beta: float
    gamma: float
    dt: float
    eta: float
    n_modes: int
    damping: bool
    n_factorizations: int = 0
    n_solves: int = 0
    _lu: spla.SuperLU | None = None

    @property
    def n_dof(self) -> int:
        return self.stiffness.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        self.n_solves += 1
        return self._lu.solve(rhs)


def build_operator_set(
    p: MaterialParams,
    g: GridSpec,
    d: DiffusiveGrid,
    dt: float,
    beta: float = 0.25,
    gamma: float = 0.5,
    damping: bool = True,
) -> OperatorSet:
    """Assemble mass/stiffness/damping and factorize the implicit matrix.

    With ``damping`` False the mode machinery is dropped entirely (c_augm = 0,
    zero modes), which reproduces the undamped wave system.
    """
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    mdiag = mass_diagonal(p, g)
    kmat = assemble_stiffness(p, g)
    n_modes = d.n_modes if damping else 0
    c_augm = damping_coefficient(d, dt, p.eta) if damping else 0.0
    n2 = kmat.shape[0]
    system = sp.diags(mdiag) + (gamma * dt * c_augm) * sp.identity(n2) + (beta * dt * dt) * kmat
    system = system.tocsc()
    try:
        lu = spla.splu(system)
    except RuntimeError as exc:
        raise NumericalBreakdownError(f"implicit system matrix factorization failed: {exc}") from exc
    ops = OperatorSet(
        mass=assemble_mass(p, g),
        mass_diag=mdiag,
        stiffness=kmat,
        c_augm=c_augm,
        system_matrix=system,
        beta=beta,
        gamma=gamma,
        dt=dt,
        eta=p.eta,
        n_modes=n_modes,
        damping=damping and n_modes > 0,
        _lu=lu,
    )
    ops.n_factorizations = 1
    return ops


def assemble_generator(
    p: MaterialParams,
    g: GridSpec,
    d: DiffusiveGrid,
    sparse: bool = False,
    dense_limit: int = 4096,
):
    """First-order block generator over the state (U, dU/dt, modes).

    Block layout (each block 2*n_cells square, n_modes + 2 block rows):

        row 0:     [O, I, O, ..., O]
        row 1:     [-Minv K, O, -c dxi mu_1 Minv, ..., -c dxi mu_M Minv]
        row 1 + l: [O, mu_l I, ..., -(xi_l^2 + eta) I at slot l, ...]

    Rows 0-1 are normalized by the inverse mass so the generator is correct
    for any densities.  n_modes = 0 yields the plain undamped wave generator
    [[O, I], [-Minv K, O]].  Dense output (the default) is refused above
    ``dense_limit`` rows; pass ``sparse=True`` for large problems and feed the
    result to the Krylov eigensolver.
    """
    n2 = 2 * g.n_cells
    size = (d.n_modes + 2) * n2
    if not sparse and size > dense_limit:
        raise CapacityError(
            f"generator of size {size} exceeds the dense limit {dense_limit}; "
            "request sparse=True and use spectrum.dominant_eigenvalues"
        )
    minv = 1.0 / mass_diagonal(p, g)
    minv_mat = sp.diags(minv)
    kmat = assemble_stiffness(p, g)
    eye = sp.identity(n2, format="csr")
    zero = None
    c_dxi = d.prefactor * d.dxi

    rows: list[list] = []
    rows.append([zero, eye] + [zero] * d.n_modes)
    row1: list = [(-minv_mat) @ kmat, zero]
    row1 += [(-c_dxi * d.mu[l]) * minv_mat for l in range(d.n_modes)]
    rows.append(row1)
    for l in range(d.n_modes):
        row = [zero] * (d.n_modes + 2)
        row[1] = d.mu[l] * eye
        row[2 + l] = (-(d.xi[l] ** 2 + p.eta)) * eye
        rows.append(row)
    mat = sp.bmat(rows, format="csr")
    return mat if sparse else mat.toarray()
