"""Uniform cell-centered rectangular mesh and its 5-point Dirichlet Laplacian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import CapacityError

# scipy sparse indices are 32-bit by default; stay safely below that.
MAX_CELLS = 2**31 - 1


@dataclass(frozen=True)
class GridSpec:
    """Rectangle (0, lx) x (0, ly) split into nx-by-ny uniform control volumes.

    Unknowns live at cell centers x_i = (i - 1/2) dx, y_j = (j - 1/2) dy,
    i = 1..nx, j = 1..ny; homogeneous Dirichlet boundary values enter the
    stencil as zero ghost cells.  Scalar fields are stored flat and x-fastest:
    cell (i, j) maps to index k = (j - 1) * nx + (i - 1).
    """

    lx: float
    ly: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError(f"side lengths must be positive, got ({self.lx}, {self.ly})")
        if not (self.nx >= 1 and self.ny >= 1):
            raise ValueError(f"cell counts must be >= 1, got ({self.nx}, {self.ny})")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """1-D coordinate arrays of cell centers along x and y."""
        x = (np.arange(1, self.nx + 1) - 0.5) * self.dx
        y = (np.arange(1, self.ny + 1) - 0.5) * self.dy
        return x, y

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """(ny, nx) coordinate matrices matching the flat x-fastest layout."""
        x, y = self.cell_centers()
        return np.meshgrid(x, y)


def build_grid(lx: float, ly: float, nx: int, ny: int) -> GridSpec:
    """Construct a validated GridSpec (raises ValueError on bad inputs)."""
    return GridSpec(float(lx), float(ly), int(nx), int(ny))


def apply_laplacian(g: GridSpec, u: np.ndarray) -> np.ndarray:
    """Matrix-free 5-point Laplacian with zero Dirichlet ghost values.

    Returns (u_E - 2u + u_W)/dx^2 + (u_N - 2u + u_S)/dy^2 per cell; neighbors
    outside the rectangle contribute 0.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (g.n_cells,):
        raise ValueError(f"field has shape {u.shape}, expected ({g.n_cells},)")
    out = np.empty_like(u)
    inv_dx2 = 1.0 / (g.dx * g.dx)
    inv_dy2 = 1.0 / (g.dy * g.dy)
    return kernels.laplacian(np.ascontiguousarray(u), g.nx, g.ny, inv_dx2, inv_dy2, out)


def laplacian_matrix(g: GridSpec) -> sp.csr_matrix:
    """Assemble the stencil of apply_laplacian as a sparse CSR matrix.

    The matrix is exactly symmetric and negative semidefinite, with at most
    five nonzeros per row; its matvec reproduces apply_laplacian.
    """
    if g.n_cells > MAX_CELLS:
        raise CapacityError(f"{g.nx} x {g.ny} cells exceed the ptr index range")
    nx, ny, n = g.nx, g.ny, g.n_cells
    inv_dx2 = 1.0 / (g.dx * g.dx)
    inv_dy2 = 1.0 / (g.dy * g.dy)
    diag = -2.0 * (inv_dx2 + inv_dy2)

    k = np.arange(n)
    i = k % nx
    j = k // nx
    rows = [k]
    cols = [k]
    vals = [np.full(n, diag)]
    west = k[i > 0]
    east = k[i < nx - 1]
    south = k[j > 0]
    north = k[j < ny - 1]
    rows += [west, east, south, north]
    cols += [west - 1, east + 1, south - nx, north + nx]
    vals += [
        np.full(west.size, inv_dx2),
        np.full(east.size, inv_dx2),
        np.full(south.size, inv_dy2),
        np.full(north.size, inv_dy2),
    ]
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    mat.sort_indices()
    return mat
