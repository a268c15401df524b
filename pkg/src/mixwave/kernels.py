"""Hot inner-loop kernels: numba-jitted with a pure-numpy fallback.

The two families of kernels that dominate run time are the 5-point stencil
application and the per-mode relaxation update / weighted reduction over the
stack of diffusive-mode fields.  Each kernel exists in two implementations
with identical accumulation order (so results agree to the last few ulps):

* ``*_numba`` -- explicit loops compiled with ``@njit(cache=True)``,
* ``*_numpy`` -- vectorized numpy.

Backend selection happens once at import time via the ``MIXWAVE_NUMBA``
environment variable:

* unset / anything else: use numba when importable, else numpy;
* ``0`` / ``false`` / ``off``: force the numpy fallback;
* ``1`` / ``true`` / ``on``: require numba (ImportError if missing).

All kernels are sequential by design: summation order is fixed per output
entry, so results are deterministic and independent of thread counts.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    _NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(f):
            return f

        return wrap if not (args and callable(args[0])) else args[0]


def _select_backend() -> str:
    flag = os.environ.get("MIXWAVE_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off"):
        return "numpy"
    if flag in ("1", "true", "on"):
        if not _NUMBA_AVAILABLE:
            raise ImportError("MIXWAVE_NUMBA=1 requested but numba is not importable")
        return "numba"
    return "numba" if _NUMBA_AVAILABLE else "numpy"


_BACKEND = _select_backend()


def active_backend() -> str:
    """Return the kernel backend chosen at import time ('numba' or 'numpy')."""
    return _BACKEND


# ---------------------------------------------------------------------------
# 5-point Dirichlet Laplacian, cell-centered, zero ghost values.
# Accumulation order per cell is ascending column index (south, west, center,
# east, north) to match a CSR matrix-vector product of the assembled stencil.
# ---------------------------------------------------------------------------


def laplacian_numpy(u, nx, ny, inv_dx2, inv_dy2, out):
    g = u.reshape(ny, nx)
    o = out.reshape(ny, nx)
    o[:] = 0.0
    o[1:, :] += inv_dy2 * g[:-1, :]
    o[:, 1:] += inv_dx2 * g[:, :-1]
    o += (-2.0 * (inv_dx2 + inv_dy2)) * g
    o[:, :-1] += inv_dx2 * g[:, 1:]
    o[:-1, :] += inv_dy2 * g[1:, :]
    return out


@njit(cache=True)
def laplacian_numba(u, nx, ny, inv_dx2, inv_dy2, out):  # pragma: no cover - jitted
    diag = -2.0 * (inv_dx2 + inv_dy2)
    for j in range(ny):
        base = j * nx
        for i in range(nx):
            k = base + i
            acc = 0.0
            if j > 0:
                acc += inv_dy2 * u[k - nx]
            if i > 0:
                acc += inv_dx2 * u[k - 1]
            acc += diag * u[k]
            if i < nx - 1:
                acc += inv_dx2 * u[k + 1]
            if j < ny - 1:
                acc += inv_dy2 * u[k + nx]
            out[k] = acc
    return out


# ---------------------------------------------------------------------------
# Diffusive-mode kernels.  ``modes`` has shape (n_modes, n_dof): one relaxation
# field per quadrature node, stacked over the full displacement layout.
# ---------------------------------------------------------------------------


def mode_update_numpy(modes, decay, gain, drive):
    """In-place Crank-Nicolson update: modes[l] = decay[l]*modes[l] + gain[l]*drive."""
    modes *= decay[:, None]
    modes += gain[:, None] * drive[None, :]
    return modes


@njit(cache=True)
def mode_update_numba(modes, decay, gain, drive):  # pragma: no cover - jitted
    n_modes, n_dof = modes.shape
    for l in range(n_modes):
        d = decay[l]
        g = gain[l]
        for j in range(n_dof):
            modes[l, j] = d * modes[l, j] + g * drive[j]
    return modes


def mode_weighted_sum_numpy(modes, weights, out):
    """out = sum_l weights[l] * modes[l], accumulated in mode order."""
    np.dot(weights, modes, out=out)
    return out


@njit(cache=True)
def mode_weighted_sum_numba(modes, weights, out):  # pragma: no cover - jitted
    n_modes, n_dof = modes.shape
    for j in range(n_dof):
        out[j] = 0.0
    for l in range(n_modes):
        w = weights[l]
        for j in range(n_dof):
            out[j] += w * modes[l, j]
    return out


def mode_squared_sum_numpy(modes):
    """sum_l |modes[l]|^2 over the whole stack."""
    return float(np.sum(modes * modes))


@njit(cache=True)
def mode_squared_sum_numba(modes):  # pragma: no cover - jitted
    n_modes, n_dof = modes.shape
    acc = 0.0
    for l in range(n_modes):
        for j in range(n_dof):
            acc += modes[l, j] * modes[l, j]
    return acc


_IMPLS = {
    "numpy": {
        "laplacian": laplacian_numpy,
        "mode_update": mode_update_numpy,
        "mode_weighted_sum": mode_weighted_sum_numpy,
        "mode_squared_sum": mode_squared_sum_numpy,
    },
    "numba": {
        "laplacian": laplacian_numba,
        "mode_update": mode_update_numba,
        "mode_weighted_sum": mode_weighted_sum_numba,
        "mode_squared_sum": mode_squared_sum_numba,
    },
}

if not _NUMBA_AVAILABLE:
    _IMPLS.pop("numba")

laplacian = _IMPLS[_BACKEND]["laplacian"]
mode_update = _IMPLS[_BACKEND]["mode_update"]
mode_weighted_sum = _IMPLS[_BACKEND]["mode_weighted_sum"]
mode_squared_sum = _IMPLS[_BACKEND]["mode_squared_sum"]


def implementations() -> dict:
    """Both kernel suites keyed by backend name (for tests and benchmarks)."""
    return {name: dict(suite) for name, suite in _IMPLS.items()}
