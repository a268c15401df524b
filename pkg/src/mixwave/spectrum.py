"""Eigenvalue analysis of the assembled generator: stability and trends."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, NumericalBreakdownError
from .grid import GridSpec
from .operators import DiffusiveGrid, MaterialParams, assemble_generator, build_diffusive_grid

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class SpectrumReport:
    """Full eigenvalue set of a real matrix with stability classification.

    ``dominant`` holds the eigenvalue(s) of largest modulus (typically a
    conjugate pair); ``n_imaginary_axis`` counts eigenvalues with
    |Re| <= tolerance.  The tolerance scales with the matrix norm because
    eigensolver noise does.
    """

    eigenvalues: np.ndarray
    max_real_part: float
    dominant: np.ndarray
    n_imaginary_axis: int
    size: int
    tolerance: float

    def classification(self) -> str:
        """'stable' / 'marginal' / 'unstable' by the sign of max Re within tolerance.

        A maximum real part inside [-tolerance, tolerance] counts as marginal,
        never unstable: generators with eta = 0 legitimately carry a (near-)
        zero eigenvalue.
        """
        if self.max_real_part > self.tolerance:
            return "unstable"
        if self.max_real_part < -self.tolerance:
            return "stable"
        return "marginal"


def _as_dense(a) -> np.ndarray:
    if sp.issparse(a):
        return a.toarray()
    return np.asarray(a, dtype=float)


def full_spectrum(a, dense_limit: int = DENSE_LIMIT, tolerance: float | None = None) -> SpectrumReport:
    """All eigenvalues via a dense general eigensolver.

    Refuses matrices above ``dense_limit`` rows (use dominant_eigenvalues for
    those).  Default classification tolerance is 1e-10 * ||A||_inf.
    """
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if n > dense_limit:
        raise CapacityError(
            f"matrix of size {n} exceeds the dense eigensolver limit {dense_limit}; "
            "use dominant_eigenvalues on the sparse generator instead"
        )
    dense = _as_dense(a)
    if tolerance is None:
        norm_inf = float(np.abs(dense).sum(axis=1).max()) if n else 0.0
        tolerance = 1e-10 * norm_inf
    try:
        eigenvalues = la.eigvals(dense)
    except la.LinAlgError as exc:
        raise NumericalBreakdownError(f"dense eigensolver failed to converge: {exc}") from exc
    moduli = np.abs(eigenvalues)
    max_mod = moduli.max() if n else 0.0
    dominant = eigenvalues[moduli >= max_mod * (1.0 - 1e-9)] if n else eigenvalues
    return SpectrumReport(
        eigenvalues=eigenvalues,
        max_real_part=float(eigenvalues.real.max()) if n else 0.0,
        dominant=dominant,
        n_imaginary_axis=int(np.count_nonzero(np.abs(eigenvalues.real) <= tolerance)),
        size=n,
        tolerance=float(tolerance),
    )


@dataclass(frozen=True)
class KrylovEigenvalues:
    """Largest-modulus eigenvalues from the restarted Arnoldi iteration.

    ``residuals[i]`` is ||A v_i - lambda_i v_i|| for the unit Ritz vector v_i.
    ``converged`` is False when the iteration hit max_iter first; the values
    present are then the converged subset.
    """

    values: np.ndarray
    residuals: np.ndarray
    converged: bool


def dominant_eigenvalues(
    a,
    k: int = 3,
    max_iter: int | None = None,
    tol: float = 1e-10,
    seed: int = 0,
) -> KrylovEigenvalues:
    """k largest-modulus eigenvalues of a real (sparse) matrix via ARPACK.

    The iteration runs on the real matrix in real arithmetic; complex pairs
    come out of the 2x2 Schur blocks.  The start vector is seeded, so results
    are reproducible.  Non-convergence returns the partial set flagged
    ``converged=False`` instead of raising.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if k > n - 2:
        # ARPACK needs k < n - 1 for general real matrices; fall back to dense.
        report = full_spectrum(a)
        order = np.argsort(-np.abs(report.eigenvalues))[:k]
        values = report.eigenvalues[order]
        return KrylovEigenvalues(values=values, residuals=np.zeros(values.shape[0]), converged=True)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(n)
    mat = a if sp.issparse(a) else sp.csr_matrix(a)
    try:
        values, vectors = spla.eigs(mat, k=k, which="LM", v0=v0, maxiter=max_iter, tol=tol)
        converged = True
    except spla.ArpackNoConvergence as exc:
        values, vectors = exc.eigenvalues, exc.eigenvectors
        converged = False
    except spla.ArpackError as exc:
        raise NumericalBreakdownError(f"Arnoldi iteration failed: {exc}") from exc
    residuals = np.empty(values.shape[0])
    for i, lam in enumerate(values):
        v = vectors[:, i]
        residuals[i] = np.linalg.norm(mat @ v - lam * v) / np.linalg.norm(v)
    order = np.argsort(-np.abs(values))
    return KrylovEigenvalues(values=values[order], residuals=residuals[order], converged=converged)


@dataclass(frozen=True)
class TrendRow:
    """Dominant eigenvalue of the generator for one mode count."""

    n_modes: int
    re_dominant: float
    im_dominant: float
    failed: bool = False
    message: str = ""


def stability_trend(
    p: MaterialParams,
    g: GridSpec,
    base: DiffusiveGrid,
    m_list: list[int],
    dense_limit: int = DENSE_LIMIT,
    require_monotone: bool = False,
) -> list[TrendRow]:
    """Dominant eigenvalue versus mode count at fixed grid and spacing.

    For each entry of ``m_list`` the generator is rebuilt with that many modes
    at the spacing of ``base`` and its largest-modulus eigenvalue extracted
    (dense when the size permits, Arnoldi otherwise).  Solver failures mark
    the row failed rather than aborting the sweep.  With ``require_monotone``
    the real parts over successful rows must be strictly decreasing in the
    mode count (more modes, more damping); violations raise ValueError.
    """
    rows: list[TrendRow] = []
    for m in m_list:
        try:
            sub = build_diffusive_grid(base.alpha, m, base.dxi)
            size = (m + 2) * 2 * g.n_cells
            if size <= dense_limit:
                report = full_spectrum(assemble_generator(p, g, sub, dense_limit=dense_limit))
                dom = report.dominant[np.argmax(report.dominant.imag)]
            else:
                res = dominant_eigenvalues(assemble_generator(p, g, sub, sparse=True), k=2)
                dom = res.values[np.argmax(res.values.imag)]
            rows.append(TrendRow(n_modes=m, re_dominant=float(dom.real), im_dominant=float(dom.imag)))
        except (CapacityError, NumericalBreakdownError, ValueError) as exc:
            rows.append(TrendRow(n_modes=m, re_dominant=np.nan, im_dominant=np.nan, failed=True, message=str(exc)))
    if require_monotone:
        good = [r.re_dominant for r in rows if not r.failed]
        if any(b >= a for a, b in zip(good, good[1:])):
            raise ValueError(
                "dominant real parts are not strictly decreasing in the mode count: "
                + ", ".join(f"{r.n_modes}: {r.re_dominant:.6e}" for r in rows)
            )
    return rows
