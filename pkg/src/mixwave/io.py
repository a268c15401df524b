"""CSV and binary emitters for energy series, field snapshots, and spectra.

All CSV files use '.' as decimal separator, '\\n' newlines, a mandatory header
row, and full double precision (17 significant digits), so repeated runs of a
deterministic computation produce bitwise-identical files.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .integrator import EnergyRecord

SNAPSHOT_MAGIC = b"MXW1"
_HEADER = struct.Struct("<4sQQI")  # magic, nx, ny, component count


def format_float(x: float) -> str:
    return f"{x:.17g}"


def write_energy_csv(path, records: Iterable[EnergyRecord]) -> Path:
    path = Path(path)
    lines = ["t,kinetic,elastic,diffusive,total"]
    for r in records:
        lines.append(
            ",".join(format_float(v) for v in (r.time, r.kinetic, r.elastic, r.diffusive, r.total))
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def read_energy_csv(path) -> list[EnergyRecord]:
    path = Path(path)
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    if header != ["t", "kinetic", "elastic", "diffusive", "total"]:
        raise ValueError(f"{path}: unexpected energy CSV header {lines[0]!r}")
    records = []
    for line in lines[1:]:
        t, kin, ela, dif, tot = (float(v) for v in line.split(","))
        records.append(EnergyRecord(t, kin, ela, dif, tot, variant="file"))
    return records


def write_field_csv(path, field: np.ndarray, nx: int, ny: int) -> Path:
    """One scalar field as a CSV grid: ny rows of nx columns (x-fastest)."""
    path = Path(path)
    grid = np.asarray(field).reshape(ny, nx)
    lines = [",".join(f"x{i}" for i in range(1, nx + 1))]
    for row in grid:
        lines.append(",".join(format_float(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_fields_bin(path, u: np.ndarray, v: np.ndarray, nx: int, ny: int) -> Path:
    """Both components as little-endian float64 after a 24-byte header.

    Header: magic 'MXW1', nx (u64), ny (u64), component count (u32) = 2.
    Payload: u then v, each ny*nx values in the flat x-fastest layout.
    """
    path = Path(path)
    u = np.ascontiguousarray(np.asarray(u, dtype="<f8").reshape(ny * nx))
    v = np.ascontiguousarray(np.asarray(v, dtype="<f8").reshape(ny * nx))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, nx, ny, 2))
        fh.write(u.tobytes())
        fh.write(v.tobytes())
    return path


def read_fields_bin(path) -> tuple[np.ndarray, np.ndarray, int, int]:
    path = Path(path)
    raw = path.read_bytes()
    magic, nx, ny, ncomp = _HEADER.unpack_from(raw, 0)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}, expected {SNAPSHOT_MAGIC!r}")
    if ncomp != 2:
        raise ValueError(f"{path}: expected 2 components, found {ncomp}")
    n = nx * ny
    data = np.frombuffer(raw, dtype="<f8", count=2 * n, offset=_HEADER.size)
    return data[:n].copy(), data[n:].copy(), int(nx), int(ny)


def write_spectrum_csv(path, eigenvalues: np.ndarray, residuals: Sequence[float] | None = None) -> Path:
    """Eigenvalues as 're,im,residual' rows; residual column empty for dense results."""
    path = Path(path)
    lines = ["re,im,residual"]
    for i, lam in enumerate(eigenvalues):
        res = format_float(residuals[i]) if residuals is not None else ""
        lines.append(f"{format_float(lam.real)},{format_float(lam.imag)},{res}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_trend_csv(path, rows) -> Path:
    """Stability-trend rows as 'M,re_dominant,im_dominant'."""
    path = Path(path)
    lines = ["M,re_dominant,im_dominant"]
    for r in rows:
        lines.append(f"{r.n_modes},{format_float(r.re_dominant)},{format_float(r.im_dominant)}")
    path.write_text("\n".join(lines) + "\n")
    return path
