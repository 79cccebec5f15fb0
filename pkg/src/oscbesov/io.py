"""Flat-file serialization: column CSV and the HBSV1 binary container.

CSV: coefficients as (n1[, n2], real, imag) rows; grid samples as
(i1[, i2], x1[, x2], real, imag) rows.  Floats are written with 17
significant digits so round trips are bit-faithful.

Binary container: magic "HBSV1", little-endian header
(kind u8, d u8, reserved u16, N u32, L f64, h f64, ndim u8, dims u64...),
then the payload as float64 pairs (re, im) for complex data or plain
float64 for kernels.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .calculus import KernelMatrix
from .hermite import Grid, GridFunction, HermiteBasis, SpectralCoefficients

__all__ = [
    "save_coeffs_csv", "load_coeffs_csv",
    "save_grid_csv", "load_grid_csv",
    "write_container", "read_container",
]

MAGIC = b"HBSV1"
_KIND_COEFFS = 1
_KIND_GRID = 2
_KIND_KERNEL = 3
_HEADER = struct.Struct("<5sBBHIddB")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------------------
# CSV


def save_coeffs_csv(path, c: SpectralCoefficients) -> None:
    d = c.basis.d
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"n{i+1}" for i in range(d)] + ["real", "imag"])
        for idx in np.ndindex(*c.basis.shape):
            v = c.coeffs[idx]
            w.writerow([*idx, _fmt(v.real), _fmt(v.imag)])


def load_coeffs_csv(path) -> SpectralCoefficients:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    d = sum(1 for name in header if name.startswith("n"))
    if d not in (1, 2):
        raise ValueError(f"bad coefficient CSV header: {header}")
    idxs = np.array([[int(r[k]) for k in range(d)] for r in rows[1:]], dtype=int)
    vals = np.array([complex(float(r[d]), float(r[d + 1])) for r in rows[1:]])
    N = int(idxs.max())
    basis = HermiteBasis(d, N)
    coeffs = np.zeros(basis.shape, dtype=complex)
    for row_idx, v in zip(idxs, vals):
        coeffs[tuple(row_idx)] = v
    return SpectralCoefficients(basis, coeffs)


def save_grid_csv(path, gf: GridFunction) -> None:
    d = gf.grid.d
    axis = gf.grid.axis
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"i{k+1}" for k in range(d)]
                   + [f"x{k+1}" for k in range(d)] + ["real", "imag"])
        for idx in np.ndindex(*gf.grid.shape):
            v = gf.values[idx]
            xs = [axis[i] for i in idx]
            w.writerow([*idx, *[_fmt(x) for x in xs], _fmt(v.real), _fmt(v.imag)])


def load_grid_csv(path) -> GridFunction:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    d = sum(1 for name in header if name.startswith("i"))
    if d not in (1, 2):
        raise ValueError(f"bad grid CSV header: {header}")
    body = rows[1:]
    idxs = np.array([[int(r[k]) for k in range(d)] for r in body], dtype=int)
    xs = np.array([float(r[d]) for r in body])
    vals = np.array([complex(float(r[2 * d]), float(r[2 * d + 1])) for r in body])
    n_axis = int(idxs[:, 0].max()) + 1
    axis_vals = np.full(n_axis, np.nan)
    axis_vals[idxs[:, 0]] = xs
    spacing = float(axis_vals[1] - axis_vals[0])
    half = float(-axis_vals[0])
    grid = Grid(d, half, spacing)
    values = np.zeros(grid.shape, dtype=complex)
    for row_idx, v in zip(idxs, vals):
        values[tuple(row_idx)] = v
    return GridFunction(grid, values)


# ---------------------------------------------------------------------------
# binary container


def _write_header(fh, kind: int, d: int, N: int, L: float, h: float, shape) -> None:
    fh.write(_HEADER.pack(MAGIC, kind, d, 0, N, L, h, len(shape)))
    for dim in shape:
        fh.write(struct.pack("<Q", dim))


def write_container(path, obj) -> None:
    """Serialize coefficients, grid samples, or a kernel matrix."""
    with open(path, "wb") as fh:
        if isinstance(obj, SpectralCoefficients):
            _write_header(fh, _KIND_COEFFS, obj.basis.d, obj.basis.max_degree,
                          0.0, 0.0, obj.coeffs.shape)
            data = np.stack([obj.coeffs.real, obj.coeffs.imag], axis=-1)
            fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())
        elif isinstance(obj, GridFunction):
            _write_header(fh, _KIND_GRID, obj.grid.d, 0,
                          obj.grid.half_width, obj.grid.spacing, obj.values.shape)
            data = np.stack([obj.values.real, obj.values.imag], axis=-1)
            fh.write(np.ascontiguousarray(data, dtype="<f8").tobytes())
        elif isinstance(obj, KernelMatrix):
            half = float(-obj.axis[0])
            spacing = float(obj.axis[1] - obj.axis[0])
            _write_header(fh, _KIND_KERNEL, 1, 0, half, spacing, obj.matrix.shape)
            fh.write(np.ascontiguousarray(obj.matrix, dtype="<f8").tobytes())
        else:
            raise TypeError(f"cannot serialize {type(obj).__name__}")


def read_container(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, kind, d, _, N, L, h, ndim = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: not an HBSV1 container")
        shape = tuple(struct.unpack("<Q", fh.read(8))[0] for _ in range(ndim))
        payload = fh.read()
    if kind == _KIND_COEFFS:
        data = np.frombuffer(payload, dtype="<f8").reshape(shape + (2,))
        coeffs = data[..., 0] + 1j * data[..., 1]
        return SpectralCoefficients(HermiteBasis(d, N), coeffs)
    if kind == _KIND_GRID:
        data = np.frombuffer(payload, dtype="<f8").reshape(shape + (2,))
        values = data[..., 0] + 1j * data[..., 1]
        return GridFunction(Grid(d, L, h), values)
    if kind == _KIND_KERNEL:
        matrix = np.frombuffer(payload, dtype="<f8").reshape(shape)
        grid = Grid(1, L, h)
        return KernelMatrix(grid.axis, grid.axis_weights, matrix.copy(), True, "loaded")
    raise ValueError(f"{path}: unknown container kind {kind}")
