"""Serialization: structured-grid field files, flat diagnostics reports,
iteration traces, field-line CSVs and JSON records.

All floats are printed with 17 significant digits so a write/read round
trip is bit-exact; every writer goes through a temp file + rename so
readers never observe partial output.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from typing import Iterable

import numpy as np

from .grids import GridSpec3, VectorField3


class IOError3(OSError):
    pass


FMT = "%.17g"


def _atomic_write(path: str, writer) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_field(path: str, grid: GridSpec3, e: VectorField3,
                b: VectorField3, header: dict) -> None:
    """Structured-grid text export: '# key: value' provenance lines, one
    'x y z Ex Ey Ez Bx By Bz' row per grid node in C order."""

    def writer(fh):
        fh.write("# format: structured-grid-eb 1\n")
        for k in sorted(header):
            fh.write(f"# {k}: {header[k]}\n")
        fh.write(f"# grid: {grid.nx} {grid.ny} {grid.nz}\n")
        fh.write(f"# box: {FMT % grid.lx} {FMT % grid.ly} {FMT % grid.lz}\n")
        fh.write("# origin: " + " ".join(FMT % o for o in grid.origin) + "\n")
        fh.write("# columns: x y z Ex Ey Ez Bx By Bz\n")
        X, Y, Z = grid.meshgrid()
        cols = np.stack([X, Y, Z, *e.components, *b.components])
        flat = cols.reshape(9, -1).T
        np.savetxt(fh, flat, fmt=FMT)

    _atomic_write(path, writer)


def read_field(path: str):
    """Inverse of write_field: returns (grid, E, B, header)."""
    if not os.path.exists(path):
        raise IOError3(f"no such field file: {path}")
    header = {}
    meta = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    k, v = body.split(":", 1)
                    k, v = k.strip(), v.strip()
                    if k in ("grid", "box", "origin"):
                        meta[k] = v.split()
                    elif k not in ("format", "columns"):
                        header[k] = v
                continue
            rows.append([float(t) for t in line.split()])
    if "grid" not in meta or "box" not in meta:
        raise IOError3(f"{path}: missing grid/box header lines")
    nx, ny, nz = (int(t) for t in meta["grid"])
    lx, ly, lz = (float(t) for t in meta["box"])
    origin = tuple(float(t) for t in meta.get("origin", ("0", "0", "0")))
    grid = GridSpec3(nx, ny, nz, lx, ly, lz, origin)
    data = np.asarray(rows)
    if data.shape != (nx * ny * nz, 9):
        raise IOError3(
            f"{path}: expected {nx * ny * nz} rows of 9 columns, got "
            f"{data.shape}")
    shape = (nx, ny, nz)
    e = VectorField3(grid, data[:, 3:6].T.reshape(3, *shape))
    b = VectorField3(grid, data[:, 6:9].T.reshape(3, *shape))
    return grid, e, b, header


def write_report(path: str, values: dict) -> None:
    """Flat 'key = value' diagnostics file, keys sorted."""

    def writer(fh):
        for k in sorted(values):
            v = values[k]
            fh.write(f"{k} = {FMT % v}\n" if isinstance(v, float)
                     else f"{k} = {v}\n")

    _atomic_write(path, writer)


def read_report(path: str) -> dict:
    if not os.path.exists(path):
        raise IOError3(f"no such report: {path}")
    out = {}
    with open(path) as fh:
        for line in fh:
            if "=" not in line:
                continue
            k, v = line.split("=", 1)
            out[k.strip()] = float(v)
    return out


def write_trace_csv(path: str, rows: Iterable[dict],
                    fields=("iter", "energy", "helicity", "residual")) -> None:
    def writer(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([FMT % r[f] if isinstance(r[f], float) else r[f]
                        for f in fields])

    _atomic_write(path, writer)


def write_line_csv(path: str, arclength: np.ndarray,
                   points: np.ndarray) -> None:
    def writer(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "x", "y", "z"])
        for s, p in zip(arclength, points):
            w.writerow([FMT % s, FMT % p[0], FMT % p[1], FMT % p[2]])

    _atomic_write(path, writer)


def write_json(path: str, record: dict) -> None:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        raise TypeError(f"not serializable: {type(o)}")

    def writer(fh):
        json.dump(record, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")

    _atomic_write(path, writer)
