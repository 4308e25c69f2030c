"""Uniform periodic grids, sampled fields and finite-difference calculus.

Everything downstream (energies, helicities, spectral solvers) works on the
periodic box T^3 = [0,Lx) x [0,Ly) x [0,Lz).  Scalar and vector fields are
plain sample arrays plus an optional analytic closure; derivatives are
second-order central differences with periodic wrap-around, quadrature is
the periodic Riemann sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class GridError(ValueError):
    """Invalid grid specification or field/grid mismatch."""


@dataclass(frozen=True)
class GridSpec3:
    """Uniform periodic grid on a box of size (Lx, Ly, Lz).

    Counts must be >= 4 so that central-difference stencils fit, lengths
    must be positive.  Spacings are always derived, never stored.
    """

    nx: int
    ny: int
    nz: int
    lx: float = 2.0 * np.pi
    ly: float = 2.0 * np.pi
    lz: float = 2.0 * np.pi
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for n in (self.nx, self.ny, self.nz):
            if int(n) != n or n < 4:
                raise GridError(f"grid counts must be integers >= 4, got {n}")
        for L in (self.lx, self.ly, self.lz):
            if not L > 0:
                raise GridError(f"box lengths must be positive, got {L}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.lx / self.nx, self.ly / self.ny, self.lz / self.nz)

    @property
    def cell_volume(self) -> float:
        hx, hy, hz = self.spacing
        return hx * hy * hz

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (self.lx, self.ly, self.lz)

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            o + L * np.arange(n) / n
            for o, L, n in zip(self.origin, self.lengths, self.shape)
        )

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        ax, ay, az = self.axes()
        return np.meshgrid(ax, ay, az, indexing="ij")

    @staticmethod
    def cube(n: int, box: float = 2.0 * np.pi, centered: bool = False) -> "GridSpec3":
        o = (-box / 2.0,) * 3 if centered else (0.0, 0.0, 0.0)
        return GridSpec3(n, n, n, box, box, box, origin=o)


@dataclass
class ScalarField3:
    grid: GridSpec3
    samples: np.ndarray
    closure: Optional[Callable] = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.shape != self.grid.shape:
            raise GridError(
                f"sample shape {self.samples.shape} != grid shape {self.grid.shape}"
            )

    @staticmethod
    def from_closure(grid: GridSpec3, fn: Callable) -> "ScalarField3":
        X, Y, Z = grid.meshgrid()
        return ScalarField3(grid, np.asarray(fn(X, Y, Z), dtype=float), closure=fn)


@dataclass
class VectorField3:
    grid: GridSpec3
    components: np.ndarray  # shape (3, nx, ny, nz)
    closure: Optional[Callable] = None  # (X, Y, Z) -> array shape (3, ...)
    divergence_free: bool = False

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=float)
        if self.components.shape != (3,) + self.grid.shape:
            raise GridError(
                f"component shape {self.components.shape} incongruent with grid "
                f"{self.grid.shape}"
            )

    @staticmethod
    def from_closure(grid: GridSpec3, fn: Callable, **kw) -> "VectorField3":
        X, Y, Z = grid.meshgrid()
        comps = np.stack([np.asarray(c, dtype=float) for c in fn(X, Y, Z)])
        return VectorField3(grid, comps, closure=fn, **kw)

    @staticmethod
    def zeros(grid: GridSpec3) -> "VectorField3":
        return VectorField3(grid, np.zeros((3,) + grid.shape))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at arbitrary points, shape (m, 3) -> (m, 3).

        Uses the analytic closure when present, otherwise periodic trilinear
        interpolation of the samples.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.closure is not None:
            out = self.closure(points[:, 0], points[:, 1], points[:, 2])
            return np.stack([np.asarray(c, dtype=float) for c in out], axis=-1)
        return _trilinear(self.grid, self.components, points)

    def norm_sup(self) -> float:
        return float(np.sqrt((self.components**2).sum(axis=0)).max())

    def norm_l2(self) -> float:
        return float(np.sqrt((self.components**2).sum() * self.grid.cell_volume))


def _trilinear(grid: GridSpec3, comps: np.ndarray, pts: np.ndarray) -> np.ndarray:
    h = np.array(grid.spacing)
    o = np.array(grid.origin)
    n = np.array(grid.shape)
    u = (pts - o) / h
    i0 = np.floor(u).astype(int)
    f = u - i0
    out = np.zeros((pts.shape[0], 3))
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                w = (
                    (f[:, 0] if dx else 1 - f[:, 0])
                    * (f[:, 1] if dy else 1 - f[:, 1])
                    * (f[:, 2] if dz else 1 - f[:, 2])
                )
                idx = (
                    (i0[:, 0] + dx) % n[0],
                    (i0[:, 1] + dy) % n[1],
                    (i0[:, 2] + dz) % n[2],
                )
                out += w[:, None] * comps[:, idx[0], idx[1], idx[2]].T
    return out


# -- finite-difference exterior derivative (grad / curl / div) ---------------


def _ddx(a: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(a, -1, axis=axis) - np.roll(a, 1, axis=axis)) / (2.0 * h)


def gradient(f: ScalarField3) -> VectorField3:
    hx, hy, hz = f.grid.spacing
    comps = np.stack(
        [_ddx(f.samples, 0, hx), _ddx(f.samples, 1, hy), _ddx(f.samples, 2, hz)]
    )
    return VectorField3(f.grid, comps)


def curl(v: VectorField3) -> VectorField3:
    hx, hy, hz = v.grid.spacing
    fx, fy, fz = v.components
    cx = _ddx(fz, 1, hy) - _ddx(fy, 2, hz)
    cy = _ddx(fx, 2, hz) - _ddx(fz, 0, hx)
    cz = _ddx(fy, 0, hx) - _ddx(fx, 1, hy)
    return VectorField3(v.grid, np.stack([cx, cy, cz]))


def divergence(v: VectorField3) -> ScalarField3:
    hx, hy, hz = v.grid.spacing
    fx, fy, fz = v.components
    return ScalarField3(
        v.grid, _ddx(fx, 0, hx) + _ddx(fy, 1, hy) + _ddx(fz, 2, hz)
    )


def exterior_derivative(fld, degree: int):
    """d on forms identified with fields: 0 -> grad, 1 -> curl, 2 -> div.

    Central differences of order h^2 with periodic wrap-around; d(d(.)) is
    small but not structurally zero.
    """
    if degree == 0:
        if not isinstance(fld, ScalarField3):
            raise GridError("degree 0 expects a scalar field")
        return gradient(fld)
    if degree == 1:
        if not isinstance(fld, VectorField3):
            raise GridError("degree 1 expects a vector field")
        return curl(fld)
    if degree == 2:
        if not isinstance(fld, VectorField3):
            raise GridError("degree 2 expects a vector field")
        return divergence(fld)
    raise GridError(f"degree must be 0, 1 or 2, got {degree}")


def integrate(f: ScalarField3 | np.ndarray, grid: GridSpec3 | None = None) -> float:
    """Periodic Riemann sum; spectrally accurate for smooth periodic data."""
    if isinstance(f, ScalarField3):
        samples, grid = f.samples, f.grid
    else:
        samples = np.asarray(f)
        if grid is None:
            raise GridError("grid required when integrating a bare array")
    return float(samples.sum(dtype=np.float64) * grid.cell_volume)


def dot(u: VectorField3, v: VectorField3) -> ScalarField3:
    if u.grid != v.grid:
        raise GridError("fields live on different grids")
    return ScalarField3(u.grid, (u.components * v.components).sum(axis=0))


def cross(u: VectorField3, v: VectorField3) -> VectorField3:
    if u.grid != v.grid:
        raise GridError("fields live on different grids")
    a, b = u.components, v.components
    comps = np.stack(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )
    return VectorField3(u.grid, comps)
