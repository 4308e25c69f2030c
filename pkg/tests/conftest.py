import numpy as np
import pytest

from topofield.grids import GridSpec3, VectorField3
from topofield import spectral as sp


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)


def random_solenoidal(grid: GridSpec3, rng, kmax: int = 3,
                      amplitude: float = 1.0) -> VectorField3:
    """Band-limited random divergence-free field with zero mean."""
    shape = (3,) + grid.shape
    vhat = np.zeros(shape, dtype=complex)
    kx, ky, kz = sp.wavevectors(grid)
    hx = 2.0 * np.pi * kmax / grid.lx
    band = ((np.abs(kx) <= hx + 1e-12) & (np.abs(ky) <= hx + 1e-12)
            & (np.abs(kz) <= hx + 1e-12))
    n = grid.nx * grid.ny * grid.nz
    for c in range(3):
        vhat[c][band] = (rng.standard_normal(band.sum())
                         + 1j * rng.standard_normal(band.sum())) * n
    vhat = sp.solenoidal_project_hat(grid, vhat)
    vhat[:, 0, 0, 0] = 0.0
    v = sp.ifft_vec(grid, vhat, divergence_free=True)
    peak = max(v.norm_sup(), 1e-300)
    return VectorField3(grid, amplitude * v.components / peak,
                        divergence_free=True)
