"""Shared Fourier-space machinery for the periodic box."""

from __future__ import annotations

import numpy as np

from .grids import GridSpec3, VectorField3


def wavevectors(grid: GridSpec3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ks = [
        2.0 * np.pi * np.fft.fftfreq(n, d=L / n)
        for n, L in zip(grid.shape, grid.lengths)
    ]
    return np.meshgrid(*ks, indexing="ij")


def fft_vec(v: VectorField3) -> np.ndarray:
    return np.stack([np.fft.fftn(c) for c in v.components])


def ifft_vec(grid: GridSpec3, vhat: np.ndarray, **kw) -> VectorField3:
    comps = np.stack([np.fft.ifftn(c).real for c in vhat])
    return VectorField3(grid, comps, **kw)


def spectral_curl_hat(grid: GridSpec3, vhat: np.ndarray) -> np.ndarray:
    KX, KY, KZ = wavevectors(grid)
    return np.stack(
        [
            1j * (KY * vhat[2] - KZ * vhat[1]),
            1j * (KZ * vhat[0] - KX * vhat[2]),
            1j * (KX * vhat[1] - KY * vhat[0]),
        ]
    )


def spectral_curl(v: VectorField3) -> VectorField3:
    return ifft_vec(v.grid, spectral_curl_hat(v.grid, fft_vec(v)))


def spectral_divergence_max(v, vhat: np.ndarray | None = None) -> float:
    """Sup-norm of the spectral divergence; accepts a VectorField3 or a
    (grid, vhat) pair."""
    if vhat is None:
        grid, vhat = v.grid, fft_vec(v)
    else:
        grid = v
    KX, KY, KZ = wavevectors(grid)
    d = 1j * (KX * vhat[0] + KY * vhat[1] + KZ * vhat[2])
    return float(np.abs(np.fft.ifftn(d).real).max())


def solenoidal_project_hat(grid: GridSpec3, vhat: np.ndarray) -> np.ndarray:
    """Remove the gradient part: v - k (k.v)/|k|^2, mean mode untouched."""
    KX, KY, KZ = wavevectors(grid)
    k2 = KX**2 + KY**2 + KZ**2
    k2s = np.where(k2 == 0.0, 1.0, k2)
    kv = (KX * vhat[0] + KY * vhat[1] + KZ * vhat[2]) / k2s
    out = np.stack([vhat[0] - KX * kv, vhat[1] - KY * kv, vhat[2] - KZ * kv])
    return out


def curl_inverse_hat(grid: GridSpec3, vhat: np.ndarray) -> np.ndarray:
    """Coulomb-gauge inverse curl: A_hat = i k x v_hat / |k|^2, A_hat(0)=0."""
    KX, KY, KZ = wavevectors(grid)
    k2 = KX**2 + KY**2 + KZ**2
    k2s = np.where(k2 == 0.0, 1.0, k2)
    ahat = np.stack(
        [
            1j * (KY * vhat[2] - KZ * vhat[1]) / k2s,
            1j * (KZ * vhat[0] - KX * vhat[2]) / k2s,
            1j * (KX * vhat[1] - KY * vhat[0]) / k2s,
        ]
    )
    ahat[:, 0, 0, 0] = 0.0
    return ahat


def dealias_mask(grid: GridSpec3) -> np.ndarray:
    """Two-thirds rule mask for quadratic nonlinearities."""
    masks = []
    for n in grid.shape:
        f = np.abs(np.fft.fftfreq(n, d=1.0 / n))
        masks.append(f <= n / 3.0)
    mx, my, mz = np.meshgrid(*masks, indexing="ij")
    return mx & my & mz
