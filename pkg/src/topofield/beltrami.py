"""Curl eigenfields on the periodic box, the gradient flow, and constrained
energy relaxation.

All spectral: the curl operator restricted to divergence-free fields is
diagonal over helical polarizations with eigenvalues +-|k| (|k| in box
units 2 pi m / L), which makes the eigenrelation, the exponential gradient
flow and the energy/helicity bookkeeping exact up to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .grids import GridSpec3, VectorField3, cross
from . import spectral as sp


class BeltramiError(ValueError):
    pass


@dataclass(frozen=True)
class BeltramiMode:
    k: tuple[int, int, int]
    sign: int
    amplitude: float
    grid: GridSpec3

    @property
    def kappa(self) -> float:
        kx = 2.0 * np.pi * self.k[0] / self.grid.lx
        ky = 2.0 * np.pi * self.k[1] / self.grid.ly
        kz = 2.0 * np.pi * self.k[2] / self.grid.lz
        return self.sign * float(np.sqrt(kx * kx + ky * ky + kz * kz))


def _helical_basis(kvec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair (e1, e2) perpendicular to k, right-handed with k."""
    khat = kvec / np.linalg.norm(kvec)
    trial = np.array([1.0, 0.0, 0.0])
    if abs(khat @ trial) > 0.9:
        trial = np.array([0.0, 1.0, 0.0])
    e1 = trial - (trial @ khat) * khat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(khat, e1)
    return e1, e2


def build_beltrami_mode(k, sign: int, amplitude: float,
                        grid: GridSpec3) -> VectorField3:
    """Real single-mode curl eigenfield with curl v = kappa v,
    kappa = sign * |k_phys|; divergence-free by construction."""
    k = tuple(int(ki) for ki in k)
    if k == (0, 0, 0):
        raise BeltramiError("k must be nonzero")
    if sign not in (+1, -1):
        raise BeltramiError("sign must be +1 or -1")
    for ki, n in zip(k, grid.shape):
        if abs(ki) >= n / 2:
            raise BeltramiError(f"grid does not resolve k = {k}")
    kphys = np.array(
        [
            2.0 * np.pi * k[0] / grid.lx,
            2.0 * np.pi * k[1] / grid.ly,
            2.0 * np.pi * k[2] / grid.lz,
        ]
    )
    e1, e2 = _helical_basis(kphys)

    def closure(X, Y, Z):
        ph = kphys[0] * X + kphys[1] * Y + kphys[2] * Z
        c, s = np.cos(ph), np.sin(ph)
        return tuple(
            amplitude * (e1[i] * c - sign * e2[i] * s) for i in range(3)
        )

    return VectorField3.from_closure(grid, closure, divergence_free=True)


def force_free_residual(b: VectorField3, kappa_field=None) -> dict:
    """Least-squares eigenvalue fit kappa = <B.curl B>/<B.B> and the
    relative residual |curl B - kappa B| / |B| (spectral curl)."""
    c = sp.spectral_curl(b)
    bb = float((b.components**2).sum())
    if bb == 0.0:
        raise BeltramiError("zero field")
    bc = float((b.components * c.components).sum())
    kappa = bc / bb
    res = float(
        np.sqrt(((c.components - kappa * b.components) ** 2).sum() / bb)
    )
    out = {"kappa_fit": kappa, "residual": res}
    if kappa_field is not None:
        from .grids import gradient, dot

        g = gradient(kappa_field)
        tang = dot(b, g).samples
        scale = b.norm_sup() * max(np.abs(g.samples).max(axis=None), 1e-300)
        out["tangency"] = float(np.abs(tang).max() / scale)
    return out


def curl_spectrum(grid: GridSpec3, shell_max: int) -> list[dict]:
    """Exact curl eigenvalues over divergence-free modes, grouped by
    integer shell |k|^2 (cubic box assumed for shell grouping)."""
    if shell_max < 1:
        raise BeltramiError("shell_max must be >= 1")
    if not (grid.lx == grid.ly == grid.lz):
        raise BeltramiError("shell listing assumes a cubic box")
    L = grid.lx
    shells: dict[int, int] = {}
    m = int(np.ceil(np.sqrt(shell_max)))
    for i in range(-m, m + 1):
        for j in range(-m, m + 1):
            for l in range(-m, m + 1):
                s = i * i + j * j + l * l
                if 0 < s <= shell_max:
                    shells[s] = shells.get(s, 0) + 1
    out = []
    for s in sorted(shells):
        kappa = 2.0 * np.pi * np.sqrt(s) / L
        # each wavevector carries one +kappa and one -kappa polarization
        for sign in (+1, -1):
            out.append(
                {"shell": s, "kappa": sign * kappa, "multiplicity": shells[s]}
            )
    return out


def lambda_1(grid: GridSpec3) -> float:
    """Smallest positive curl eigenvalue on the box: 2 pi / max(L)."""
    return 2.0 * np.pi / max(grid.lengths)


@dataclass
class FlowResult:
    slices: list
    times: np.ndarray
    energy_times: np.ndarray    # every RK step
    curl_energy: np.ndarray     # int (curl A)^2 at every step (Parseval)


def gradient_flow_evolve(a0: VectorField3, t_final: float, dt: float,
                         n_slices: int = 0) -> FlowResult:
    """Integrate dA/dt = curl A (RK4 on the spectral curl).

    Each helical component grows exactly like exp(kappa t); a stability
    guard aborts if the norm exceeds exp(kappa_max t) by 10x.  The
    curl-energy integrand is recorded at every step so the work integral
    can be quadratured at full time resolution.
    """
    grid = a0.grid
    nsteps = int(round(t_final / dt))
    if abs(nsteps * dt - t_final) > 1e-12 * max(t_final, 1.0):
        nsteps += 1
        dt = t_final / nsteps
    KX, KY, KZ = sp.wavevectors(grid)
    kmax = float(np.sqrt(KX**2 + KY**2 + KZ**2).max())
    if dt >= 1.0 / max(kmax, 1e-300):
        raise BeltramiError(
            f"dt = {dt} unstable for resolved spectrum (need dt < {1.0/kmax:.3g})"
        )
    ahat = sp.fft_vec(a0)
    norm0 = float(np.abs(ahat).max())
    w = grid.cell_volume / np.prod(grid.shape)

    def rhs(u):
        return sp.spectral_curl_hat(grid, u)

    def curl_energy(u):
        # Parseval for the unnormalized FFT: int |f|^2 = (vol/N^2) sum |f_k|^2
        c = sp.spectral_curl_hat(grid, u)
        return float((np.abs(c) ** 2).sum() * w)

    keep = max(2, n_slices) if n_slices else 9
    stride = max(1, nsteps // (keep - 1)) if keep <= nsteps else 1
    slices = [sp.ifft_vec(grid, ahat, divergence_free=a0.divergence_free)]
    times = [0.0]
    energies = [curl_energy(ahat)]
    for step in range(1, nsteps + 1):
        k1 = rhs(ahat)
        k2 = rhs(ahat + 0.5 * dt * k1)
        k3 = rhs(ahat + 0.5 * dt * k2)
        k4 = rhs(ahat + dt * k3)
        ahat = ahat + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = step * dt
        energies.append(curl_energy(ahat))
        if norm0 > 0 and float(np.abs(ahat).max()) > 10.0 * norm0 * np.exp(kmax * t):
            raise BeltramiError(f"instability detected at t = {t}")
        if step % stride == 0 or step == nsteps:
            slices.append(sp.ifft_vec(grid, ahat,
                                      divergence_free=a0.divergence_free))
            times.append(t)
    return FlowResult(slices=slices, times=np.asarray(times),
                      energy_times=np.arange(nsteps + 1) * dt,
                      curl_energy=np.asarray(energies))


# -- constrained relaxation ---------------------------------------------------


def _energy_helicity_hat(grid: GridSpec3, vhat: np.ndarray):
    """Quadratic functionals in Fourier space (Parseval):
    E = integral v^2, H = integral v . curl^-1 v."""
    npts = np.prod(grid.shape)
    # Parseval for the unnormalized FFT: int |f|^2 = (vol/N^2) sum |f_k|^2
    w = grid.cell_volume / npts
    KX, KY, KZ = sp.wavevectors(grid)
    k2 = KX**2 + KY**2 + KZ**2
    e_dens = (np.abs(vhat) ** 2).sum(axis=0)
    energy = float(e_dens.sum() * w)
    ahat = sp.curl_inverse_hat(grid, vhat)
    h_dens = (vhat.conj() * ahat).sum(axis=0).real
    helicity = float(h_dens.sum() * w)
    return energy, helicity, ahat, k2, w


def relax_to_minimizer(v0: VectorField3, tol: float = 1e-8,
                       max_iters: int = 5000, step0: float = 0.2) -> tuple[
                           VectorField3, list[dict]]:
    """Minimize E[v] = int v^2 over divergence-free fields at fixed
    helicity H[v] = int v.curl^-1 v.

    Projected steepest descent in Fourier space: the energy gradient is
    projected onto the helicity level set each step and the helicity is
    re-normalized to kill O(step^2) drift.  The limit is a curl eigenfield
    on the lowest |kappa| shell compatible with sign(H), where the
    energy/helicity ratio saturates the spectral bound.
    """
    grid = v0.grid
    vhat = sp.solenoidal_project_hat(grid, sp.fft_vec(v0))
    vhat[:, 0, 0, 0] = 0.0
    energy, h0, ahat, k2, w = _energy_helicity_hat(grid, vhat)
    if abs(h0) < 1e-14 * max(energy, 1e-300):
        raise BeltramiError(
            "zero helicity: the constraint manifold is degenerate"
        )
    trace: list[dict] = []
    step = step0
    for it in range(max_iters):
        # gradients (w.r.t. conj coefficients): dE = 2 v, dH = 2 curl^-1 v
        ge = vhat
        gh = ahat
        num = float((ge.conj() * gh).sum().real)
        den = float((gh.conj() * gh).sum().real)
        mu = num / den
        g = ge - mu * gh
        gnorm2 = float((np.abs(g) ** 2).sum() * w)
        res = np.sqrt(gnorm2) / max(np.sqrt(energy), 1e-300)
        kap = float((ge.conj() * sp.spectral_curl_hat(grid, vhat)).sum().real
                    ) / float((np.abs(ge) ** 2).sum().real)
        trace.append({"iter": it, "energy": energy, "helicity": h0,
                      "residual": res, "kappa": kap})
        if res < tol:
            break
        # backtracking line search on the projected descent direction
        while True:
            cand = vhat - step * g
            e2, h2, a2, _, _ = _energy_helicity_hat(grid, cand)
            if h2 * h0 > 0:
                scale = np.sqrt(h0 / h2)
                cand = cand * scale
                e2 = e2 * scale**2
                a2 = a2 * scale
                if e2 <= energy * (1.0 + 1e-15):
                    break
            step *= 0.5
            if step < 1e-12:
                raise BeltramiError("line search failed to reduce energy")
        vhat, energy, ahat = cand, e2, a2
        h0 = h2 * (h0 / h2)  # helicity restored exactly by the rescale
        step = min(step * 1.5, step0)
    else:
        raise BeltramiError(f"no convergence within {max_iters} iterations")
    return sp.ifft_vec(grid, vhat, divergence_free=True), trace


def euler_steady_residual(v: VectorField3) -> float:
    """Distance of w = v x curl v from a gradient: solve the periodic
    Poisson problem for the Bernoulli function spectrally and return
    |w - grad(alpha)| / |v|^2 (zero iff the flow is steady Euler)."""
    vv = float((v.components**2).sum())
    if vv == 0.0:
        return 0.0
    w = cross(v, sp.spectral_curl(v))
    what = np.stack([np.fft.fftn(c) for c in w.components])
    KX, KY, KZ = sp.wavevectors(v.grid)
    k2 = KX**2 + KY**2 + KZ**2
    k2s = np.where(k2 == 0.0, 1.0, k2)
    div_w = 1j * (KX * what[0] + KY * what[1] + KZ * what[2])
    alpha_hat = -div_w / k2s
    alpha_hat[0, 0, 0] = 0.0
    grad_hat = np.stack([1j * KX * alpha_hat, 1j * KY * alpha_hat,
                         1j * KZ * alpha_hat])
    resid = what - grad_hat
    resid[:, 0, 0, 0] = 0.0  # mean of w is irrelevant to the gradient test
    rnorm = np.sqrt((np.abs(np.stack(
        [np.fft.ifftn(c).real for c in resid])) ** 2).sum())
    return float(rnorm / vv)


def induction_residual(v_series: list[VectorField3],
                       b_series: list[VectorField3], dt: float,
                       clebsch=None) -> dict:
    """Ideal-MHD induction check: sup-norm of dB/dt - curl(v x B) with
    centered time differences and a dealiased spectral curl of the
    quadratic term.  With Clebsch closures (alpha, beta, their time
    derivatives), also checks v x B = grad(beta) da/dt - grad(alpha) db/dt
    pointwise at the middle slice."""
    if len(b_series) < 3 or len(v_series) != len(b_series):
        raise BeltramiError("need >= 3 matching time slices")
    grid = b_series[0].grid
    mask = sp.dealias_mask(grid)
    worst = 0.0
    for i in range(1, len(b_series) - 1):
        bdot = (b_series[i + 1].components - b_series[i - 1].components) / (2 * dt)
        vxb = cross(v_series[i], b_series[i])
        vhat = np.stack([np.fft.fftn(c) * mask for c in vxb.components])
        curl_hat = sp.spectral_curl_hat(grid, vhat)
        c = np.stack([np.fft.ifftn(u).real for u in curl_hat])
        worst = max(worst, float(np.abs(bdot - c).max()))
    out = {"induction": worst}
    if clebsch is not None:
        from .grids import gradient, ScalarField3

        i = len(b_series) // 2
        alpha, beta, alpha_dot, beta_dot = clebsch
        ga = gradient(ScalarField3.from_closure(grid, alpha))
        gb = gradient(ScalarField3.from_closure(grid, beta))
        X, Y, Z = grid.meshgrid()
        rhs = (np.asarray(gb.components) * np.asarray(alpha_dot(X, Y, Z))
               - np.asarray(ga.components) * np.asarray(beta_dot(X, Y, Z)))
        vxb = cross(v_series[i], b_series[i])
        out["clebsch"] = float(np.abs(vxb.components - rhs).max())
    return out
