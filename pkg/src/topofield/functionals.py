"""Quadratic functionals and integral identities on periodic fields:
energies, helicities, the Chern-Simons integral and its variation, the
magnetic-energy lower bound, and the four-dimensional density identity
tr(F ^ F) = d(A ^ dA) checked by two independent finite-difference routes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import (GridSpec3, ScalarField3, VectorField3, curl, divergence,
                    dot, integrate)
from . import spectral as sp
from .beltrami import lambda_1
from .em import EMField


class FunctionalError(ValueError):
    pass


@dataclass
class DiagnosticsReport:
    """Flat scalar summary of one field configuration; every value is a
    finite float (booleans stored as 0/1)."""

    values: dict = field(default_factory=dict)

    def __setitem__(self, key: str, value) -> None:
        v = float(value)
        if not np.isfinite(v):
            raise FunctionalError(f"non-finite diagnostic {key!r}")
        self.values[key] = v

    def __getitem__(self, key: str) -> float:
        return self.values[key]

    def items(self):
        return self.values.items()


def energy_em(f: EMField) -> float:
    """(1/2) int (E^2 + B^2)."""
    dens = 0.5 * ((f.E.components**2).sum(axis=0)
                  + (f.B.components**2).sum(axis=0))
    return integrate(dens, f.grid)


def energy_v(v: VectorField3) -> float:
    """(1/2) int v^2."""
    return 0.5 * integrate((v.components**2).sum(axis=0), v.grid)


def magnetic_energy(b: VectorField3) -> float:
    return integrate((b.components**2).sum(axis=0), b.grid)


def curl_inverse(b: VectorField3, div_tol: float = 1e-8) -> VectorField3:
    """Coulomb-gauge vector potential: curl A = B, div A = 0, zero mean.

    B must be divergence-free and mean-free; both are checked and the
    reconstruction error curl A - B is verified spectrally.
    """
    grid = b.grid
    bhat = sp.fft_vec(b)
    scale = max(float(np.abs(b.components).max()), 1e-300)
    mean = float(np.abs(bhat[:, 0, 0, 0]).max()) / np.prod(grid.shape)
    if mean > div_tol * scale:
        raise FunctionalError(f"field has nonzero mean component ({mean:.3g})")
    div = sp.spectral_divergence_max(grid, bhat)
    if div > div_tol * scale:
        raise FunctionalError(f"field is not divergence-free ({div:.3g})")
    ahat = sp.curl_inverse_hat(grid, bhat)
    # curl(curl^-1) reproduces the solenoidal mean-free part exactly; the
    # input may carry truncation-level departures up to div_tol
    proj = sp.solenoidal_project_hat(grid, bhat)
    proj[:, 0, 0, 0] = 0.0
    back = sp.spectral_curl_hat(grid, ahat)
    err = float(np.abs(np.fft.ifftn(back - proj,
                                    axes=(1, 2, 3)).real).max())
    if err > 1e-10 * scale:
        raise FunctionalError(f"curl inversion failed ({err:.3g})")
    return sp.ifft_vec(grid, ahat, divergence_free=True)


def helicity_ab(b: VectorField3, div_tol: float = 5e-2) -> float:
    """Magnetic helicity int A . B with A = curl^-1 B (gauge-invariant on
    the mean-free periodic box).  The default tolerance admits the
    truncation-level mean/divergence of analytic fields sampled on a
    finite box."""
    a = curl_inverse(b, div_tol=div_tol)
    return integrate(dot(a, b))


def helicity_v(v: VectorField3) -> float:
    """Kinetic helicity int v . curl v."""
    return integrate(dot(v, sp.spectral_curl(v)))


def chern_simons(a: VectorField3, use_spectral: bool = True) -> float:
    """CS[A] = (1/2) int A . curl A."""
    c = sp.spectral_curl(a) if use_spectral else curl(a)
    return 0.5 * integrate(dot(a, c))


def arnold_report(b: VectorField3, div_tol: float = 5e-2) -> dict:
    """Lower bound for the magnetic energy by the helicity:
    int B^2 >= lambda_1 |int A . B|, with lambda_1 = 2 pi / max(L) the
    smallest positive curl eigenvalue of the box."""
    lhs = magnetic_energy(b)
    h = helicity_ab(b, div_tol=div_tol)
    lam = lambda_1(b.grid)
    rhs = lam * abs(h)
    return {
        "energy": lhs,
        "helicity": h,
        "lambda_1": lam,
        "bound": rhs,
        "satisfied": bool(lhs >= rhs * (1.0 - 1e-12)),
        "ratio": lhs / rhs if rhs > 0 else np.inf,
    }


def cs_variation_check(a: VectorField3, direction: VectorField3,
                       eps: float = 1e-5) -> dict:
    """First variation of the Chern-Simons integral: the centered
    difference (CS[A + eps u] - CS[A - eps u]) / 2 eps must equal
    int u . curl A built with the same discrete curl."""
    if direction.grid is not a.grid and direction.grid != a.grid:
        raise FunctionalError("direction lives on a different grid")
    ap = VectorField3(a.grid, a.components + eps * direction.components)
    am = VectorField3(a.grid, a.components - eps * direction.components)
    fd = (chern_simons(ap, use_spectral=False)
          - chern_simons(am, use_spectral=False)) / (2.0 * eps)
    c = curl(a)
    exact = integrate(dot(direction, c))
    # normalize by the Cauchy-Schwarz bound of the pairing so orthogonal
    # directions (pairing ~ 0) do not inflate the relative error
    scale = max(
        np.sqrt(integrate((direction.components**2).sum(axis=0), a.grid)
                * integrate((c.components**2).sum(axis=0), a.grid)),
        1e-300,
    )
    return {"fd": fd, "gradient_pairing": exact,
            "relerr": abs(fd - exact) / scale}


# -- F ^ F = d(A ^ dA) in four dimensions -------------------------------------


def _fd4(f, p, axis: int, h: float) -> float:
    q1 = list(p); q1[axis] += h
    q2 = list(p); q2[axis] -= h
    return (f(*q1) - f(*q2)) / (2.0 * h)


def chern_density_identity_check(a4, points: np.ndarray,
                                 h_values=(0.5, 0.25, 0.125)) -> dict:
    """Pointwise check of F ^ F = d(A ^ dA) for an abelian gauge
    potential A_mu(t, x, y, z) (closure returning 4 components).

    LHS: assemble F_{mu nu} = d_mu A_nu - d_nu A_mu by central FD at step
    h, then the density 2 (F01 F23 - F02 F13 + F03 F12).
    RHS: assemble the 3-form G = A ^ dA componentwise (inner derivatives
    at step h), then its exterior derivative (dG)_{0123} by an outer
    central FD at step h.

    The exact identity rests on the Leibniz rule and symmetry of second
    derivatives, both of which hold for central differences only up to
    O(h^2); the fitted convergence order over h_values is returned with
    the residuals.
    """

    def A_full(t, x, y, z):
        return np.asarray(a4(t, x, y, z), dtype=float)

    def F(t, x, y, z, h):
        p = (t, x, y, z)
        d = np.empty((4, 4))
        for mu in range(4):
            d[mu] = _fd4(A_full, p, mu, h)
        return d - d.T  # F[mu, nu] = d_mu A_nu - d_nu A_mu

    def lhs(t, x, y, z, h):
        f = F(t, x, y, z, h)
        return 2.0 * (f[0, 1] * f[2, 3] - f[0, 2] * f[1, 3]
                      + f[0, 3] * f[1, 2])

    def G(t, x, y, z, h):
        """The four components G_{mu nu rho} of A ^ dA entering
        (dG)_{0123}."""
        a = A_full(t, x, y, z)
        f = F(t, x, y, z, h)

        # (A ^ F)_{mu nu rho} = A_mu F_{nu rho} + A_nu F_{rho mu} + A_rho F_{mu nu}
        def comp(mu, nu, rho):
            return (a[mu] * f[nu, rho] + a[nu] * f[rho, mu]
                    + a[rho] * f[mu, nu])

        return {
            (1, 2, 3): comp(1, 2, 3),
            (0, 2, 3): comp(0, 2, 3),
            (0, 1, 3): comp(0, 1, 3),
            (0, 1, 2): comp(0, 1, 2),
        }

    def rhs(t, x, y, z, h):
        p = (t, x, y, z)
        terms = 0.0
        for sgn, axis, idx in ((+1, 0, (1, 2, 3)), (-1, 1, (0, 2, 3)),
                               (+1, 2, (0, 1, 3)), (-1, 3, (0, 1, 2))):
            terms += sgn * _fd4(lambda *q: G(*q, h)[idx], p, axis, h)
        return terms

    points = np.atleast_2d(np.asarray(points, dtype=float))
    errs = []
    for h in h_values:
        worst = 0.0
        for p in points:
            worst = max(worst, abs(lhs(*p, h) - rhs(*p, h)))
        errs.append(worst)
    errs = np.asarray(errs)
    hv = np.asarray(h_values, dtype=float)
    if np.all(errs > 1e-14):
        order = float(np.polyfit(np.log(hv), np.log(errs), 1)[0])
    else:
        order = np.inf  # identity exact to round-off
    return {"errors": errs.tolist(), "h_values": list(hv), "order": order,
            "worst": float(errs.min())}


# -- actions -------------------------------------------------------------------


def action_values(f: EMField) -> dict:
    """Lagrangian densities integrated over the box: the Maxwell action
    density (1/2)(E^2 - B^2) and the total energy density; both vanish /
    degenerate appropriately for null fields."""
    e2 = integrate((f.E.components**2).sum(axis=0), f.grid)
    b2 = integrate((f.B.components**2).sum(axis=0), f.grid)
    return {"maxwell": 0.5 * (e2 - b2), "energy": 0.5 * (e2 + b2),
            "e2": e2, "b2": b2}


def duality_symmetric_action(a_series, z_series, dt: float) -> float:
    """Two-potential first-order action on a time interval,

        S = -(1/2) int dt int [ (curl Z).Adot + (curl A)^2
                                - (curl A).Zdot + (curl Z)^2 ],

    invariant under the duality rotation (A, Z) -> (Z, -A).  Time
    derivatives are centered; the endpoints use one-sided differences of
    matching order, and the time quadrature is trapezoidal.
    """
    n = len(a_series)
    if n < 3 or len(z_series) != n:
        raise FunctionalError("need >= 3 matching slices")

    def tderiv(series, i):
        c = [s.components for s in series]
        if i == 0:
            return (-3 * c[0] + 4 * c[1] - c[2]) / (2 * dt)
        if i == n - 1:
            return (3 * c[-1] - 4 * c[-2] + c[-3]) / (2 * dt)
        return (c[i + 1] - c[i - 1]) / (2 * dt)

    grid = a_series[0].grid
    dens = []
    for i in range(n):
        ca = sp.spectral_curl(a_series[i]).components
        cz = sp.spectral_curl(z_series[i]).components
        adot = tderiv(a_series, i)
        zdot = tderiv(z_series, i)
        val = ((cz * adot).sum(axis=0) + (ca**2).sum(axis=0)
               - (ca * zdot).sum(axis=0) + (cz**2).sum(axis=0))
        dens.append(integrate(val, grid))
    dens = np.asarray(dens)
    return float(-0.5 * np.trapezoid(dens, dx=dt))


def gradient_flow_cs_balance(flow) -> dict:
    """On the flow dA/dt = curl A the energy input integral
    int_0^T int (curl A)^2 equals CS[A(T)] - CS[A(0)] exactly (the flow is
    the CS gradient flow in the L^2 metric, up to the factor conventions
    used here)."""
    from scipy.integrate import simpson

    lhs = float(simpson(flow.curl_energy, x=flow.energy_times))
    cs0 = chern_simons(flow.slices[0])
    cs1 = chern_simons(flow.slices[-1])
    rhs = cs1 - cs0
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return {"work": lhs, "cs_delta": rhs, "relerr": abs(lhs - rhs) / scale}


def mechanical_analogy(grad_sigma, sigma, q0, t_final: float,
                       nsteps: int = 2000) -> dict:
    """Gradient flow on configuration space, qdot = grad sigma(q): the
    action integral int |qdot|^2 dt telescopes to sigma(q(T)) - sigma(q(0)).
    RK4 in time; Simpson quadrature for the action."""
    q = np.asarray(q0, dtype=float)
    dt = t_final / nsteps
    qs = [q.copy()]
    for _ in range(nsteps):
        k1 = np.asarray(grad_sigma(q))
        k2 = np.asarray(grad_sigma(q + 0.5 * dt * k1))
        k3 = np.asarray(grad_sigma(q + 0.5 * dt * k2))
        k4 = np.asarray(grad_sigma(q + dt * k3))
        q = q + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        qs.append(q.copy())
    speeds2 = np.array([np.dot(grad_sigma(p), grad_sigma(p)) for p in qs])
    from scipy.integrate import simpson

    action = float(simpson(speeds2, dx=dt))
    delta = float(sigma(qs[-1]) - sigma(qs[0]))
    scale = max(abs(action), abs(delta), 1e-300)
    return {"action": action, "sigma_delta": delta,
            "relerr": abs(action - delta) / scale, "q_final": qs[-1]}


def field_diagnostics(f: EMField) -> DiagnosticsReport:
    """One-stop scalar summary used by the CLI 'diagnose' command."""
    from .em import null_residuals, maxwell_divergence_residuals

    rep = DiagnosticsReport()
    rep["energy_em"] = energy_em(f)
    dotmax, normmax, degenerate = null_residuals(f)
    rep["null_dot"] = dotmax
    rep["null_norm"] = normmax
    rep["null_degenerate"] = 1.0 if degenerate else 0.0
    dive, divb = maxwell_divergence_residuals(f)
    rep["div_e"] = dive
    rep["div_b"] = divb
    # helicity machinery must not abort the report on truncation-level
    # divergence: that is what the div_b gate is for
    ar = arnold_report(f.B, div_tol=np.inf)
    rep["helicity_ab"] = ar["helicity"]
    rep["arnold_lhs"] = ar["energy"]
    rep["arnold_rhs"] = ar["bound"]
    rep["arnold_lambda1"] = ar["lambda_1"]
    rep["arnold_ok"] = 1.0 if ar["satisfied"] else 0.0
    a = curl_inverse(f.B, div_tol=np.inf)
    rep["cs"] = chern_simons(a)
    return rep
