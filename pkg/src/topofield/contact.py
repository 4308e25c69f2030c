"""Contact-geometric layer: contact 1-forms built from scalar potentials,
nonintegrability (omega ^ d omega != 0) verdicts, the standard contact
structure on the unit 3-sphere, the unit-flux 2-form on the sphere at
infinity, and helicity computed as the contact volume integral.

Two-forms in three dimensions are carried as vector proxies throughout,
so d(alpha d beta) becomes grad(alpha) x grad(beta) and the contact
density is the scalar triple product omega . (curl omega proxy).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grids import GridSpec3, integrate


class ContactError(ValueError):
    pass


# -- Clebsch data ---------------------------------------------------------------


def _zero(x, y, z):
    return np.zeros(np.broadcast(x, y, z).shape)


@dataclass(frozen=True)
class ClebschData:
    """Scalar potentials of the 1-form omega = d phi + a1 d b1 + a2 d b2.

    Closures take (x, y, z) arrays.  Multivalued angles (arguments of
    complex maps) may appear among phi/beta; supply their single-valued
    gradients in `gradients` keyed by field name, otherwise gradients are
    taken by Richardson-extrapolated central differences.
    """

    phi: Callable = _zero
    alpha1: Callable = _zero
    beta1: Callable = _zero
    alpha2: Callable = _zero
    beta2: Callable = _zero
    pairs: int = 2
    gradients: Optional[dict] = None

    def __post_init__(self):
        if self.pairs not in (1, 2):
            raise ContactError("pairs must be 1 or 2")

    def grad(self, name: str, x, y, z):
        if self.gradients and name in self.gradients:
            return np.asarray(self.gradients[name](x, y, z), dtype=float)
        return _fd_grad(getattr(self, name), x, y, z)


def _fd_grad(f, x, y, z, h: float = 1e-4) -> np.ndarray:
    """Richardson central differences: (4 D_h - D_2h) / 3, O(h^4)."""

    def d(axis, step):
        dx = step if axis == 0 else 0.0
        dy = step if axis == 1 else 0.0
        dz = step if axis == 2 else 0.0
        return (np.asarray(f(x + dx, y + dy, z + dz))
                - np.asarray(f(x - dx, y - dy, z - dz))) / (2.0 * step)

    out = []
    for axis in range(3):
        d1 = d(axis, h)
        d2 = d(axis, 2.0 * h)
        out.append((4.0 * d1 - d2) / 3.0)
    return np.asarray(out)


@dataclass(frozen=True)
class ContactSample:
    point: tuple
    omega: np.ndarray       # 1-form components (vector)
    domega: np.ndarray      # 2-form vector proxy: sum grad(a) x grad(b)
    density: float          # omega . domega  (omega ^ d omega density)


def contact_form(data: ClebschData, p) -> ContactSample:
    """Evaluate omega = d phi + sum a_j d b_j and its nonintegrability
    density at one point."""
    x, y, z = (float(c) for c in p)
    gphi = data.grad("phi", x, y, z)
    ga1 = data.grad("alpha1", x, y, z)
    gb1 = data.grad("beta1", x, y, z)
    a1 = float(data.alpha1(x, y, z))
    omega = gphi + a1 * gb1
    dom = np.cross(ga1, gb1)
    if data.pairs == 2:
        ga2 = data.grad("alpha2", x, y, z)
        gb2 = data.grad("beta2", x, y, z)
        omega = omega + float(data.alpha2(x, y, z)) * gb2
        dom = dom + np.cross(ga2, gb2)
    vals = np.concatenate([omega, dom])
    if not np.all(np.isfinite(vals)):
        raise ContactError(f"closure undefined at {p}")
    return ContactSample(point=(x, y, z), omega=omega, domega=dom,
                         density=float(omega @ dom))


def nonintegrability_check(data: ClebschData, sampler,
                           threshold: float = 1e-10) -> dict:
    """Minimum |omega . d omega| over sample points; the form is contact
    on the sample iff the minimum clears the threshold."""
    pts = np.atleast_2d(np.asarray(sampler() if callable(sampler) else sampler,
                                   dtype=float))
    if len(pts) < 1:
        raise ContactError("sampler produced no points")
    dens = np.array([contact_form(data, p).density for p in pts])
    min_abs = float(np.abs(dens).min())
    violating = pts[np.abs(dens) <= threshold]
    return {
        "min_density": min_abs,
        "sample_count": int(len(pts)),
        "verdict": bool(min_abs > threshold),
        "violating_points": violating,
        "sign_changes": bool(dens.min() < 0 < dens.max()),
    }


# -- the 3-sphere ---------------------------------------------------------------


def standard_contact_s3(point) -> dict:
    """Standard contact form on S^3 in R^4 = {(x1, y1, x2, y2)}:
    omega = x1 dy1 - y1 dx1 + x2 dy2 - y2 dx2, with
    d omega = 2 (dx1 ^ dy1 + dx2 ^ dy2)."""
    p = np.asarray(point, dtype=float)
    if p.shape != (4,):
        raise ContactError("point must lie in R^4")
    if abs(np.linalg.norm(p) - 1.0) > 1e-12:
        raise ContactError(f"point is off the unit sphere (|p| = "
                           f"{np.linalg.norm(p):.15g})")
    x1, y1, x2, y2 = p
    omega = np.array([-y1, x1, -y2, x2])  # (dx1, dy1, dx2, dy2) components
    domega = {"dx1^dy1": 2.0, "dx2^dy2": 2.0}
    return {"omega": omega, "domega": domega, "radial_pairing": float(omega @ p)}


def hopf_chart(eta, xi1, xi2) -> np.ndarray:
    """Hopf coordinates: (cos eta e^{i xi1}, sin eta e^{i xi2}) in C^2."""
    return np.stack([np.cos(eta) * np.cos(xi1), np.cos(eta) * np.sin(xi1),
                     np.sin(eta) * np.cos(xi2), np.sin(eta) * np.sin(xi2)])


def _omega_hopf_components(eta):
    """omega in the (eta, xi1, xi2) chart: (0, cos^2 eta, sin^2 eta)."""
    return 0.0 * eta, np.cos(eta) ** 2, np.sin(eta) ** 2


def fubini_study_form(z: complex) -> float:
    """Unit-flux density on the sphere at infinity in the stereographic
    chart, relative to dRe(z) ^ dIm(z): 1 / (pi (1 + |z|^2)^2)."""
    return 1.0 / (np.pi * (1.0 + abs(z) ** 2) ** 2)


def fubini_study_constants() -> dict:
    """Recover both normalization constants, exactly and numerically.

    C: with density (1/2pi) C / (1 + r^2)^2 in the polar chart, the total
    flux is 2 pi (1/2pi) C int_0^inf r dr/(1+r^2)^2 = C/2; unit flux
    forces C = 2.  The radial integral has the elementary antiderivative
    -1/(2(1+r^2)), so the exact value is the rational 1/2.
    g: the cylindrical chart carries the flux as (g/4pi) dphi ^ dz over
    phi in [0, 2pi), z in [-1, 1]; the chart area is exactly 4 pi, so
    unit flux forces g = 1.
    """
    from fractions import Fraction

    from scipy.integrate import quad

    radial_exact = Fraction(1, 2)   # [-1/(2(1+r^2))]_0^inf
    c_exact = 1 / radial_exact
    g_exact = Fraction(1, 1)        # (1/4pi) * 2pi * 2 = 1 per unit g
    val, _ = quad(lambda r: r / (1.0 + r * r) ** 2, 0.0, np.inf)
    c_num = 1.0 / val
    zq = np.linspace(-1.0, 1.0, 2001)
    g_num = 1.0 / float(np.trapezoid(
        np.full_like(zq, 2.0 * np.pi / (4.0 * np.pi)), zq))
    return {"C": c_exact, "g": g_exact, "C_numeric": float(c_num),
            "g_numeric": float(g_num)}


def pullback_consistency_check(resolution: int = 64,
                               eta_margin: float = 0.05) -> dict:
    """d omega of the standard S^3 form against 2 pi times the pullback of
    the unit-flux sphere form through the fibration.

    Chart (eta, xi1, xi2) with theta = 2 eta, phi = xi2 - xi1 on the base:
    both 2-forms reduce to f(eta) d eta ^ (d xi2 - d xi1); the two factors
    are built independently (one from finite differences of omega's chart
    components, one from the chart Jacobian of the base parametrization)
    and compared pointwise away from the polar caps."""
    if resolution < 32:
        raise ContactError("resolution must be >= 32")
    eta = np.linspace(eta_margin, np.pi / 2 - eta_margin, resolution)
    h = 1e-4

    def romberg(fauto, t):
        d1 = (fauto(t + h) - fauto(t - h)) / (2 * h)
        d2 = (fauto(t + 2 * h) - fauto(t - 2 * h)) / (4 * h)
        return (4.0 * d1 - d2) / 3.0

    # d omega = d/d eta (cos^2) d eta^d xi1 + d/d eta (sin^2) d eta^d xi2;
    # the (d eta ^ d xi2) coefficient by FD:
    lhs = romberg(lambda t: np.sin(t) ** 2, eta)
    lhs_xi1 = romberg(lambda t: np.cos(t) ** 2, eta)
    # base form pullback: F = (1/4pi) sin theta d theta ^ d phi with
    # theta = 2 eta, phi = xi2 - xi1  ->  coefficient of d eta ^ d xi2 is
    # (1/4pi) sin(2 eta) * (d theta/d eta) = (1/2pi) sin 2 eta
    theta = 2.0 * eta
    rhs = 2.0 * np.pi * (1.0 / (4.0 * np.pi)) * np.sin(theta) * romberg(
        lambda t: 2.0 * t, eta)
    dev = np.abs(lhs - rhs) / np.abs(rhs).max()
    dev_anti = np.abs(lhs_xi1 + rhs) / np.abs(rhs).max()  # d xi1 slot flips sign
    flux = float(np.trapezoid(np.sin(theta) / (4.0 * np.pi) * 2.0, eta
                              ) * 2.0 * np.pi)
    # extend flux over the full cap range for the unit check
    eta_full = np.linspace(0.0, np.pi / 2, 20001)
    flux = float(np.trapezoid(np.sin(2 * eta_full) / (4.0 * np.pi) * 2.0,
                              eta_full) * 2.0 * np.pi)
    return {"sup_deviation": float(max(dev.max(), dev_anti.max())),
            "base_flux": flux}


def contactomorphism_check(pos_map, rho, data: ClebschData, samples) -> float:
    """sup over samples of |pullback(omega o map) - rho omega| / |omega|.

    The pullback uses the finite-difference Jacobian of the map; rho must
    be nowhere zero on the samples."""
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    h = 1e-5
    worst = 0.0
    for p in pts:
        r = float(rho(*p))
        if abs(r) < 1e-12:
            raise ContactError(f"rho vanishes at {tuple(p)}")
        q = np.asarray(pos_map(*p), dtype=float)
        om_q = contact_form(data, q).omega
        jac = np.empty((3, 3))
        for j in range(3):
            dp = np.zeros(3)
            dp[j] = h
            qp = np.asarray(pos_map(*(p + dp)), dtype=float)
            qm = np.asarray(pos_map(*(p - dp)), dtype=float)
            jac[:, j] = (qp - qm) / (2 * h)
        pulled = jac.T @ om_q
        om_p = contact_form(data, p).omega
        scale = max(float(np.linalg.norm(om_p)), 1e-300)
        worst = max(worst, float(np.linalg.norm(pulled - r * om_p)) / scale)
    return worst


# -- helicity as a contact volume ------------------------------------------------


def helicity_contact(data: ClebschData, domain) -> float:
    """H = int omega ^ d omega.

    domain = GridSpec3: midpoint-rule quadrature of
    omega . (grad a1 x grad b1 + grad a2 x grad b2) over the periodic box;
    the sample lattice is offset by half a cell so coordinate-axis
    singularities of angular potentials are never hit.

    domain = "s3": exact Hopf-coordinate quadrature of the standard form,
    int cos^2+sin^2 weighted by sin 2 eta -> 4 pi^2 (raw value returned).
    """
    if isinstance(domain, str):
        if domain != "s3":
            raise ContactError(f"unknown domain {domain!r}")
        eta = np.linspace(0.0, np.pi / 2, 4001)
        # omega ^ d omega = sin 2 eta (cos^2 + sin^2) d xi1 ^ d eta ^ d xi2
        dens = np.sin(2.0 * eta)
        return float(np.trapezoid(dens, eta) * (2.0 * np.pi) ** 2)
    if not isinstance(domain, GridSpec3):
        raise ContactError("domain must be a GridSpec3 or 's3'")
    grid = domain
    hx, hy, hz = grid.spacing
    ax, ay, az = grid.axes()
    X, Y, Z = np.meshgrid(ax + hx / 2, ay + hy / 2, az + hz / 2,
                          indexing="ij")
    gphi = data.grad("phi", X, Y, Z)
    ga1 = data.grad("alpha1", X, Y, Z)
    gb1 = data.grad("beta1", X, Y, Z)
    a1 = np.asarray(data.alpha1(X, Y, Z), dtype=float)
    omega = gphi + a1 * gb1
    dom = np.cross(ga1, gb1, axis=0)
    if data.pairs == 2:
        ga2 = data.grad("alpha2", X, Y, Z)
        gb2 = data.grad("beta2", X, Y, Z)
        omega = omega + np.asarray(data.alpha2(X, Y, Z), dtype=float) * gb2
        dom = dom + np.cross(ga2, gb2, axis=0)
    dens = (omega * dom).sum(axis=0)
    if not np.all(np.isfinite(dens)):
        raise ContactError("density not finite on the quadrature lattice")
    return integrate(dens, grid)


def helicity_s3_normalized() -> float:
    """The raw S^3 value divided by (2 pi)^2 — the integer Hopf index of
    the fibration."""
    return helicity_contact(ClebschData(), "s3") / (2.0 * np.pi) ** 2


# -- canned Clebsch data ----------------------------------------------------------


def standard_r3_contact() -> ClebschData:
    """dz + x dy."""
    return ClebschData(
        phi=lambda x, y, z: z + 0.0 * x,
        alpha1=lambda x, y, z: x + 0.0 * z,
        beta1=lambda x, y, z: y + 0.0 * z,
        pairs=1,
    )


def hopfion_clebsch(scale: float = 1.0) -> ClebschData:
    """Clebsch potentials of the unit-Hopf vector potential in the
    stereographic chart, rescaled so the helicity is scale^2:

        A = d(xi2 / 2 pi) + (cos^2 eta / 2 pi) d(xi1 - xi2),

    with cos^2 eta = 4 (x^2 + y^2) / (1 + r^2)^2, xi1 = arg(x + i y),
    xi2 = arg(2 z + i (r^2 - 1)).  The angles are multivalued; their
    single-valued gradients are supplied analytically.
    """
    a = float(scale)
    if a <= 0:
        raise ContactError("scale must be positive")

    def r2(x, y, z):
        return (x * x + y * y + z * z) / (a * a)

    def xi2(x, y, z):
        return np.arctan2(r2(x, y, z) - 1.0, 2.0 * z / a)

    def grad_xi2(x, y, z):
        x, y, z = x / a, y / a, z / a
        u = x * x + y * y + z * z - 1.0
        v = 2.0 * z
        # d atan2(u, v) = (v du - u dv) / (u^2 + v^2); chain rule adds 1/a
        den = (u * u + v * v) * a
        gx = (v * 2.0 * x) / den
        gy = (v * 2.0 * y) / den
        gz = (v * 2.0 * z - u * 2.0) / den
        return np.stack(np.broadcast_arrays(gx, gy, gz))

    # potentials carry one factor of the scale so that B = curl A matches
    # the (1/a) B_0(x/a) field convention and the helicity comes out a^2
    def phi(x, y, z):
        return a * xi2(x, y, z) / (2.0 * np.pi)

    def grad_phi(x, y, z):
        return a * grad_xi2(x, y, z) / (2.0 * np.pi)

    def alpha1(x, y, z):
        xs, ys, zs = x / a, y / a, z / a
        r2v = xs * xs + ys * ys + zs * zs
        return a * 4.0 * (xs * xs + ys * ys) / ((1.0 + r2v) ** 2 * 2.0 * np.pi)

    def beta1(x, y, z):
        return np.arctan2(y, x) - xi2(x, y, z)

    def grad_beta1(x, y, z):
        rho2 = x * x + y * y
        g1 = np.stack(np.broadcast_arrays(-y / rho2, x / rho2, 0.0 * z))
        return g1 - grad_xi2(x, y, z)

    return ClebschData(phi=phi, alpha1=alpha1, beta1=beta1, pairs=1,
                       gradients={"phi": grad_phi, "beta1": grad_beta1})
