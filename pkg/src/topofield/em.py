"""Field constructors and pointwise electromagnetic diagnostics.

The Hopfion is built from pullbacks of the normalized area form on S^2
through a pair of Hopf-type maps: the magnetic map is the stereographic
lift of R^3 to the unit 3-sphere composed with z0/z1, the electric map is
the same construction with the coordinate axes cyclically rotated.  Both
closed forms are hard-coded (they are low-order rational functions), so
null residuals are testable below any grid error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .forms4 import Signature
from .grids import GridSpec3, VectorField3, divergence

C_LIGHT = 1.0  # natural units; carried symbolically only by frame_velocity


class FieldError(ValueError):
    pass


@dataclass
class EMField:
    """Paired electric/magnetic fields with optional analytic closures."""

    grid: GridSpec3
    E: VectorField3
    B: VectorField3
    signature: Signature = Signature.MINKOWSKI
    scale: float = 1.0
    kind: str = "generic"

    def __post_init__(self):
        if self.E.grid != self.grid or self.B.grid != self.grid:
            raise FieldError("E and B must share the EMField grid")
        if not self.scale > 0:
            raise FieldError("normalization scale must be positive")

    def eval_eb(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.E.evaluate(points), self.B.evaluate(points)


# -- Hopfion ------------------------------------------------------------------

_CYC = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])


def _hopf_b(x, y, z):
    """Magnetic recipe: (i/2pi) grad(m) x grad(conj m) / (1+|m|^2)^2 for
    m = 2(x+iy)/(2z + i(r^2-1)), reduced to its closed rational form."""
    r2 = x * x + y * y + z * z
    den = np.pi * (1.0 + r2) ** 3
    return (
        8.0 * (x * z - y) / den,
        8.0 * (x + y * z) / den,
        4.0 * (1.0 - x * x - y * y + z * z) / den,
    )


def _hopf_e(x, y, z):
    """Electric recipe: magnetic recipe of the cyclically rotated map."""
    bx, by, bz = _hopf_b(y, z, x)  # field of m o R at R p, rotated frame
    return bz, bx, by  # R^T applied to (bx', by', bz')


def hopfion_b_closure(scale: float, mirror: bool = False) -> Callable:
    def fn(X, Y, Z):
        s = -1.0 if mirror else 1.0
        bx, by, bz = _hopf_b(X / scale, Y / scale, s * Z / scale)
        return (s * bx / scale, s * by / scale, bz / scale)

    return fn


def hopfion_e_closure(scale: float, mirror: bool = False) -> Callable:
    def fn(X, Y, Z):
        s = -1.0 if mirror else 1.0
        ex, ey, ez = _hopf_e(X / scale, Y / scale, s * Z / scale)
        return (s * ex / scale, s * ey / scale, ez / scale)

    return fn


def build_hopfion(grid: GridSpec3, scale: float = 1.0, mirror: bool = False) -> EMField:
    """Null electromagnetic Hopfion; every pair of B-lines (and of E-lines)
    links once.  Amplitude carries 1/scale so that the helicity of each
    field equals scale^2 (flux through the target sphere stays 1)."""
    if not scale > 0:
        raise FieldError(f"hopfion scale must be positive, got {scale}")
    E = VectorField3.from_closure(grid, hopfion_e_closure(scale, mirror))
    B = VectorField3.from_closure(grid, hopfion_b_closure(scale, mirror))
    return EMField(grid, E, B, Signature.MINKOWSKI, scale=scale,
                   kind="hopfion" + ("-mirror" if mirror else ""))


# -- dyon pair ----------------------------------------------------------------


def pullback_b_closure(cmap: Callable) -> Callable:
    """Numerical magnetic recipe (i/2pi) grad(m) x grad(conj m)/(1+|m|^2)^2
    for an arbitrary complex map, gradients by Richardson central
    differences of the closure.

    The recipe is exactly invariant under m -> 1/m, so samples where
    |m| > 1 (including poles of the map) are evaluated through the
    inverted chart, which is regular there.
    """

    def recipe(f, X, Y, Z, h=1e-5):
        g = []
        for d in range(3):
            off = np.zeros(3)
            off[d] = 1.0

            def ev(s, k):
                return f(X + s * k * off[0], Y + s * k * off[1],
                         Z + s * k * off[2])

            d1 = (ev(1, h) - ev(-1, h)) / (2 * h)
            d2 = (ev(1, 2 * h) - ev(-1, 2 * h)) / (4 * h)
            g.append((4.0 * d1 - d2) / 3.0)
        m = f(X, Y, Z)
        # exact-zero denominators of rational maps poison the center
        # sample only; the stencil average restores it to O(h^2)
        bad = ~np.isfinite(m)
        if np.any(bad):
            acc = np.zeros_like(m)
            for d in range(3):
                off = np.zeros(3)
                off[d] = h
                acc = acc + f(X + off[0], Y + off[1], Z + off[2])
                acc = acc + f(X - off[0], Y - off[1], Z - off[2])
            m = np.where(bad, acc / 6.0, m)
        gb = [np.conj(gi) for gi in g]
        cx = g[1] * gb[2] - g[2] * gb[1]
        cy = g[2] * gb[0] - g[0] * gb[2]
        cz = g[0] * gb[1] - g[1] * gb[0]
        pref = 1j / (2.0 * np.pi * (1.0 + np.abs(m) ** 2) ** 2)
        return np.stack([np.real(pref * cx), np.real(pref * cy),
                         np.real(pref * cz)])

    def inv(X, Y, Z):
        return 1.0 / cmap(X, Y, Z)

    def fn(X, Y, Z):
        with np.errstate(divide="ignore", invalid="ignore"):
            m = cmap(X, Y, Z)
            direct = recipe(cmap, X, Y, Z)
            inverted = recipe(inv, X, Y, Z)
        use_inv = ~np.isfinite(m) | (np.abs(m) > 1.0)
        out = np.where(use_inv[None], inverted, direct)
        if not np.all(np.isfinite(out)):
            raise FieldError("complex map irregular in both charts at "
                             "sample points")
        return out[0], out[1], out[2]

    return fn


def pullback_e_closure(cmap: Callable) -> Callable:
    """Electric recipe: magnetic recipe of the map with cyclically rotated
    arguments, rotated back to the original frame."""
    b_of_rot = pullback_b_closure(lambda X, Y, Z: cmap(Y, Z, X))

    def fn(X, Y, Z):
        bx, by, bz = b_of_rot(Y, Z, X)
        # undo the frame rotation: (x,y,z) components from (y,z,x) ones
        return bz, bx, by

    return fn


@dataclass
class DyonPair:
    """Paired Clebsch maps and the four derived fields B(theta), E(theta),
    B(phi), E(phi).  Ranada's cross-duality B(theta) = -E(phi),
    B(phi) = E(theta) holds on dual map pairs (verified, not imposed)."""

    grid: GridSpec3
    b_theta: VectorField3
    e_theta: VectorField3
    b_phi: VectorField3
    e_phi: VectorField3

    def mixed_products(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        bt = self.b_theta.evaluate(points)
        et = self.e_theta.evaluate(points)
        bp = self.b_phi.evaluate(points)
        ep = self.e_phi.evaluate(points)
        return (bt * et).sum(axis=1), (bp * ep).sum(axis=1)


def build_dyon_pair(theta: Callable, phi: Callable, grid: GridSpec3) -> DyonPair:
    return DyonPair(
        grid,
        b_theta=VectorField3.from_closure(grid, pullback_b_closure(theta)),
        e_theta=VectorField3.from_closure(grid, pullback_e_closure(theta)),
        b_phi=VectorField3.from_closure(grid, pullback_b_closure(phi)),
        e_phi=VectorField3.from_closure(grid, pullback_e_closure(phi)),
    )


def hopf_map(X, Y, Z):
    """z0/z1 composed with the inverse stereographic lift of R^3 to S^3."""
    r2 = X * X + Y * Y + Z * Z
    return 2.0 * (X + 1j * Y) / (2.0 * Z + 1j * (r2 - 1.0))


def hopf_map_dual(X, Y, Z):
    return hopf_map(Y, Z, X)


# -- pointwise diagnostics ----------------------------------------------------


def rs_vector(f: EMField, point) -> tuple[np.ndarray, complex]:
    """Riemann-Silberstein vector z = E + iB at a point, plus sum(z_a^2)
    whose vanishing characterizes null fields."""
    p = np.atleast_2d(np.asarray(point, dtype=float))
    E, B = f.eval_eb(p)
    z = E[0] + 1j * B[0]
    return z, complex((z * z).sum())


def null_residuals(f: EMField, points: Optional[np.ndarray] = None,
                   ) -> tuple[float, float, bool]:
    """Sup over points of normalized |E.B| and normalized ||E|^2 - |B|^2|.

    Returns (dot_residual, norm_residual, degenerate); degenerate flags a
    field with |E| = |B| = 0 at every probe.
    """
    if points is None:
        points = _grid_points(f.grid)
    E, B = f.eval_eb(points)
    e2 = (E * E).sum(axis=1)
    b2 = (B * B).sum(axis=1)
    # a field with E or B identically zero cannot be tested for nullness
    degenerate = bool(e2.max() == 0.0 or b2.max() == 0.0)
    denom = e2 * b2
    live = denom > 0
    dot = (float((np.abs((E * B).sum(axis=1))[live]
                  / np.sqrt(denom[live])).max()) if live.any() else 0.0)
    total = e2 + b2
    nz = total > 0
    norm = (float((np.abs(e2 - b2)[nz] / total[nz]).max()) if nz.any()
            else 0.0)
    return dot, norm, degenerate


def _grid_points(grid: GridSpec3) -> np.ndarray:
    X, Y, Z = grid.meshgrid()
    return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)


def quasirandom_points(grid: GridSpec3, n: int) -> np.ndarray:
    """Deterministic low-discrepancy points in the box (additive lattice)."""
    alpha = np.array([0.8191725133961645, 0.6710436067037893, 0.5497004779019703])
    u = (np.arange(1, n + 1)[:, None] * alpha) % 1.0
    o = np.array(grid.origin)
    L = np.array(grid.lengths)
    return o + u * L


def duality_rotate(f: EMField) -> EMField:
    """Quarter-turn in the duality plane: (E, B) -> (-B, E)."""
    E2 = VectorField3(f.grid, -f.B.components,
                      closure=_neg_closure(f.B.closure))
    B2 = VectorField3(f.grid, f.E.components.copy(), closure=f.E.closure)
    return EMField(f.grid, E2, B2, f.signature, f.scale, kind=f.kind)


def _neg_closure(fn):
    if fn is None:
        return None
    return lambda X, Y, Z: tuple(-c for c in fn(X, Y, Z))


def maxwell_divergence_residuals(f: EMField) -> tuple[float, float]:
    """Normalized sup-norms of div B and div E on the sample grid."""
    out = []
    for v in (f.E, f.B):
        d = divergence(v)
        scale = v.norm_sup()
        out.append(float(np.abs(d.samples).max()) / scale if scale > 0 else 0.0)
    return out[0], out[1]  # (div E, div B), normalized by sup|field|


def instanton_profile(x: float, representation: str = "r4") -> float:
    """1-instanton field-strength profile: 1/(1+r^2)^2 on R^4 or
    4/cosh^2(t) on the tube S^3 x R."""
    rep = representation.lower()
    if rep == "r4":
        return 1.0 / (1.0 + x * x) ** 2
    if rep == "tube":
        return 4.0 / np.cosh(x) ** 2
    raise FieldError(f"unknown representation {representation!r}; use r4|tube")


# -- frame velocity and the boost oracle -------------------------------------


def frame_velocity(E, B) -> dict:
    """Drift velocities that align E and B, both sign branches.

    For a null pair (|E| = |B|, E.B = 0) both branches coincide at |v| = c
    and the parallel frame is unattainable.  If E x B = 0 the fields are
    already parallel and v = 0.
    """
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    e2 = float(E @ E)
    b2 = float(B @ B)
    if e2 == 0.0 and b2 == 0.0:
        raise FieldError("frame velocity undefined for E = B = 0")
    S = np.cross(E, B)
    s2 = float(S @ S)  # = e2*b2 - (E.B)^2
    if s2 == 0.0:
        z = np.zeros(3)
        return {"v_minus": z, "v_plus": z.copy(), "null": False, "parallel": True}
    smag = np.sqrt(s2)
    disc = (e2 - b2) ** 2 + 4.0 * float(E @ B) ** 2
    root = np.sqrt(disc) / (e2 + b2)
    base = C_LIGHT * 0.5 * (e2 + b2) / smag
    vm = base * (1.0 - root) * S / smag
    vp = base * (1.0 + root) * S / smag
    null = disc == 0.0 or root < 1e-15
    return {"v_minus": vm, "v_plus": vp, "null": bool(null), "parallel": False}


def lorentz_boost_eb(E, B, v) -> tuple[np.ndarray, np.ndarray]:
    """Standard field transformation to a frame moving with velocity v
    (c = 1); independent oracle for frame_velocity."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    v = np.asarray(v, dtype=float)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise FieldError("boost velocity must satisfy |v| < c")
    if v2 == 0.0:
        return E.copy(), B.copy()
    g = 1.0 / np.sqrt(1.0 - v2)
    Ep = g * (E + np.cross(v, B)) - (g - 1.0) * (v @ E) * v / v2
    Bp = g * (B - np.cross(v, E)) - (g - 1.0) * (v @ B) * v / v2
    return Ep, Bp


# -- 3+1 anti-self-duality check ----------------------------------------------


def asd_check_31(a_series: list[VectorField3], dt: float) -> float:
    """Sup-norm of dA/dt - curl A over interior time slices; vanishes on an
    anti-self-dual (gradient-flow) trajectory."""
    if len(a_series) < 3:
        raise FieldError("need at least 3 time slices for centered differencing")
    from .grids import curl as _curl

    worst = 0.0
    for i in range(1, len(a_series) - 1):
        adot = (a_series[i + 1].components - a_series[i - 1].components) / (2 * dt)
        c = _curl(a_series[i]).components
        worst = max(worst, float(np.abs(adot - c).max()))
    return worst


# -- Dirac monopole patches ---------------------------------------------------


class Hemisphere(Enum):
    NORTH = "north"
    SOUTH = "south"


@dataclass(frozen=True)
class MonopolePatch:
    """One of the two Dirac-monopole gauge patches on S^2.

    The north patch potential A+ is finite except on the negative z axis,
    the south patch A- except on the positive z axis; dA_pm both equal the
    unit-flux form (1/4pi) sin(theta) dtheta ^ dphi on their domains.
    """

    hemisphere: Hemisphere
    charge: float = 1.0

    @property
    def sign(self) -> float:
        return 1.0 if self.hemisphere is Hemisphere.NORTH else -1.0


def monopole_potential(patch: MonopolePatch, point, axis_tol: float = 1e-12,
                       ) -> dict:
    """Evaluate the patch potential at a Cartesian point.

    Returns both the Cartesian 1-form components of
    A_pm = (1/4pi r)(x dy - y dx)/(z pm r) and the spherical phi-component
    per A_pm = (1/4pi)(pm 1 - cos theta) dphi; the two agree on overlap.
    """
    x, y, z = (float(c) for c in np.asarray(point, dtype=float))
    r = np.sqrt(x * x + y * y + z * z)
    # the north potential is singular where z + r -> 0 (negative z axis),
    # the south one where z - r -> 0 (positive z axis)
    if r == 0.0 or abs(z + patch.sign * r) < axis_tol * r:
        raise FieldError(
            f"point {point} lies on the singular axis of the "
            f"{patch.hemisphere.value} patch"
        )
    denom = 4.0 * np.pi * r * (z + patch.sign * r)
    q = patch.charge
    cart = q * np.array([-y / denom, x / denom, 0.0])
    cos_t = z / r
    a_phi = q * (patch.sign - cos_t) / (4.0 * np.pi)  # coefficient of dphi
    return {"cartesian": cart, "dphi_coefficient": a_phi, "radius": r}


def monopole_flux(resolution: int = 256, charge: float = 1.0) -> dict:
    """Total flux through S^2 two ways: the Stokes two-patch route
    (equator circulation of A+ minus A-) and direct quadrature of
    (1/4pi) sin(theta) dtheta dphi."""
    if resolution < 16:
        raise FieldError("need at least 16 quadrature points per circle")
    north = MonopolePatch(Hemisphere.NORTH, charge)
    south = MonopolePatch(Hemisphere.SOUTH, charge)
    # equator circulation: integral of a_phi dphi = 2 pi a_phi (constant there)
    phis = 2.0 * np.pi * (np.arange(resolution) + 0.5) / resolution
    dphi = 2.0 * np.pi / resolution
    circ = {p: 0.0 for p in ("north", "south")}
    for name, patch in (("north", north), ("south", south)):
        for phi in phis:
            pt = (np.cos(phi), np.sin(phi), 0.0)
            circ[name] += monopole_potential(patch, pt)["dphi_coefficient"] * dphi
    stokes = circ["north"] - circ["south"]

    # direct route: quadrature of (curl A) . n over the unit sphere, with
    # the curl taken by Richardson finite differences of the patch
    # potential that is regular on each hemisphere; Gauss-Legendre in
    # cos(theta) x midpoint in phi
    def a_cart(sign, x, y, z):
        r = np.sqrt(x * x + y * y + z * z)
        f = charge / (4.0 * np.pi * r * (z + sign * r))
        return np.stack([-y * f, x * f, np.zeros_like(f)])

    def curl_fd(sign, x, y, z, h=1e-5):
        def d(axis, step):
            dx = step if axis == 0 else 0.0
            dy = step if axis == 1 else 0.0
            dz = step if axis == 2 else 0.0
            return (a_cart(sign, x + dx, y + dy, z + dz)
                    - a_cart(sign, x - dx, y - dy, z - dz)) / (2.0 * step)

        g = [(4.0 * d(ax, h) - d(ax, 2.0 * h)) / 3.0 for ax in range(3)]
        return np.stack([g[1][2] - g[2][1], g[2][0] - g[0][2],
                         g[0][1] - g[1][0]])

    from numpy.polynomial.legendre import leggauss

    nodes, weights = leggauss(resolution)
    phis_m = 2.0 * np.pi * (np.arange(resolution) + 0.5) / resolution
    U, PHI = np.meshgrid(nodes, phis_m, indexing="ij")
    W = np.broadcast_to(weights[:, None], U.shape) * (2.0 * np.pi / resolution)
    st = np.sqrt(1.0 - U**2)
    X, Y, Z = st * np.cos(PHI), st * np.sin(PHI), U
    direct = 0.0
    for sign, mask in ((+1, U >= 0.0), (-1, U < 0.0)):
        b = curl_fd(sign, X[mask], Y[mask], Z[mask])
        bn = b[0] * X[mask] + b[1] * Y[mask] + b[2] * Z[mask]
        direct += float((bn * W[mask]).sum())
    return {"stokes": float(stokes), "direct": direct}
