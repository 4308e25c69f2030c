import numpy as np
import pytest

from topofield import em
from topofield.em import (EMField, FieldError, Hemisphere, MonopolePatch,
                          asd_check_31, build_dyon_pair, build_hopfion,
                          duality_rotate, frame_velocity, hopf_map,
                          hopf_map_dual, hopfion_b_closure, hopfion_e_closure,
                          instanton_profile, lorentz_boost_eb,
                          maxwell_divergence_residuals, monopole_flux,
                          monopole_potential, null_residuals,
                          pullback_b_closure, quasirandom_points, rs_vector)
from topofield.grids import GridSpec3, VectorField3
from topofield import beltrami


def _grid(n=24, box=12.0):
    return GridSpec3.cube(n, box, centered=True)


def test_hopfion_closed_form_matches_pullback():
    # closed rational form against the finite-difference pullback recipe
    recipe = pullback_b_closure(hopf_map)
    direct = hopfion_b_closure(1.0)
    pts = quasirandom_points(_grid(), 50)
    X, Y, Z = pts.T
    got = np.array(recipe(X, Y, Z))
    ref = np.array(direct(X, Y, Z))
    assert np.abs(got - ref).max() < 1e-7


def test_hopfion_null_and_divergence_free():
    f = build_hopfion(_grid(), scale=1.0)
    dotmax, normmax, degenerate = null_residuals(f)
    assert not degenerate
    assert dotmax < 1e-12 and normmax < 1e-12
    # the divergence residual is truncation-limited (the analytic field
    # is not periodic); it must shrink as the box resolves the core
    coarse = maxwell_divergence_residuals(f)
    fine = maxwell_divergence_residuals(build_hopfion(
        GridSpec3.cube(48, 12.0, centered=True), scale=1.0))
    assert fine[0] < 0.5 * coarse[0] and fine[1] < 0.5 * coarse[1]
    assert fine[0] < 0.15 and fine[1] < 0.15


def test_null_degeneracy_flag():
    g = _grid(8, 4.0)
    b = VectorField3.from_closure(
        g, lambda x, y, z: (np.zeros_like(x), np.zeros_like(x),
                            np.ones_like(x)))
    f = EMField(g, VectorField3.zeros(g), b)
    _, _, degenerate = null_residuals(f)
    assert degenerate


def test_rs_vector_null():
    f = build_hopfion(_grid(), scale=1.0)
    z, z2 = rs_vector(f, (0.3, -0.2, 0.4))
    assert abs(z2) < 1e-12 * float(np.abs(z) @ np.abs(z))


def test_duality_rotation_preserves_invariants():
    f = build_hopfion(_grid(16, 8.0), scale=1.0)
    g = duality_rotate(f)
    e2b2 = (f.E.components**2 + f.B.components**2).sum()
    e2b2r = (g.E.components**2 + g.B.components**2).sum()
    assert np.isclose(e2b2, e2b2r, rtol=1e-12)
    dotmax, normmax, _ = null_residuals(g)
    assert dotmax < 1e-12 and normmax < 1e-12


def test_dyon_pair_mixed_products_vanish():
    g = _grid(8, 6.0)
    pair = build_dyon_pair(hopf_map, hopf_map_dual, g)
    pts = quasirandom_points(g, 30)
    mt, mp = pair.mixed_products(pts)
    scale = max(np.abs(mt).max(), np.abs(mp).max(), 1.0)
    assert np.abs(mt).max() < 1e-6 * max(scale, 1.0)
    assert np.abs(mp).max() < 1e-6 * max(scale, 1.0)


def test_instanton_profile_shapes():
    # both representations peak at the origin and decay
    for rep in ("r4", "tube"):
        v0 = instanton_profile(0.0, rep)
        v2 = instanton_profile(2.0, rep)
        assert np.isfinite(v0) and np.isfinite(v2)
        assert v0 > v2 > 0.0
    with pytest.raises(FieldError):
        instanton_profile(1.0, "nope")


def test_frame_velocity_branches():
    # null pair: both branches at light speed
    out = frame_velocity([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    assert out["null"]
    assert abs(np.linalg.norm(out["v_minus"]) - 1.0) < 1e-12
    # parallel pair: no boost needed
    out = frame_velocity([0.0, 0.0, 2.0], [0.0, 0.0, -3.0])
    assert out["parallel"]
    assert np.linalg.norm(out["v_minus"]) == 0.0
    with pytest.raises(FieldError):
        frame_velocity([0.0, 0.0, 0.0], [0.0, 0.0, 0.0])


def test_boost_preserves_lorentz_invariants():
    rng = np.random.default_rng(3)
    for _ in range(20):
        E, B = rng.standard_normal(3), rng.standard_normal(3)
        v = 0.6 * rng.standard_normal(3) / 3.0
        E2, B2 = lorentz_boost_eb(E, B, v)
        assert np.isclose(E2 @ B2, E @ B, atol=1e-12)
        assert np.isclose(E2 @ E2 - B2 @ B2, E @ E - B @ B, atol=1e-12)
    with pytest.raises(FieldError):
        lorentz_boost_eb(E, B, [1.0, 0.0, 0.0])


def test_asd_residual_on_gradient_flow_slices():
    g = GridSpec3.cube(16)
    mode = beltrami.build_beltrami_mode((1, 0, 0), +1, 1.0, g)
    kappa = 1.0
    dt = 1e-3
    series = [VectorField3(g, np.exp(kappa * i * dt) * mode.components)
              for i in range(5)]
    # dA/dt = kappa A = curl A on the eigenfield, up to O(dt^2) and the
    # O(h^2) spatial stencil (k^2 h^2 / 6 ~ 0.026 at n = 16)
    h = g.spacing[0]
    assert asd_check_31(series, dt) < h * h / 4.0
    with pytest.raises(FieldError):
        asd_check_31(series[:2], dt)


def test_monopole_patch_overlap_and_axis():
    north = MonopolePatch(Hemisphere.NORTH)
    south = MonopolePatch(Hemisphere.SOUTH)
    p = (0.3, 0.5, 0.2)
    an = monopole_potential(north, p)
    a_s = monopole_potential(south, p)
    # on the overlap the two potentials differ by the gauge gradient of
    # phi/2pi: cartesian difference must be tangent to d(phi), and the
    # dphi coefficients differ by exactly 1/2pi per unit charge
    assert np.isclose(an["dphi_coefficient"] - a_s["dphi_coefficient"],
                      1.0 / (2.0 * np.pi))
    with pytest.raises(FieldError):
        monopole_potential(north, (0.0, 0.0, -1.0))
    with pytest.raises(FieldError):
        monopole_potential(south, (0.0, 0.0, 1.0))


def test_monopole_flux_charge_scaling():
    out = monopole_flux(resolution=32, charge=2.5)
    assert abs(out["stokes"] - 2.5) < 1e-10
    assert abs(out["direct"] - 2.5) < 1e-6
    with pytest.raises(FieldError):
        monopole_flux(resolution=8)


def test_hopfion_scale_family():
    # the one-parameter family B_a(x) = a^-1 B_1(x/a) at a sample point
    a = 2.0
    b1 = np.array(hopfion_b_closure(1.0)(0.4 / a, -0.3 / a, 0.7 / a))
    ba = np.array(hopfion_b_closure(a)(0.4, -0.3, 0.7))
    assert np.allclose(ba, b1 / a, rtol=1e-13)
