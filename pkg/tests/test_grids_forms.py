import numpy as np
import pytest

from topofield.forms4 import (FourForm2, Signature, assemble_asd, from_eb,
                              hodge3_project, hodge_star, is_anti_self_dual,
                              sd_asd_split, to_eb)
from topofield.grids import (GridError, GridSpec3, ScalarField3, VectorField3,
                             curl, divergence, dot, exterior_derivative,
                             gradient, integrate)


def test_grid_validation():
    with pytest.raises(GridError):
        GridSpec3(3, 8, 8)
    with pytest.raises(GridError):
        GridSpec3(8, 8, 8, lx=-1.0)
    g = GridSpec3.cube(8, 4.0, centered=True)
    assert g.origin == (-2.0, -2.0, -2.0)
    assert g.spacing == (0.5, 0.5, 0.5)
    assert np.isclose(g.cell_volume, 0.125)


def test_integrate_trig_exact():
    g = GridSpec3.cube(16)
    f = ScalarField3.from_closure(g, lambda x, y, z: np.sin(x) ** 2)
    # periodic rectangle rule is exact for band-limited integrands
    assert abs(integrate(f) - 0.5 * (2 * np.pi) ** 3) < 1e-10


def test_vector_calculus_identities():
    g = GridSpec3.cube(24)
    f = ScalarField3.from_closure(
        g, lambda x, y, z: np.sin(x) * np.cos(2 * y) + np.cos(z))
    v = VectorField3.from_closure(
        g, lambda x, y, z: (np.sin(y), np.cos(z), np.sin(x) * np.cos(y)))
    # div curl = 0 and curl grad = 0 hold exactly for commuting stencils
    assert np.abs(divergence(curl(v)).samples).max() < 1e-12
    assert curl(gradient(f)).norm_sup() < 1e-12


def test_fd_accuracy_order2():
    errs = []
    for n in (16, 32, 64):
        g = GridSpec3.cube(n)
        f = ScalarField3.from_closure(g, lambda x, y, z: np.sin(x) * np.cos(y))
        gx = gradient(f)
        exact = VectorField3.from_closure(
            g, lambda x, y, z: (np.cos(x) * np.cos(y),
                                -np.sin(x) * np.sin(y),
                                np.zeros_like(x)))
        errs.append(np.abs(gx.components - exact.components).max())
    order = np.polyfit(np.log([16, 32, 64]), np.log(errs), 1)[0]
    assert -2.3 < order < -1.8


def test_exterior_derivative_dispatch():
    g = GridSpec3.cube(16)
    f = ScalarField3.from_closure(g, lambda x, y, z: np.sin(x + y))
    v = VectorField3.from_closure(
        g, lambda x, y, z: (np.sin(y), np.cos(z), np.cos(x)))
    assert np.allclose(exterior_derivative(f, 0).components,
                       gradient(f).components)
    assert np.allclose(exterior_derivative(v, 1).components,
                       curl(v).components)
    assert np.allclose(exterior_derivative(v, 2).samples,
                       divergence(v).samples)
    with pytest.raises(GridError):
        exterior_derivative(v, 3)


def test_hodge_star_involution():
    rng = np.random.default_rng(7)
    comps = tuple(rng.standard_normal(6))
    for sig, expected in ((Signature.MINKOWSKI, -1.0),
                          (Signature.EUCLIDEAN, 1.0)):
        F = FourForm2(comps, signature=sig)
        FF = hodge_star(hodge_star(F))
        assert np.allclose(FF.components,
                           expected * np.array(F.components), atol=1e-14)


def test_sd_asd_split_euclidean():
    rng = np.random.default_rng(11)
    F = FourForm2(tuple(rng.standard_normal(6)),
                  signature=Signature.EUCLIDEAN)
    P, M = sd_asd_split(F)
    assert np.allclose(np.array(P.components) + np.array(M.components),
                       np.array(F.components))
    # +/- eigenvectors of the star
    assert np.allclose(hodge_star(P).components, P.components)
    assert np.allclose(hodge_star(M).components,
                       -np.array(M.components))


def test_asd_from_opposite_fields():
    E = np.array([1.0, -2.0, 0.5])
    F = from_eb(E, -E, signature=Signature.EUCLIDEAN)
    assert is_anti_self_dual(F, tol=1e-14)
    F2 = assemble_asd(E, signature=Signature.EUCLIDEAN)
    assert is_anti_self_dual(F2, tol=1e-14)


def test_eb_roundtrip_and_projection():
    E = np.array([0.3, 1.1, -0.7])
    B = np.array([-1.0, 0.2, 0.9])
    F = from_eb(E, B)
    E2, B2 = to_eb(F)
    assert np.allclose(E2, E) and np.allclose(B2, B)
    phi, star3 = hodge3_project(F)
    assert np.allclose(phi, E) and np.allclose(star3, phi)


def test_array_valued_form():
    E = np.ones((5,))
    F = from_eb(np.stack([E, 2 * E, 0 * E]), np.stack([-E, -2 * E, 0 * E]),
                signature=Signature.EUCLIDEAN)
    assert is_anti_self_dual(F, tol=1e-14)


def test_dot_integrate_consistency():
    g = GridSpec3.cube(16)
    u = VectorField3.from_closure(
        g, lambda x, y, z: (np.sin(x), np.zeros_like(x), np.zeros_like(x)))
    assert abs(integrate(dot(u, u)) - 0.5 * (2 * np.pi) ** 3) < 1e-10
