import numpy as np
import pytest

from conftest import random_solenoidal
from topofield.beltrami import (BeltramiError, build_beltrami_mode,
                                curl_spectrum, euler_steady_residual,
                                force_free_residual, gradient_flow_evolve,
                                induction_residual, lambda_1,
                                relax_to_minimizer)
from topofield.functionals import helicity_ab, magnetic_energy
from topofield.grids import GridSpec3, VectorField3
from topofield import spectral as sp


def test_mode_is_curl_eigenfield():
    g = GridSpec3.cube(16)
    for k, sign in (((1, 0, 0), 1), ((1, 1, 0), -1), ((2, 1, 1), 1)):
        v = build_beltrami_mode(k, sign, 1.0, g)
        kappa = sign * 2.0 * np.pi * np.linalg.norm(k) / g.lx
        c = sp.spectral_curl(v)
        assert np.abs(c.components - kappa * v.components).max() < 1e-12
        assert sp.spectral_divergence_max(v) < 1e-12


def test_mode_validation():
    g = GridSpec3.cube(8)
    with pytest.raises(BeltramiError):
        build_beltrami_mode((0, 0, 0), 1, 1.0, g)
    with pytest.raises(BeltramiError):
        build_beltrami_mode((1, 0, 0), 2, 1.0, g)
    with pytest.raises(BeltramiError):
        build_beltrami_mode((5, 0, 0), 1, 1.0, g)  # beyond Nyquist


def test_force_free_residual_fit():
    g = GridSpec3.cube(16)
    v = build_beltrami_mode((1, 1, 0), -1, 2.0, g)
    out = force_free_residual(v)
    assert np.isclose(out["kappa_fit"], -np.sqrt(2.0), rtol=1e-10)
    assert out["residual"] < 1e-10


def test_curl_spectrum_lowest_shells():
    g = GridSpec3.cube(16)
    shells = curl_spectrum(g, shell_max=3)
    assert np.isclose(abs(shells[0]["kappa"]), lambda_1(g))
    # |k|^2 = 1 has 6 lattice vectors, 3 independent complex modes per
    # sign; the stored multiplicity counts lattice vectors on the shell
    assert shells[0]["multiplicity"] == 6
    # entries come in +/- kappa pairs per shell
    assert shells[1]["shell"] == 1 and shells[1]["kappa"] < 0
    assert shells[2]["shell"] == 2


def test_gradient_flow_single_mode_growth():
    g = GridSpec3.cube(16)
    v = build_beltrami_mode((1, 0, 0), 1, 1.0, g)
    flow = gradient_flow_evolve(v, t_final=0.5, dt=1e-3, n_slices=3)
    grown = flow.slices[-1]
    ref = np.exp(0.5) * v.components
    assert np.abs(grown.components - ref).max() < 1e-9
    # decaying branch
    v2 = build_beltrami_mode((1, 0, 0), -1, 1.0, g)
    flow2 = gradient_flow_evolve(v2, t_final=0.5, dt=1e-3, n_slices=3)
    ref2 = np.exp(-0.5) * v2.components
    assert np.abs(flow2.slices[-1].components - ref2).max() < 1e-9


def test_relaxation_two_shell():
    g = GridSpec3.cube(16)
    v = build_beltrami_mode((1, 0, 0), 1, 1.0, g)
    w = build_beltrami_mode((1, 1, 0), 1, 0.7, g)
    mix = VectorField3(g, v.components + w.components, divergence_free=True)
    relaxed, trace = relax_to_minimizer(mix, tol=1e-10)
    energies = [row["energy"] for row in trace]
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(energies, energies[1:]))
    h = [row["helicity"] for row in trace]
    assert max(abs(x - h[0]) for x in h) < 1e-10 * abs(h[0])
    ratio = magnetic_energy(relaxed) / helicity_ab(relaxed)
    assert abs(ratio - lambda_1(g)) < 1e-8


def test_relaxation_rejects_zero_helicity():
    g = GridSpec3.cube(16)
    vp = build_beltrami_mode((1, 0, 0), +1, 1.0, g)
    vm = build_beltrami_mode((1, 0, 0), -1, 1.0, g)
    mix = VectorField3(g, vp.components + vm.components,
                       divergence_free=True)
    with pytest.raises(BeltramiError):
        relax_to_minimizer(mix)


def test_euler_steady_residual_on_beltrami():
    g = GridSpec3.cube(16)
    v = build_beltrami_mode((1, 1, 0), 1, 1.0, g)
    assert euler_steady_residual(v) < 1e-10
    rng = np.random.default_rng(2)
    u = random_solenoidal(g, rng)
    assert euler_steady_residual(u) > 1e-3  # generic fields are not steady


def test_induction_residual_static_aligned():
    # v = B Beltrami: v x B = 0, so a static series is an exact solution
    g = GridSpec3.cube(16)
    v = build_beltrami_mode((1, 0, 0), 1, 1.0, g)
    series = [VectorField3(g, v.components.copy()) for _ in range(5)]
    out = induction_residual(series, series, dt=0.01)
    assert out["induction"] < 1e-10
    # static Clebsch scalars: the flux-preservation right-hand side is
    # zero and so is v x B for an aligned flow
    zero = lambda X, Y, Z: np.zeros_like(X)
    fx = build_beltrami_mode((0, 0, 1), 1, 1.0, g)
    fs = [VectorField3(g, fx.components.copy()) for _ in range(3)]
    out2 = induction_residual(fs, fs, dt=0.01,
                              clebsch=(zero, zero, zero, zero))
    assert out2["clebsch"] < 1e-10
