import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from exclusionlab import (LONG_JUMP, NEAREST_NEIGHBOR, correlation_ode,
                          correlation_steady_state, discrete_profile_ode,
                          fractional_generator_ode, kernel_laplacian_check,
                          long_jump_params, longjump_profile_ode,
                          nearest_neighbor_params, phi_ss, reaction_diffusion_fd,
                          reaction_exact, regime_dispatch, stationary_profile_ode,
                          wedge_sites)
from exclusionlab import UnsupportedRegimeError, build_kernel
from exclusionlab.params import (InitialProfile, bump_profile, constant_profile,
                                 step_profile)
from exclusionlab.pde import dispatch_params
from exclusionlab.spectral import heat_dirichlet_spectral


def test_profile_ode_constant_at_equilibrium():
    p = nearest_neighbor_params(16, 0.4, 0.4, 1.0, 1.0)
    out = discrete_profile_ode(p, constant_profile(0.4), [0.0, 0.1, 1.0])
    np.testing.assert_allclose(out, 0.4, atol=1e-12)


def test_profile_ode_fixed_point_constant_in_time():
    p = nearest_neighbor_params(32, 0.1, 0.9, 2.0, 1.0)
    from exclusionlab import ab_coefficients
    a, b = ab_coefficients(p)
    g = InitialProfile(lambda q: a * q * 32 + b, "affine-fixed-point")
    out = discrete_profile_ode(p, g, [0.05, 0.7])
    target = a * np.arange(1, 32) + b
    np.testing.assert_allclose(out[0], target, atol=1e-10)
    np.testing.assert_allclose(out[1], target, atol=1e-10)


def test_profile_ode_converges_to_dirichlet_solution():
    N = 128
    p = nearest_neighbor_params(N, 0.2, 0.8, 1.0, 0.0)
    g = step_profile(0.2, 0.8)
    t = 0.05
    ode = discrete_profile_ode(p, g, t)
    spectral = heat_dirichlet_spectral(g, t, p.site_positions(), 0.2, 0.8)
    assert np.abs(ode - spectral).max() <= 0.01


def test_profile_ode_agrees_with_radau_path():
    # same system through the stiff integrator used beyond the expm cut
    p = nearest_neighbor_params(24, 0.1, 0.6, 1.0, 1.0)
    g = step_profile(0.3, 0.7)
    times = [0.03, 0.12]
    dense = discrete_profile_ode(p, g, times)
    from exclusionlab.operators import profile_generator
    A, b = profile_generator(p)
    sol = solve_ivp(lambda _, u: A @ u + b, (0, times[-1]), g.on_lattice(24),
                    t_eval=times, method="Radau", rtol=1e-10, atol=1e-12,
                    jac=lambda *_: A)
    np.testing.assert_allclose(dense, sol.y.T, atol=5e-8)


def test_correlation_ode_zero_without_gradient():
    p = nearest_neighbor_params(10, 0.5, 0.5, 1.0, 1.0)
    phi0 = np.zeros(len(wedge_sites(10)))
    out = correlation_ode(p, phi0, constant_profile(0.5), [0.02, 0.2])
    assert np.abs(out).max() <= 1e-12


@pytest.mark.parametrize("theta", [0.0, 1.0, 2.0])
def test_correlation_steady_state_matches_closed_form(theta):
    p = nearest_neighbor_params(48, 0.0, 1.0, 1.0, theta)
    phi = correlation_steady_state(p)
    target = np.array([phi_ss(x, y, p) for x, y in wedge_sites(48)])
    assert np.abs(phi - target).max() <= 1e-10


def test_correlation_trajectory_bound_robin_scale():
    # sup_t max |phi_t| <= C / N with stable C across sizes at theta = 1
    Cs = []
    for N in (25, 50, 100):
        p = nearest_neighbor_params(N, 0.0, 1.0, 1.0, 1.0)
        phi0 = np.zeros(len(wedge_sites(N)))
        times = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0]
        path = correlation_ode(p, phi0, step_profile(0.2, 0.8), times)
        Cs.append(np.abs(path).max() * N)
    assert max(Cs) / min(Cs) <= 1.6
    assert max(Cs) <= 2.0


def test_reaction_exact_identity_and_examples():
    g = constant_profile(0.0)
    grid = np.array([0.25, 0.5, 0.75])
    np.testing.assert_allclose(reaction_exact(g, 1.0, 1.5, 0.2, 0.8, 0.0, grid),
                               0.0, atol=0)
    flat = reaction_exact(constant_profile(0.4), 2.0, 3.0, 0.4, 0.4, 0.7, grid)
    np.testing.assert_allclose(flat, 0.4, atol=1e-14)
    # midpoint value, cross-checked by direct integration of the linear ODE
    q = 0.5
    W = q ** -2.5 + (1 - q) ** -2.5
    assert W == pytest.approx(11.3137, abs=1e-4)
    val = reaction_exact(g, 1.0, 1.5, 0.2, 0.8, 0.05, np.array([q]))[0]
    rhs = lambda t, r: 1.0 * ((0.2 - r) * q ** -2.5 + (0.8 - r) * (1 - q) ** -2.5)
    num = solve_ivp(rhs, (0, 0.05), [0.0], rtol=1e-11, atol=1e-13).y[0, -1]
    assert val == pytest.approx(num, abs=1e-9)
    assert val == pytest.approx(0.5 * (1.0 - math.exp(-W * 0.05)), abs=1e-12)


def test_reaction_exact_rejects_endpoint_grid():
    with pytest.raises(ValueError):
        reaction_exact(constant_profile(0.5), 1.0, 1.5, 0.2, 0.8, 0.1,
                       np.array([0.0, 0.5]))


def test_reaction_diffusion_reduces_to_heat():
    g = step_profile(0.2, 0.8)
    cells, vals = reaction_diffusion_fd(g, 1.0, 0.0, 3.0, 0.2, 0.8, 0.05,
                                        M_cells=512)
    ref = heat_dirichlet_spectral(g, 0.05, cells, 0.2, 0.8)
    assert np.abs(vals - ref).max() <= 1e-3


def test_reaction_diffusion_small_diffusion_approaches_reaction():
    g = constant_profile(0.3)
    kern = build_kernel(LONG_JUMP, 16, gamma=3.0)
    kh = kern.c_gamma
    cells, vals = reaction_diffusion_fd(g, 0.02, kh, 3.0, 0.1, 0.9, 0.3,
                                        M_cells=512)
    inner = (cells > 0.25) & (cells < 0.75)
    ref = reaction_exact(g, kh, 3.0, 0.1, 0.9, 0.3, cells[inner])
    assert np.abs(vals[inner] - ref).max() <= 5e-3


def test_reaction_diffusion_convergence_second_order():
    # manufactured smooth comparison: halve the grid, error drops ~4x
    g = bump_profile()
    errs = []
    fine = reaction_diffusion_fd(g, 1.0, 0.5, 3.0, 0.2, 0.8, 0.05, M_cells=1024)
    for M in (64, 128, 256):
        cells, vals = reaction_diffusion_fd(g, 1.0, 0.5, 3.0, 0.2, 0.8, 0.05,
                                            M_cells=M)
        ref = np.interp(cells, fine[0], fine[1])
        errs.append(np.abs(vals - ref).max())
    assert errs[0] / errs[1] > 3.0
    assert errs[1] / errs[2] > 3.0


def test_reaction_diffusion_steady_state_is_time_invariant():
    from exclusionlab.pde import reaction_diffusion_steady
    kern = build_kernel(LONG_JUMP, 16, gamma=3.0)
    kh, sh = kern.c_gamma, math.sqrt(kern.sigma2)
    cells, steady = reaction_diffusion_steady(sh, kh, 3.0, 0.2, 0.8, M_cells=512)
    g = InitialProfile(lambda q: float(np.interp(q, cells, steady)), "steady")
    _, evolved = reaction_diffusion_fd(g, sh, kh, 3.0, 0.2, 0.8, 1.0, M_cells=512)
    assert np.abs(evolved - steady).max() <= 1e-6


def test_fractional_ode_flat_at_equilibrium():
    p = long_jump_params(64, 1.5, 0.3, 0.3, 1.0, -1.0)
    out = fractional_generator_ode(p, constant_profile(0.3), [0.01, 0.2])
    np.testing.assert_allclose(out, 0.3, atol=1e-12)


def test_fractional_ode_requires_infinite_variance_unit_strength():
    with pytest.raises(UnsupportedRegimeError):
        fractional_generator_ode(long_jump_params(32, 3.0, 0.2, 0.8, 1.0, -1.0),
                                 constant_profile(0.5), 0.1)
    with pytest.raises(UnsupportedRegimeError):
        fractional_generator_ode(
            long_jump_params(32, 1.5, 0.2, 0.8, 1.0, 0.5, theta_N=32.0 ** 1.5),
            constant_profile(0.5), 0.1)


def test_fractional_steady_state_pinned_and_monotone():
    p = long_jump_params(256, 1.5, 0.1, 0.9, 1.0, -1.0)
    rho = stationary_profile_ode(p)
    assert abs(rho[0] - 0.1) <= 0.05
    assert abs(rho[-1] - 0.9) <= 0.05
    assert np.all(np.diff(rho) > -1e-12)


def test_fractional_steady_state_cauchy_consistency():
    vals = {}
    for N in (512, 1024):
        p = long_jump_params(N, 1.5, 0.1, 0.9, 1.0, -1.0)
        vals[N] = (p.site_positions(), stationary_profile_ode(p))
    q = np.linspace(0.1, 0.9, 81)
    a = np.interp(q, *vals[512])
    b = np.interp(q, *vals[1024])
    assert np.abs(a - b).max() <= 1e-2


def test_kernel_laplacian_check_linear_is_exact():
    G = lambda q: 0.3 * q - 0.1
    d2G = lambda q: 0.0
    errs = kernel_laplacian_check(G, d2G, 3.0, [32, 64],
                                  lambda N: build_kernel(LONG_JUMP, N, gamma=3.0))
    # mean-zero kernel kills affine functions identically (up to roundoff)
    assert errs.max() <= 1e-10


def test_kernel_laplacian_check_decreasing():
    bump = bump_profile(base=0.0, amplitude=1.0, center=0.5, width=0.3)
    G = lambda q: math.sin(2 * math.pi * q) * bump(q)

    def d2G(q, h=1e-5):
        return (G(q + h) + G(q - h) - 2 * G(q)) / h / h

    errs = kernel_laplacian_check(G, d2G, 3.0, [256, 512, 1024, 2048],
                                  lambda N: build_kernel(LONG_JUMP, N, gamma=3.0))
    assert np.all(np.diff(errs) < 0)


def test_longjump_profile_ode_maximum_principle():
    p = long_jump_params(64, 3.0, 0.2, 0.8, 1.0, 0.0)
    out = longjump_profile_ode(p, step_profile(0.2, 0.8), [0.01, 0.1, 1.0])
    assert out.min() >= 0.2 - 1e-9 and out.max() <= 0.8 + 1e-9


def test_regime_dispatch_table():
    r = regime_dispatch(NEAREST_NEIGHBOR, None, 0.5)
    assert (r.family, r.time_scale_exponent) == ("heat-dirichlet", 2.0)
    r = regime_dispatch(NEAREST_NEIGHBOR, None, -1.0)
    assert r.dirichlet_variant == "compact-support"
    r = regime_dispatch(NEAREST_NEIGHBOR, None, 1.0, kappa=3.0)
    assert r.family == "heat-robin" and r.m_hat == 1.5
    assert r.robin_coeff() == pytest.approx(3.0)
    k = build_kernel(LONG_JUMP, 16, gamma=3.0)
    r = regime_dispatch(LONG_JUMP, 3.0, -3.0, 1.0, k.c_gamma, k.sigma2)
    assert r.family == "reaction"
    assert r.kappa_hat == pytest.approx(k.c_gamma)
    assert r.time_scale_exponent == pytest.approx(1.0)
    r = regime_dispatch(LONG_JUMP, 3.0, -2.0, 1.0, k.c_gamma, k.sigma2)
    assert r.family == "reaction-diffusion"
    assert r.sigma_hat == pytest.approx(math.sqrt(k.sigma2))
    r = regime_dispatch(LONG_JUMP, 3.0, 1.0, 2.0, k.c_gamma, k.sigma2)
    assert r.family == "heat-robin" and r.m_hat == 1.0
    assert r.robin_coeff() == pytest.approx(2.0 / k.sigma2)
    r = regime_dispatch(LONG_JUMP, 1.5, -1.0, 1.0, 0.37, None)
    assert r.family == "fractional-rd" and r.time_scale_exponent == 1.5
    r = regime_dispatch(LONG_JUMP, 1.5, 0.0, 1.0, 0.37, None)
    assert not r.supported
    r = regime_dispatch(LONG_JUMP, 2.0, 0.0)
    assert not r.supported
    r = regime_dispatch(LONG_JUMP, 1.5, -2.0, 1.0, 0.37, None)
    assert r.family == "reaction" and r.time_scale_exponent == pytest.approx(0.5)


def test_dispatch_params_roundtrip():
    p = long_jump_params(32, 3.0, 0.2, 0.8, 2.0, 1.0)
    r = dispatch_params(p)
    assert r.family == "heat-robin"
    assert r.m_hat == pytest.approx(1.0)
