"""Evolution solvers: discrete Kolmogorov systems, reaction and
reaction-diffusion equations, and the regime dispatch table."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.linalg import expm, solve

from .kernels import LONG_JUMP, NEAREST_NEIGHBOR
from .operators import (apply_fullline_operator, correlation_generator,
                        correlation_source, longjump_generator,
                        profile_generator, wedge_sites)
from .params import InitialProfile, ModelParams, UnsupportedRegimeError

_EXPM_SITE_CAP = 1025  # dense matrix-exponential path up to this many lattice sites


class StiffnessError(ArithmeticError):
    """Adaptive stepping collapsed; the matrix-exponential path is advised."""


def _affine_evolve(A: np.ndarray, b: np.ndarray, u0: np.ndarray, times,
                   rtol: float = 1e-9) -> np.ndarray:
    """Solve d/dt u = A u + b through the fixed point: u(t) = u* + e^{tA}(u0 - u*)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    ustar = solve(A, -b)
    out = np.empty((times.size, u0.size))
    if u0.size <= _EXPM_SITE_CAP:
        order = np.argsort(times)
        prev_t = 0.0
        dev = u0 - ustar
        for k in order:
            t = times[k]
            if t < 0:
                raise ValueError("times must be >= 0")
            if t > prev_t:
                dev = expm((t - prev_t) * A) @ dev
                prev_t = t
            out[k] = ustar + dev
        return out
    sol = solve_ivp(lambda _, u: A @ u + b, (0.0, float(times.max())), u0,
                    t_eval=times, method="Radau", rtol=rtol, atol=1e-12,
                    jac=lambda _, u: A)
    if not sol.success:
        raise StiffnessError(f"adaptive stepping failed: {sol.message}")
    return sol.y.T


def discrete_profile_ode(params: ModelParams, g: InitialProfile, times) -> np.ndarray:
    """Exact mean-profile evolution of the nearest-neighbor chain.

    Returns the profile on the bulk 1..N-1, one row per requested
    macroscopic time.  This is the true Kolmogorov evolution of the site
    means (the dynamics is linear in the occupations), so it serves as the
    exact finite-N reference for Monte Carlo checks.
    """
    A, b = profile_generator(params)
    rho0 = g.on_lattice(params.N)
    out = _affine_evolve(A, b, rho0, times)
    return out if np.ndim(times) else out[0]


def longjump_profile_ode(params: ModelParams, g: InitialProfile, times) -> np.ndarray:
    """Exact mean-profile evolution for an arbitrary jump kernel."""
    A, b = longjump_generator(params)
    rho0 = g.on_lattice(params.N)
    out = _affine_evolve(A, b, rho0, times)
    return out if np.ndim(times) else out[0]


def profile_with_boundary(profile: np.ndarray, params: ModelParams) -> np.ndarray:
    """Extend a bulk profile by the reservoir densities at 0 and N."""
    return np.concatenate([[params.alpha], np.asarray(profile, float), [params.beta]])


def fractional_generator_ode(params: ModelParams, g: InitialProfile, times) -> np.ndarray:
    """Exact Kolmogorov profile evolution in the infinite-variance regime.

    Restricted to gamma in (1, 2) with theta = -1, time scale N**gamma: the
    same linear system is simultaneously the convergent discretization of
    the regional-fractional reaction-diffusion equation with Dirichlet data.
    """
    kern = params.kernel
    if kern.kind != LONG_JUMP or not (1.0 < kern.gamma < 2.0):
        raise UnsupportedRegimeError("fractional evolution requires a long-jump kernel "
                                     "with gamma in (1, 2)")
    if params.theta != -1.0:
        raise UnsupportedRegimeError("only theta = -1 is supported with infinite variance; "
                                     "other strengths are open")
    return longjump_profile_ode(params, g, times)


def stationary_profile_ode(params: ModelParams) -> np.ndarray:
    """Steady state of the exact mean evolution (any kernel): solve A u = -b."""
    A, b = longjump_generator(params)
    return solve(A, -b)


# -- correlation evolution -------------------------------------------------------


def correlation_steady_state(params: ModelParams) -> np.ndarray:
    """Steady state of the correlation system driven by the stationary profile.

    Solves A phi = -source on the wedge, with the source built from the
    exact stationary profile's discrete gradient.
    """
    A = correlation_generator(params)
    rho_ss_ext = profile_with_boundary(stationary_profile_ode(params), params)
    src = correlation_source(rho_ss_ext, params.N)
    return spla.spsolve(A.tocsc(), -src)


def correlation_ode(params: ModelParams, phi0: np.ndarray, g: InitialProfile,
                    times) -> np.ndarray:
    """Correlation evolution d/dt phi = N**2 A phi + source(t) on the wedge.

    The source follows the profile evolution started from g.  phi0 is a
    wedge vector (zero for product initial measures).
    """
    N = params.N
    sites = wedge_sites(N)
    if phi0.shape[0] != len(sites):
        raise ValueError("phi0 does not match the wedge size")
    A = correlation_generator(params)
    Aop, bvec = profile_generator(params)
    rho0 = g.on_lattice(N)

    # profile propagator via symmetric eigendecomposition (Aop is symmetric)
    w, V = np.linalg.eigh(Aop)
    rho_star = solve(Aop, -bvec)
    dev0 = V.T @ (rho0 - rho_star)
    diag_idx = np.array([i for i, (x, y) in enumerate(sites) if y == x + 1])
    diag_x = np.array([x for (x, y) in sites if y == x + 1])  # bond index of (x, x+1)

    def source_at(t: float) -> np.ndarray:
        rho = rho_star + V @ (np.exp(w * t) * dev0)
        rho_ext = profile_with_boundary(rho, params)
        grad2 = (N * np.diff(rho_ext)) ** 2
        out = np.zeros(len(sites))
        out[diag_idx] = -grad2[diag_x]
        return out

    def rhs(t, phi):
        return A @ phi + source_at(float(t))

    times = np.atleast_1d(np.asarray(times, dtype=float))
    sol = solve_ivp(rhs, (0.0, float(times.max())), phi0.astype(float),
                    t_eval=times, method="BDF", rtol=1e-8, atol=1e-13,
                    jac=lambda *_: A)
    if not sol.success:
        raise StiffnessError(f"correlation stepping failed: {sol.message}")
    return sol.y.T if np.ndim(times) else sol.y[:, 0]


# -- continuum reaction / reaction-diffusion -------------------------------------


def reaction_exact(g: InitialProfile, kappa_hat: float, gamma: float, alpha: float,
                   beta: float, t: float, grid: np.ndarray) -> np.ndarray:
    """Pointwise solution of the pure reaction equation with singular potential.

    With W(q) = q**-(gamma+1) + (1-q)**-(gamma+1) and fixed point
    rho_inf = (alpha q**-(gamma+1) + beta (1-q)**-(gamma+1)) / W(q):
    rho_t = rho_inf + (g - rho_inf) exp(-kappa_hat W t).
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise ValueError("grid must be interior to (0, 1); the potential is singular at the ends")
    wl = grid ** -(gamma + 1.0)
    wr = (1.0 - grid) ** -(gamma + 1.0)
    W = wl + wr
    rho_inf = (alpha * wl + beta * wr) / W
    g_vals = np.array([g(q) for q in grid], dtype=float)
    return rho_inf + (g_vals - rho_inf) * np.exp(-kappa_hat * W * t)


def reaction_diffusion_fd(g: InitialProfile, sigma_hat: float, kappa_hat: float,
                          gamma: float, alpha: float, beta: float, t: float,
                          M_cells: int = 256, dt_ctrl: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Strang-split finite-difference solver for the reaction-diffusion equation.

    Cell-centered grid q_i = (i - 1/2)/M keeps the singular reaction
    potential off the endpoints; the reaction half-steps are exact per cell,
    the diffusion step is Crank-Nicolson with Dirichlet ghost values.
    Returns (grid, solution).  Second-order in 1/M on smooth solutions.
    """
    if sigma_hat <= 0:
        raise ValueError("sigma_hat must be positive here; use reaction_exact when it vanishes")
    if M_cells < 16:
        raise ValueError("M_cells must be >= 16")
    M = int(M_cells)
    h = 1.0 / M
    q = (np.arange(M) + 0.5) * h
    u = np.array([g(v) for v in q], dtype=float)

    nu = 0.5 * sigma_hat ** 2
    dt = dt_ctrl * h * h / nu
    steps = max(1, int(math.ceil(t / dt)))
    dt = t / steps if t > 0 else 0.0

    main = np.full(M, -2.0)
    main[0] = main[-1] = -3.0  # ghost u_g = 2*bc - u_1 folds into the diagonal
    off = np.ones(M - 1)
    L = sp.diags([off, main, off], (-1, 0, 1), format="csc") / (h * h)
    rhs_bc = np.zeros(M)
    rhs_bc[0] = 2.0 * alpha / (h * h)
    rhs_bc[-1] = 2.0 * beta / (h * h)

    Ident = sp.identity(M, format="csc")
    lhs = (Ident - 0.5 * dt * nu * L).tocsc()
    lu = spla.splu(lhs)

    wl = q ** -(gamma + 1.0)
    wr = (1.0 - q) ** -(gamma + 1.0)
    W = wl + wr
    rho_inf = (alpha * wl + beta * wr) / W
    decay_half = np.exp(-kappa_hat * W * dt / 2.0)

    def react_half(v):
        return rho_inf + (v - rho_inf) * decay_half

    for _ in range(steps):
        u = react_half(u)
        rhs = u + 0.5 * dt * nu * (L @ u + rhs_bc)
        u = lu.solve(rhs + 0.5 * dt * nu * rhs_bc)
        if not np.all(np.isfinite(u)):
            raise StiffnessError(f"diffusion step produced non-finite values (dt={dt:.3e}, M={M})")
        u = react_half(u)
    return q, u


def reaction_diffusion_steady(sigma_hat: float, kappa_hat: float, gamma: float,
                              alpha: float, beta: float, M_cells: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Steady state of the discretized reaction-diffusion operator (direct solve)."""
    M = int(M_cells)
    h = 1.0 / M
    q = (np.arange(M) + 0.5) * h
    nu = 0.5 * sigma_hat ** 2
    main = np.full(M, -2.0)
    main[0] = main[-1] = -3.0
    off = np.ones(M - 1)
    L = sp.diags([off, main, off], (-1, 0, 1), format="csc") / (h * h)
    rhs_bc = np.zeros(M)
    rhs_bc[0] = 2.0 * alpha / (h * h)
    rhs_bc[-1] = 2.0 * beta / (h * h)
    wl = q ** -(gamma + 1.0)
    wr = (1.0 - q) ** -(gamma + 1.0)
    A = (nu * L - sp.diags(kappa_hat * (wl + wr))).tocsc()
    rhs = -(nu * rhs_bc + kappa_hat * (alpha * wl + beta * wr))
    return q, spla.spsolve(A, rhs)


# -- kernel-to-Laplacian convergence ---------------------------------------------


def kernel_laplacian_check(G, d2G, kernel_gamma: float, N_list, build) -> np.ndarray:
    """Sup-norm distance between the rescaled kernel average and (sigma**2/2) G''.

    For each N: sup_x | N**2 sum_y (G((x+y)/N) - G(x/N)) p(y) - (sigma**2/2) G''(x/N) |.
    G must be evaluable on the whole line; ``build`` maps N to a kernel (so
    tables match each lattice size).
    """
    errs = np.empty(len(N_list))
    for k, N in enumerate(N_list):
        kern = build(N)
        if not np.isfinite(kern.sigma2):
            raise ValueError("kernel must have finite variance for the Laplacian limit")
        vals = apply_fullline_operator(kern, G, N)
        x = np.arange(1, N) / N
        target = 0.5 * kern.sigma2 * np.array([d2G(v) for v in x])
        errs[k] = float(np.abs(N * N * vals - target).max())
    return errs


# -- regime dispatch --------------------------------------------------------------


@dataclass(frozen=True)
class Regime:
    """Limiting equation family with its coefficients and time scale."""

    family: str                    # heat-dirichlet | heat-robin | heat-neumann |
                                   # reaction | reaction-diffusion | fractional-rd | unsupported
    sigma_hat: float
    kappa_hat: float
    m_hat: float
    time_scale_exponent: float     # Theta(N) = N**exponent
    dirichlet_variant: str = ""    # "compact-support" when theta < 0 narrows the test class
    note: str = ""

    @property
    def supported(self) -> bool:
        return self.family != "unsupported"

    def robin_coeff(self) -> float:
        """Boundary coefficient of the Robin problem: 2 m_hat / sigma_hat**2."""
        if self.family not in ("heat-robin", "heat-neumann"):
            raise ValueError("robin_coeff applies to Robin/Neumann regimes")
        return 2.0 * self.m_hat / self.sigma_hat ** 2


def regime_dispatch(kernel_kind: str, gamma: float | None, theta: float,
                    kappa: float = 1.0, c_gamma: float | None = None,
                    sigma2: float | None = None) -> Regime:
    """Map (kernel, gamma, theta) to the limiting equation and its constants.

    Unknown corners return an explicit ``unsupported`` marker, never a guess.
    """
    if kernel_kind == NEAREST_NEIGHBOR:
        if theta < 0:
            return Regime("heat-dirichlet", 1.0, 0.0, 0.0, 2.0,
                          dirichlet_variant="compact-support")
        if theta < 1:
            return Regime("heat-dirichlet", 1.0, 0.0, 0.0, 2.0)
        if theta == 1:
            return Regime("heat-robin", 1.0, 0.0, kappa / 2.0, 2.0)
        return Regime("heat-neumann", 1.0, 0.0, 0.0, 2.0)
    if kernel_kind != LONG_JUMP:
        raise ValueError(f"unknown kernel kind {kernel_kind!r}")
    if gamma is None or gamma <= 1.0:
        raise ValueError("long-jump dispatch requires gamma > 1")
    if gamma == 2.0:
        return Regime("unsupported", 0.0, 0.0, 0.0, float("nan"),
                      note="gamma = 2 needs the N**2/log N scale, not implemented")
    if gamma > 2.0:
        sigma = math.sqrt(sigma2) if sigma2 is not None else float("nan")
        if theta < 1.0 - gamma:
            return Regime("reaction", 0.0, kappa * c_gamma, 0.0, gamma + theta + 1.0,
                          dirichlet_variant="compact-support")
        if theta == 1.0 - gamma:
            return Regime("reaction-diffusion", sigma, kappa * c_gamma, 0.0, 2.0,
                          dirichlet_variant="compact-support")
        if theta < 1.0:
            return Regime("heat-dirichlet", sigma, 0.0, 0.0, 2.0,
                          dirichlet_variant="compact-support" if theta < 0 else "")
        if theta == 1.0:
            return Regime("heat-robin", sigma, 0.0, kappa / 2.0, 2.0)
        return Regime("heat-neumann", sigma, 0.0, 0.0, 2.0)
    # gamma in (1, 2): infinite variance
    if theta == -1.0:
        return Regime("fractional-rd", 0.0, kappa, 0.0, gamma)
    if theta < -1.0:
        return Regime("reaction", 0.0, kappa * c_gamma, 0.0, gamma + theta + 1.0,
                      dirichlet_variant="compact-support")
    return Regime("unsupported", 0.0, 0.0, 0.0, float("nan"),
                  note="slow reservoirs with infinite variance are an open problem")


def dispatch_params(params: ModelParams) -> Regime:
    kern = params.kernel
    return regime_dispatch(kern.kind, kern.gamma, params.theta, params.kappa,
                           kern.c_gamma, kern.sigma2)
