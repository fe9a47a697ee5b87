"""Closed-form stationary objects and the exact CTMC stationary oracle.

The nearest-neighbor model has an affine stationary profile
rho_ss(x) = a x + b with

    a = kappa (beta - alpha) / (2 N**theta + kappa (N - 2)),
    b = a (N**theta / kappa - 1) + alpha,

and, at kappa = 1, a closed-form stationary two-point correlation

    phi_ss(x, y) = -(alpha-beta)**2 (x + c)(N - y + c)
                   / ((2 N**theta + N - 2)**2 (2 N**theta + N - 3)),

with c = N**theta - 1, defined on 0 < x < y < N and vanishing on the
boundary wedge.  For kappa != 1 no closed correlation form is exposed; the
steady state of the correlation evolution covers that case numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .kernels import NEAREST_NEIGHBOR
from .lattice import generator_matrix
from .params import ModelParams


def _require_nearest_neighbor(params: ModelParams, what: str) -> None:
    if params.kernel.kind != NEAREST_NEIGHBOR:
        raise ValueError(f"{what} has no closed form for long-jump kernels")


def ab_coefficients(params: ModelParams) -> tuple[float, float]:
    """Slope and intercept of the affine stationary profile (nearest-neighbor)."""
    _require_nearest_neighbor(params, "the stationary profile")
    N, th, kap = params.N, params.theta, params.kappa
    a = kap * (params.beta - params.alpha) / (2.0 * N**th + kap * (N - 2))
    b = a * (N**th / kap - 1.0) + params.alpha
    return a, b


def rho_ss(x, params: ModelParams):
    """Stationary density at site(s) x in 0..N (nearest-neighbor model)."""
    a, b = ab_coefficients(params)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > params.N):
        raise ValueError("x must lie in 0..N")
    out = a * x + b
    return float(out) if out.ndim == 0 else out


def phi_ss(x, y, params: ModelParams):
    """Stationary two-point correlation at kappa = 1 (nearest-neighbor model)."""
    _require_nearest_neighbor(params, "the stationary correlation")
    if params.kappa != 1.0:
        raise ValueError("the closed correlation form is exposed only for kappa = 1; "
                         "use the correlation evolution's steady state otherwise")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~((0 < x) & (x < y) & (y < params.N))):
        raise ValueError("(x, y) must satisfy 0 < x < y < N")
    N, th = params.N, params.theta
    c = N**th - 1.0
    denom = (2.0 * N**th + N - 2) ** 2 * (2.0 * N**th + N - 3)
    out = -((params.alpha - params.beta) ** 2) * (x + c) * (N - y + c) / denom
    return float(out) if out.ndim == 0 else out


def phi_ss_matrix(params: ModelParams) -> np.ndarray:
    """phi_ss on the full wedge as an (N-1) x (N-1) upper-triangular array."""
    n = params.n_sites
    out = np.zeros((n, n))
    for x in range(1, n + 1):
        ys = np.arange(x + 1, n + 1)
        if ys.size:
            out[x - 1, ys - 1] = phi_ss(np.full(ys.shape, x), ys, params)
    return out


def max_abs_phi_ss(params: ModelParams) -> float:
    """Wedge-wide maximum of |phi_ss|; attained near the diagonal center and
    of order 1/N for theta <= 1, N**-theta for theta >= 1."""
    m = phi_ss_matrix(params)
    return float(np.abs(m).max())


def corner_phi_ss(params: ModelParams) -> float:
    """|phi_ss(1, 2)|, the boundary-adjacent pair: of order N**(theta-2) for
    theta < 1 and N**-theta for theta >= 1, the decay orders quoted for the
    stationary correlations."""
    return abs(phi_ss(1, 2, params))


def macro_profile(q, theta: float, kappa: float, alpha: float, beta: float):
    """Limiting stationary profile: Dirichlet line (theta < 1), partially
    pinned Robin line (theta = 1), flat mean (theta > 1)."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0) or np.any(q > 1):
        raise ValueError("q must lie in [0, 1]")
    if theta < 1:
        out = (beta - alpha) * q + alpha
    elif theta == 1:
        out = kappa * (beta - alpha) / (2.0 + kappa) * q + alpha + (beta - alpha) / (2.0 + kappa)
    else:
        out = np.full(q.shape, (alpha + beta) / 2.0)
    return float(out) if out.ndim == 0 else out


def log_partition(params: ModelParams) -> tuple[float, float]:
    """(log |Z|, sign) of the matrix-product normalization
    Z_{N-1} = (alpha-beta)**-(N-1) Gamma(2 N**theta + N - 1) / Gamma(2 N**theta),
    computed in the log domain."""
    _require_nearest_neighbor(params, "the partition normalization")
    diff = params.alpha - params.beta
    if diff == 0.0:
        raise ValueError("log_partition is undefined at alpha = beta")
    N, th = params.N, params.theta
    logz = (-(N - 1) * math.log(abs(diff))
            + gammaln(2.0 * N**th + N - 1) - gammaln(2.0 * N**th))
    sign = 1.0 if diff > 0 or (N - 1) % 2 == 0 else -1.0
    return logz, sign


# -- brute-force oracle ---------------------------------------------------------


@dataclass(frozen=True)
class StationaryOracle:
    """Exact stationary law of the finite chain with derived moments."""

    distribution: np.ndarray
    states: list
    profile: np.ndarray        # E[eta(x)], x = 1..N-1
    correlations: np.ndarray   # centered second moments, (N-1) x (N-1), full symmetric
    residual: float

    def correlation(self, x: int, y: int) -> float:
        return float(self.correlations[x - 1, y - 1])


def brute_force_stationary(params: ModelParams, residual_tol: float = 1e-12) -> StationaryOracle:
    """Solve pi Q = 0, sum pi = 1 by dense linear algebra (desk scale only)."""
    Q, states = generator_matrix(params)
    n = Q.shape[0]
    A = np.vstack([Q.T, np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    residual = float(np.abs(pi @ Q).max())
    if residual > residual_tol:
        cond = np.linalg.cond(A)
        raise ArithmeticError(
            f"stationary solve residual {residual:.3e} exceeds {residual_tol:.1e} "
            f"(condition number {cond:.3e})")
    S = np.array(states, dtype=float)
    profile = pi @ S
    second = (S * pi[:, None]).T @ S
    corr = second - np.outer(profile, profile)
    np.fill_diagonal(corr, profile * (1.0 - profile))
    return StationaryOracle(distribution=pi, states=states, profile=profile,
                            correlations=corr, residual=residual)
