"""Discrete operators: profile and correlation generators, long-jump matrices.

All evolution equations used here are affine systems d/dt u = A u + b where
the constant part carries the reservoir data.  The builders return (A, b)
so solvers can pick matrix exponentials, implicit steppers, or direct
steady-state solves.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .kernels import NEAREST_NEIGHBOR
from .params import ModelParams


def discrete_laplacian(f: np.ndarray) -> np.ndarray:
    """f(x+1) + f(x-1) - 2 f(x) on the interior of a 1-d array."""
    return f[2:] + f[:-2] - 2.0 * f[1:-1]


def gradient_plus(f: np.ndarray, N: int) -> np.ndarray:
    """N (f(x+1) - f(x))."""
    return N * np.diff(f)


def gradient_minus(f: np.ndarray, N: int) -> np.ndarray:
    """N (f(x) - f(x-1))."""
    return N * np.diff(f)


def profile_generator(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(A, b) with d/dt rho = A rho + b: the mean-profile evolution on 1..N-1.

    Nearest-neighbor case of the general construction: interior sites carry
    (N**2/2) * discrete Laplacian, the extremal sites exchange with a single
    bulk neighbor and relax to the reservoir densities at rate
    kappa N**2 / (2 N**theta).  The affine profile a x + b built from the
    same parameters is an exact fixed point.
    """
    if params.kernel.kind != NEAREST_NEIGHBOR:
        raise ValueError("profile_generator covers the nearest-neighbor model; "
                         "use longjump_generator for long-jump kernels")
    return longjump_generator(params)


def longjump_generator(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(A, b) for the exact mean evolution under any kernel, at scale theta_N.

    d/dt rho(x) = Theta(N) [ sum_y p(y-x)(rho(y) - rho(x))
                             + kappa N**-theta (p(x)(alpha - rho(x)) + p(N-x)(beta - rho(x))) ].
    """
    N = params.N
    n = params.n_sites
    kern = params.kernel
    ptab = kern.prob_table()
    scale = params.theta_N
    A = np.zeros((n, n))
    b = np.zeros(n)
    for i in range(n):
        x = i + 1
        for j in range(n):
            if j == i:
                continue
            p = ptab[abs(j - i) - 1]
            A[i, j] += p
            A[i, i] -= p
    wl, wr = params.flip_weights()
    idx = np.arange(n)
    A[idx, idx] -= wl + wr
    b += wl * params.alpha + wr * params.beta
    return scale * A, scale * b


# -- correlation wedge ----------------------------------------------------------


def wedge_sites(N: int) -> list[tuple[int, int]]:
    """Interior pairs 0 < x < y < N in row-major order."""
    return [(x, y) for x in range(1, N) for y in range(x + 1, N)]


def wedge_index(N: int) -> dict[tuple[int, int], int]:
    return {xy: i for i, xy in enumerate(wedge_sites(N))}


def correlation_generator(params: ModelParams) -> sp.csr_matrix:
    """Generator of the absorbed two-coordinate walk on the wedge, times N**2.

    Neighbor moves inside the wedge carry rate 1; moves that would land on
    the absorbing rim (x = 0 or y = N) carry rate kappa N**-theta and only
    contribute loss.  Moves onto the diagonal x = y do not exist.  Row sums
    over the wedge equal minus the absorption rate.
    """
    if params.kernel.kind != NEAREST_NEIGHBOR:
        raise ValueError("the correlation evolution is implemented for the nearest-neighbor model")
    N = params.N
    sites = wedge_sites(N)
    index = wedge_index(N)
    lam = params.kappa * float(N) ** (-params.theta)
    rows, cols, vals = [], [], []
    for i, (x, y) in enumerate(sites):
        diag = 0.0
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            xv, yv = x + dx, y + dy
            if xv == 0 or yv == N:
                diag -= lam
            elif 0 < xv < yv < N:
                rows.append(i)
                cols.append(index[(xv, yv)])
                vals.append(1.0)
                diag -= 1.0
            # (xv == yv) or (yv == N is handled) or xv > yv: move absent
        rows.append(i)
        cols.append(i)
        vals.append(diag)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(sites), len(sites)))
    return (float(N) ** 2) * A


def correlation_source(rho_ext: np.ndarray, N: int) -> np.ndarray:
    """Source -(N (rho(x+1) - rho(x)))**2 on near-diagonal pairs y = x + 1.

    ``rho_ext`` holds the profile on 0..N including the reservoir values.
    """
    if rho_ext.shape[0] != N + 1:
        raise ValueError("rho_ext must have length N + 1 (sites 0..N)")
    sites = wedge_sites(N)
    out = np.zeros(len(sites))
    grad = (N * np.diff(rho_ext)) ** 2  # index x = 0..N-1 for bond (x, x+1)
    for i, (x, y) in enumerate(sites):
        if y == x + 1:
            out[i] = -grad[x]
    return out


def wedge_to_matrix(values: np.ndarray, N: int) -> np.ndarray:
    """Scatter a wedge vector into an (N-1) x (N-1) upper-triangular array."""
    out = np.zeros((N - 1, N - 1))
    for i, (x, y) in enumerate(wedge_sites(N)):
        out[x - 1, y - 1] = values[i]
    return out


# -- long-jump bulk operators on test functions ----------------------------------


def apply_bulk_operator(kernel, G_lattice: np.ndarray) -> np.ndarray:
    """sum_{y in bulk} p(y-x) (G(y/N) - G(x/N)) for each bulk site x.

    ``G_lattice`` holds G on the bulk 1..N-1.
    """
    n = G_lattice.shape[0]
    ptab = kernel.prob_table()
    out = np.empty(n)
    for i in range(n):
        z = np.arange(1, n + 1) - (i + 1)
        w = np.zeros(n)
        nz = z != 0
        w[nz] = ptab[np.abs(z[nz]) - 1]
        out[i] = w @ (G_lattice - G_lattice[i])
    return out


def apply_fullline_operator(kernel, G, N: int, window_factor: int = 8) -> np.ndarray:
    """sum over integer jumps z of p(z) (G((x+z)/N) - G(x/N)), x in the bulk.

    G is evaluated as given on the real line (it must be callable outside
    [0, 1], e.g. a globally smooth extension or a compactly supported bump).
    The jump sum is truncated symmetrically at |z| <= window_factor * N, so
    odd parts cancel exactly and the neglected mass is the order-(W**-gamma)
    kernel tail.
    """
    W = window_factor * N
    pts = np.arange(1 - W, N + W) / N
    Gv = np.asarray([float(G(v)) for v in pts])
    z = np.arange(-W, W + 1)
    pz = kernel.prob(z)
    from scipy.signal import fftconvolve
    conv = fftconvolve(Gv, pz, mode="valid")  # p is symmetric: convolution == correlation
    x_idx = np.arange(W, W + N - 1)
    return conv - Gv[x_idx] * float(pz.sum())
