"""Jump kernels and their derived constants.

Two kernel families are supported: nearest-neighbor jumps with
p(1) = p(-1) = 1/2, and heavy-tailed long jumps p(z) = c|z|**-(gamma+1)
for z != 0 with gamma > 1.  A built kernel is tied to a lattice size N and
precomputes everything the simulator, the discrete operators, and the
continuum limits need: the probability table, the reservoir tail sums, the
first-moment tails, and the singular boundary potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._series import power_tail, power_tails

NEAREST_NEIGHBOR = "nearest-neighbor"
LONG_JUMP = "long-jump"


class KernelError(ValueError):
    """Raised for non-normalizable or otherwise invalid kernel requests."""


@dataclass(frozen=True)
class JumpKernel:
    """Symmetric translation-invariant jump law on the integers.

    Attributes
    ----------
    kind : str
        ``"nearest-neighbor"`` or ``"long-jump"``.
    N : int
        Lattice size the precomputed tables cover (sites 1..N-1 plus the
        two reservoir endpoints 0 and N).
    gamma : float or None
        Tail exponent for long jumps; None for nearest-neighbor.
    c_gamma : float or None
        Normalizing constant of the long-jump law.
    sigma2 : float
        Variance sum z**2 p(z); ``math.inf`` when gamma <= 2.
    m : float
        One-sided mean sum_{z>=1} z p(z).
    """

    kind: str
    N: int
    gamma: float | None
    c_gamma: float | None
    sigma2: float
    m: float
    series_tol: float
    # p(z) for z = 1..N, sum_{y>=x} p(y) for x = 1..N, sum_{z>=x} z p(z) for x = 1..N
    _p_pos: np.ndarray = field(repr=False)
    _tail: np.ndarray = field(repr=False)
    _first_moment_tail: np.ndarray = field(repr=False)

    # -- lattice-side quantities -------------------------------------------------

    def prob(self, z):
        """Transition probability p(z), symmetric in z, zero at z = 0."""
        scalar = np.isscalar(z) or np.ndim(z) == 0
        az = np.abs(np.atleast_1d(np.asarray(z)))
        out = np.zeros(az.shape, dtype=float)
        inside = (az >= 1) & (az <= self.N)
        out[inside] = self._p_pos[az[inside].astype(np.int64) - 1]
        if self.kind == LONG_JUMP:
            far = az > self.N
            if np.any(far):
                out[far] = self.c_gamma * az[far].astype(float) ** -(self.gamma + 1.0)
        return float(out[0]) if scalar else out

    def prob_table(self) -> np.ndarray:
        """p(z) for z = 1..N as a read-only array."""
        return self._p_pos

    def tail_left(self, x):
        """r_N^-(x) = sum_{y >= x} p(y), for 1 <= x <= N."""
        return self._tail_lookup(x)

    def tail_right(self, x):
        """r_N^+(x) = sum_{y <= x-N} p(y) = sum_{y >= N-x} p(y), for 0 <= x <= N-1."""
        return self._tail_lookup(self.N - np.asarray(x))

    def theta_minus(self, x):
        """sum over reservoir sites y <= 0 of (x-y) p(x-y) = sum_{z >= x} z p(z)."""
        return self._moment_lookup(x)

    def theta_plus(self, x):
        """sum over reservoir sites y >= N of (y-x) p(y-x) = sum_{z >= N-x} z p(z)."""
        return self._moment_lookup(self.N - np.asarray(x))

    def _tail_lookup(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any(x < 1) or np.any(x > self.N):
            raise ValueError("tail argument out of range 1..N")
        out = self._tail[x - 1]
        return out if out.ndim else float(out)

    def _moment_lookup(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any(x < 1) or np.any(x > self.N):
            raise ValueError("moment-tail argument out of range 1..N")
        out = self._first_moment_tail[x - 1]
        return out if out.ndim else float(out)

    # -- continuum-side quantities ----------------------------------------------

    def _require_long_jump(self):
        if self.kind != LONG_JUMP:
            raise KernelError("continuum limit functions are defined for long-jump kernels only")

    def r_minus(self, u):
        """Limit of N**gamma r_N^-([uN]): c_gamma / (gamma * u**gamma)."""
        self._require_long_jump()
        return self.c_gamma / self.gamma * np.asarray(u, dtype=float) ** -self.gamma

    def r_plus(self, u):
        """Limit of N**gamma r_N^+([uN]): c_gamma / (gamma * (1-u)**gamma)."""
        self._require_long_jump()
        return self.c_gamma / self.gamma * (1.0 - np.asarray(u, dtype=float)) ** -self.gamma

    def p_cont(self, q):
        """Continuum kernel density c_gamma |q|**-(gamma+1)."""
        self._require_long_jump()
        return self.c_gamma * np.abs(np.asarray(q, dtype=float)) ** -(self.gamma + 1.0)

    def p_cont_mirror(self, q):
        """p evaluated at 1-q (the right-reservoir direction)."""
        return self.p_cont(1.0 - np.asarray(q, dtype=float))

    def potential_v1(self, q):
        """Killing potential r^-(q) + r^+(q) of the regional operator."""
        return self.r_minus(q) + self.r_plus(q)

    def potential_v1_tilde(self, q):
        """Boundary-rate potential p(q) + p(1-q)."""
        return self.p_cont(q) + self.p_cont_mirror(q)

    def potential_v0_tilde(self, q, alpha: float, beta: float):
        """Reservoir source alpha p(q) + beta p(1-q)."""
        return alpha * self.p_cont(q) + beta * self.p_cont_mirror(q)


def build_kernel(kind: str, N: int, gamma: float | None = None,
                 series_tol: float = 1e-12) -> JumpKernel:
    """Build a jump kernel with all derived constants for lattice size N.

    Infinite series are evaluated to absolute error <= series_tol.  For
    gamma in (1, 2] the variance is reported as ``math.inf``, never as a
    truncated number.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    if series_tol <= 0:
        raise ValueError("series_tol must be positive")
    if kind == NEAREST_NEIGHBOR:
        p_pos = np.zeros(N)
        p_pos[0] = 0.5
        tail = np.zeros(N)
        tail[0] = 0.5
        fm_tail = np.zeros(N)
        fm_tail[0] = 0.5
        return JumpKernel(kind=kind, N=N, gamma=None, c_gamma=None, sigma2=1.0,
                          m=0.5, series_tol=series_tol, _p_pos=p_pos, _tail=tail,
                          _first_moment_tail=fm_tail)
    if kind != LONG_JUMP:
        raise KernelError(f"unknown kernel kind {kind!r}")
    if gamma is None or gamma <= 1.0:
        raise KernelError("long-jump kernel requires gamma > 1 (mean-zero normalizable tail)")

    c_gamma = 1.0 / (2.0 * power_tail(gamma + 1.0, tol=series_tol))
    if gamma > 2.0:
        sigma2 = 2.0 * c_gamma * power_tail(gamma - 1.0, tol=series_tol)
    else:
        sigma2 = math.inf
    m = c_gamma * power_tail(gamma, tol=series_tol)

    z = np.arange(1, N + 1, dtype=float)
    p_pos = c_gamma * z ** -(gamma + 1.0)
    tail = c_gamma * power_tails(gamma + 1.0, N)
    fm_tail = c_gamma * power_tails(gamma, N)
    return JumpKernel(kind=kind, N=N, gamma=gamma, c_gamma=c_gamma, sigma2=sigma2,
                      m=m, series_tol=series_tol, _p_pos=p_pos, _tail=tail,
                      _first_moment_tail=fm_tail)
