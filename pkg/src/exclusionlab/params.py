"""Model parameterization and initial measures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import LONG_JUMP, NEAREST_NEIGHBOR, JumpKernel, build_kernel


class UnsupportedRegimeError(ValueError):
    """Raised when no time scale / limiting equation is known for the parameters."""


def default_time_scale(kernel: JumpKernel, theta: float) -> float:
    """Macroscopic-to-microscopic time factor Theta(N).

    Nearest-neighbor dynamics are always diffusive (N**2).  Long jumps with
    finite variance are diffusive for theta >= 1-gamma and accelerate to
    N**(gamma+theta+1) below; with infinite variance the supported scales
    are N**gamma at theta = -1 and N**(gamma+theta+1) for theta < -1.
    """
    N = kernel.N
    if kernel.kind == NEAREST_NEIGHBOR:
        return float(N) ** 2
    gamma = kernel.gamma
    if gamma > 2.0:
        if theta >= 1.0 - gamma:
            return float(N) ** 2
        return float(N) ** (gamma + theta + 1.0)
    if gamma == 2.0:
        raise UnsupportedRegimeError(
            "gamma = 2 needs the N**2/log N scale, which is not implemented; "
            "pass theta_N explicitly to force a scale")
    # infinite variance, gamma in (1, 2)
    if theta == -1.0:
        return float(N) ** gamma
    if theta < -1.0:
        return float(N) ** (gamma + theta + 1.0)
    raise UnsupportedRegimeError(
        f"no limiting behavior is known for gamma={gamma}, theta={theta}; "
        "pass theta_N explicitly for exploratory runs")


@dataclass(frozen=True)
class ModelParams:
    """Full parameterization of the exclusion process with reservoirs.

    The bulk is the lattice 1..N-1; sites 0 and N act as reservoirs with
    densities alpha and beta whose strength carries the factor
    kappa * N**-theta.  ``theta_N`` is the time-scale factor Theta(N); when
    omitted it is derived from the kernel and theta.
    """

    N: int
    alpha: float
    beta: float
    kappa: float
    theta: float
    kernel: JumpKernel
    theta_N: float | None = None

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        for name, val in (("alpha", self.alpha), ("beta", self.beta)):
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.kernel.N != self.N:
            raise ValueError(f"kernel was built for N={self.kernel.N}, params have N={self.N}")
        if self.theta_N is None:
            object.__setattr__(self, "theta_N", default_time_scale(self.kernel, self.theta))
        elif self.theta_N <= 0:
            raise ValueError("theta_N must be positive")

    @property
    def n_sites(self) -> int:
        return self.N - 1

    @property
    def boundary_factor(self) -> float:
        """kappa * N**-theta, the reservoir strength common to all flip rates."""
        return self.kappa * float(self.N) ** (-self.theta)

    def site_positions(self) -> np.ndarray:
        """Macroscopic positions x/N of the bulk sites."""
        return np.arange(1, self.N) / self.N

    def flip_weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-site reservoir weights (kappa N**-theta p(x), kappa N**-theta p(N-x))."""
        x = np.arange(1, self.N)
        lam = self.boundary_factor
        return lam * self.kernel.prob(x), lam * self.kernel.prob(self.N - x)


def nearest_neighbor_params(N: int, alpha: float, beta: float, kappa: float = 1.0,
                            theta: float = 0.0, theta_N: float | None = None) -> ModelParams:
    kern = build_kernel(NEAREST_NEIGHBOR, N)
    return ModelParams(N=N, alpha=alpha, beta=beta, kappa=kappa, theta=theta,
                       kernel=kern, theta_N=theta_N)


def long_jump_params(N: int, gamma: float, alpha: float, beta: float, kappa: float = 1.0,
                     theta: float = 0.0, theta_N: float | None = None,
                     series_tol: float = 1e-12) -> ModelParams:
    kern = build_kernel(LONG_JUMP, N, gamma=gamma, series_tol=series_tol)
    return ModelParams(N=N, alpha=alpha, beta=beta, kappa=kappa, theta=theta,
                       kernel=kern, theta_N=theta_N)


# -- initial measures ---------------------------------------------------------


@dataclass(frozen=True)
class InitialProfile:
    """Initial density profile g: [0,1] -> [0,1] with quadrature breakpoints."""

    fn: Callable[[float], float]
    name: str = "custom"
    breakpoints: tuple[float, ...] = ()

    def __call__(self, q):
        return self.fn(q)

    def on_lattice(self, N: int) -> np.ndarray:
        q = np.arange(1, N) / N
        vals = np.asarray([float(self.fn(v)) for v in q])
        if np.any(vals < 0) or np.any(vals > 1):
            raise ValueError("initial profile must map into [0, 1]")
        return vals


# preset shapes are small callable records so ensembles can cross process
# boundaries (closures would not pickle)


@dataclass(frozen=True)
class _Step:
    low: float
    high: float
    split: float

    def __call__(self, q):
        return self.low if q < self.split else self.high


@dataclass(frozen=True)
class _Linear:
    left: float
    right: float

    def __call__(self, q):
        return self.left + (self.right - self.left) * q


@dataclass(frozen=True)
class _Constant:
    value: float

    def __call__(self, q):
        return self.value


@dataclass(frozen=True)
class _Bump:
    base: float
    amplitude: float
    center: float
    width: float

    def __call__(self, q):
        u = (q - self.center) / self.width
        if abs(u) >= 1.0:
            return self.base
        return self.base + self.amplitude * math.exp(1.0 - 1.0 / (1.0 - u * u))


def step_profile(low: float = 0.2, high: float = 0.8, split: float = 0.5) -> InitialProfile:
    return InitialProfile(_Step(low, high, split), name="step", breakpoints=(split,))


def linear_profile(left: float = 0.0, right: float = 1.0) -> InitialProfile:
    return InitialProfile(_Linear(left, right), name="linear")


def constant_profile(value: float) -> InitialProfile:
    return InitialProfile(_Constant(value), name="constant")


def bump_profile(base: float = 0.1, amplitude: float = 0.8, center: float = 0.5,
                 width: float = 0.3) -> InitialProfile:
    """Smooth bump of compact support [center-width, center+width]."""
    return InitialProfile(_Bump(base, amplitude, center, width), name="bump",
                          breakpoints=(center - width, center + width))


_PRESETS = {
    "step": step_profile,
    "linear": linear_profile,
    "constant": lambda value=0.5: constant_profile(value),
    "bump": bump_profile,
}


def profile_preset(name: str, **kwargs) -> InitialProfile:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown profile preset {name!r}; choose from {sorted(_PRESETS)}")
    return factory(**kwargs)


@dataclass(frozen=True)
class BernoulliProduct:
    """Product measure with P(eta(x)=1) = g(x/N), independent across sites."""

    profile: InitialProfile


@dataclass(frozen=True)
class ExactConfiguration:
    """Deterministic initial configuration."""

    occupancy: tuple[int, ...]


@dataclass(frozen=True)
class StationarySample:
    """Draw the initial configuration from the exact stationary law (small N)."""


InitialMeasure = BernoulliProduct | ExactConfiguration | StationarySample
