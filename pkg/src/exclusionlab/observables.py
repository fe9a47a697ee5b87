"""Statistical objects computed from trajectories and snapshot ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams


def pair(occ: np.ndarray, G, N: int) -> float:
    """Empirical-measure pairing <pi, G> = (N-1)^-1 sum_x G(x/N) eta(x)."""
    occ = np.asarray(occ)
    if occ.shape[-1] != N - 1:
        raise ValueError("occupation vector does not match N")
    g = np.array([float(G(x / N)) for x in range(1, N)])
    return float(occ.astype(float) @ g) / (N - 1)


def pair_many(occs: np.ndarray, G, N: int) -> np.ndarray:
    """Pairings for a stack of configurations (..., N-1)."""
    g = np.array([float(G(x / N)) for x in range(1, N)])
    return occs.astype(float) @ g / (N - 1)


@dataclass(frozen=True)
class DensityEstimate:
    """Per-site ensemble mean and standard error, one row per snapshot."""

    mean: np.ndarray     # (snapshots, N-1)
    stderr: np.ndarray
    replicas: int
    alpha: float
    beta: float

    def with_boundary(self, k: int = 0) -> np.ndarray:
        return np.concatenate([[self.alpha], self.mean[k], [self.beta]])


def accumulate_profile(occupations: np.ndarray, params: ModelParams) -> DensityEstimate:
    """Unbiased per-site mean with stderr = sample sd / sqrt(replicas)."""
    occ = np.asarray(occupations, dtype=float)
    if occ.ndim != 3:
        raise ValueError("expected (replicas, snapshots, sites)")
    R = occ.shape[0]
    if R < 2:
        raise ValueError("at least 2 replicas are required for a standard error")
    mean = occ.mean(axis=0)
    sd = occ.std(axis=0, ddof=1)
    return DensityEstimate(mean=mean, stderr=sd / np.sqrt(R), replicas=R,
                           alpha=params.alpha, beta=params.beta)


@dataclass(frozen=True)
class CorrelationEstimate:
    """Centered pair moments phi(x, y) on x < y, with standard errors."""

    value: np.ndarray    # (snapshots, N-1, N-1), upper triangle
    stderr: np.ndarray
    replicas: int

    def at(self, k: int, x: int, y: int) -> tuple[float, float]:
        return float(self.value[k, x - 1, y - 1]), float(self.stderr[k, x - 1, y - 1])


def accumulate_correlation(occupations: np.ndarray) -> CorrelationEstimate:
    """Plug-in centered cross moments with (R-1) normalization.

    The standard error treats per-replica products as i.i.d. samples; the
    extra noise of the plug-in mean is O(1/R) and ignored.
    """
    occ = np.asarray(occupations, dtype=float)
    if occ.ndim != 3:
        raise ValueError("expected (replicas, snapshots, sites)")
    R, S, n = occ.shape
    if R < 2:
        raise ValueError("at least 2 replicas are required")
    mean = occ.mean(axis=0)
    value = np.zeros((S, n, n))
    stderr = np.zeros((S, n, n))
    for s in range(S):
        # moments of the per-replica products, without materializing them
        dev = occ[:, s, :] - mean[s]
        prod_sum = dev.T @ dev
        value[s] = prod_sum / (R - 1)
        sq = dev * dev
        m2 = (sq.T @ sq) / R
        var_prod = np.maximum(m2 - (prod_sum / R) ** 2, 0.0) * R / (R - 1)
        stderr[s] = np.sqrt(var_prod / R)
    mask = np.zeros((n, n), dtype=bool)
    mask[np.triu_indices(n, k=1)] = True
    value *= mask
    stderr *= mask
    return CorrelationEstimate(value=value, stderr=stderr, replicas=R)


def box_average(occ: np.ndarray, N: int, eps: float, side: str = "left") -> float:
    """Average occupation over the boundary box of floor(eps N) + 1 sites."""
    occ = np.asarray(occ)
    width = min(int(np.floor(eps * N)) + 1, N - 1)
    if side == "left":
        return float(occ[:width].mean())
    if side == "right":
        return float(occ[-width:].mean())
    raise ValueError("side must be 'left' or 'right'")


def indicator_pairing(occ: np.ndarray, N: int, eps: float, side: str = "left") -> float:
    """Pairing with the approximation of identity eps^-1 1_(0,eps) (or mirrored)."""
    occ = np.asarray(occ, dtype=float)
    x = np.arange(1, N) / N
    if side == "left":
        w = (x < eps).astype(float) / eps
    elif side == "right":
        w = (x > 1.0 - eps).astype(float) / eps
    else:
        raise ValueError("side must be 'left' or 'right'")
    return float(occ @ w) / (N - 1)


# trajectory-coupled probes live next to the event loops; re-export them here
from .kmc import (generator_action, run_dynkin_ensemble,  # noqa: E402,F401
                  run_time_average_ensemble)


def dynkin_probe(params: ModelParams, measure, G, times, replicas: int,
                 master_seed: int):
    """Ensemble of realized pairing martingales and their carre-du-champ
    integrals; see ``run_dynkin_ensemble``."""
    return run_dynkin_ensemble(params, measure, G, times, replicas, master_seed)


def boundary_time_average(params: ModelParams, measure, site: int, target: float,
                          horizon: float, replicas: int, master_seed: int) -> np.ndarray:
    """Realized (1/t) | int_0^t (eta_s(site) - target) ds | per replica."""
    return run_time_average_ensemble(params, measure, site, horizon, replicas,
                                     master_seed, target=target)


def boundary_box_gap_average(params: ModelParams, measure, site: int, eps: float,
                             horizon: float, replicas: int, master_seed: int) -> np.ndarray:
    """Realized (1/t) | int_0^t (eta_s(site) - box average) ds | per replica."""
    return run_time_average_ensemble(params, measure, site, horizon, replicas,
                                     master_seed, box_eps=eps)
