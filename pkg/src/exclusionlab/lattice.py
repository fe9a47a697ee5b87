"""Lattice configurations and the exact event-level generator.

The generator has two event families:

* exchanges: every unordered pair {x, y} of bulk sites swaps its occupation
  values at rate p(y-x); only pairs with differing occupations change the
  state, and only those are enumerated;
* flips: site x flips at rate
  kappa N**-theta [p(x) c(eta(x), alpha) + p(N-x) c(eta(x), beta)]
  with c(0, r) = r (creation) and c(1, r) = 1 - r (annihilation).

With the nearest-neighbor kernel this reduces to exchanges at rate 1/2 per
discrepant bond and flips only at sites 1 and N-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .params import ModelParams

MAX_ORACLE_STATES = 4096


@dataclass
class LatticeState:
    """Occupation configuration on the bulk plus the microscopic clock."""

    occupancy: np.ndarray
    micro_time: float = 0.0

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancy, dtype=np.uint8)
        if occ.ndim != 1:
            raise ValueError("occupancy must be one-dimensional")
        if np.any(occ > 1):
            raise ValueError("occupancy entries must be 0 or 1")
        self.occupancy = occ

    @property
    def n_sites(self) -> int:
        return self.occupancy.shape[0]

    def macro_time(self, theta_N: float) -> float:
        return self.micro_time / theta_N

    def copy(self) -> "LatticeState":
        return LatticeState(self.occupancy.copy(), self.micro_time)

    def particle_count(self) -> int:
        return int(self.occupancy.sum())


Exchange = tuple[str, int, int]   # ("exchange", x, y) with x < y, sites in 1..N-1
Flip = tuple[str, int]            # ("flip", x)


def apply_event(state: LatticeState, event) -> None:
    """Apply a single event in place; exclusion is preserved by construction."""
    occ = state.occupancy
    if event[0] == "exchange":
        _, x, y = event
        occ[x - 1], occ[y - 1] = occ[y - 1], occ[x - 1]
    elif event[0] == "flip":
        _, x = event
        occ[x - 1] ^= 1
    else:
        raise ValueError(f"unknown event {event!r}")


def flip_rate(occ_x: int, alpha_weight: float, beta_weight: float,
              alpha: float, beta: float) -> float:
    """Total flip rate at a site given its occupation and reservoir weights."""
    if occ_x:
        return alpha_weight * (1.0 - alpha) + beta_weight * (1.0 - beta)
    return alpha_weight * alpha + beta_weight * beta


def event_rates(state: LatticeState, params: ModelParams) -> dict:
    """Enumerate state-changing events with their microscopic rates.

    Exchanges of equal occupations are no-ops and are suppressed; the law of
    the process is unchanged.
    """
    occ = state.occupancy
    n = params.n_sites
    if occ.shape[0] != n:
        raise ValueError("state size does not match params")
    kern = params.kernel
    rates: dict = {}
    ptab = kern.prob_table()
    for x in range(1, n + 1):
        for y in range(x + 1, n + 1):
            if occ[x - 1] != occ[y - 1]:
                p = ptab[y - x - 1]
                if p > 0.0:
                    rates[("exchange", x, y)] = p
    wl, wr = params.flip_weights()
    for x in range(1, n + 1):
        r = flip_rate(occ[x - 1], wl[x - 1], wr[x - 1], params.alpha, params.beta)
        if r > 0.0:
            rates[("flip", x)] = r
    return rates


def total_rate(state: LatticeState, params: ModelParams) -> float:
    return float(sum(event_rates(state, params).values()))


# -- desk-scale exact oracle ---------------------------------------------------


def enumerate_states(N: int) -> list[tuple[int, ...]]:
    n_states = 1 << (N - 1)
    if n_states > MAX_ORACLE_STATES:
        raise ValueError(f"state space 2**{N - 1} exceeds the oracle cap {MAX_ORACLE_STATES}")
    return list(itertools.product((0, 1), repeat=N - 1))


def generator_matrix(params: ModelParams) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Dense rate matrix Q over the full configuration space (desk scale only).

    Q[i, j] is the jump rate from state i to state j; diagonals make rows
    sum to zero exactly.
    """
    states = enumerate_states(params.N)
    index = {s: i for i, s in enumerate(states)}
    n = params.n_sites
    Q = np.zeros((len(states), len(states)))
    for s in states:
        i = index[s]
        st = LatticeState(np.array(s, dtype=np.uint8))
        for event, rate in event_rates(st, params).items():
            t = st.copy()
            apply_event(t, event)
            Q[i, index[tuple(int(v) for v in t.occupancy)]] += rate
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return Q, states


def bernoulli_weight(state: tuple[int, ...], rho: float) -> float:
    k = sum(state)
    return rho ** k * (1.0 - rho) ** (len(state) - k)


def detailed_balance_check(params: ModelParams) -> float:
    """Maximal detailed-balance violation of the Bernoulli(rho) product measure.

    Only meaningful at alpha = beta = rho, where the measure is reversible;
    other parameter choices are rejected.
    """
    if params.alpha != params.beta:
        raise ValueError("detailed balance is only claimed for alpha = beta")
    rho = params.alpha
    Q, states = generator_matrix(params)
    nu = np.array([bernoulli_weight(s, rho) for s in states])
    flux = nu[:, None] * Q
    np.fill_diagonal(flux, 0.0)
    return float(np.abs(flux - flux.T).max())
