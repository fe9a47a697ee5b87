"""Event-driven simulation of the exclusion process with reservoirs.

Two samplers realize the same law:

* ``exact``: Fenwick-tree table over bond and flip slots (nearest-neighbor
  only), sampling true rates with O(log N) local updates;
* ``thinning``: state-independent envelope (all pairs at rate p(y-x), all
  flips at their maximal rate) with acceptance by the true-to-envelope
  ratio; rejected attempts advance time only.

Replicas are independent; a (master_seed, replica_id) pair determines the
trajectory bit-for-bit, regardless of thread count or replica order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .kernels import NEAREST_NEIGHBOR
from .lattice import LatticeState, apply_event, event_rates
from .params import (BernoulliProduct, ExactConfiguration, InitialMeasure,
                     ModelParams, StationarySample)

DEFAULT_EVENT_CAP = 10**9


class AbsorbedState(RuntimeError):
    """Total rate vanished; the caller decides whether to jump to the horizon."""


class EventCapExceeded(RuntimeError):
    """A replica exceeded its event budget; partial results are attached."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class RngStream:
    """Deterministic per-replica stream derived from (master_seed, replica_id)."""

    master_seed: int
    replica_id: int = 0

    def kernel_seed(self) -> int:
        ss = np.random.SeedSequence((self.master_seed, self.replica_id))
        return int(ss.generate_state(1, dtype=np.uint32)[0])

    def generator(self, purpose: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(
            np.random.SeedSequence((self.master_seed, self.replica_id, purpose))))


@dataclass(frozen=True)
class SnapshotSchedule:
    """Macroscopic observation times; snapshots use the state at the last
    event time not exceeding each requested time."""

    times: tuple[float, ...]

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        if any(t < 0 for t in ts):
            raise ValueError("snapshot times must be >= 0")
        if list(ts) != sorted(ts):
            raise ValueError("snapshot times must be sorted")
        object.__setattr__(self, "times", ts)

    @property
    def horizon(self) -> float:
        return self.times[-1] if self.times else 0.0

    def micro(self, theta_N: float) -> np.ndarray:
        return np.asarray(self.times, dtype=float) * theta_N


def build_alias(weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias table for a nonnegative weight vector."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be nonnegative with positive sum")
    K = w.size
    prob = w * K / w.sum()
    alias = np.zeros(K, dtype=np.int64)
    small = [i for i in range(K) if prob[i] < 1.0]
    large = [i for i in range(K) if prob[i] >= 1.0]
    prob = prob.copy()
    while small and large:
        s = small.pop()
        l = large.pop()
        alias[s] = l
        prob[l] -= 1.0 - prob[s]
        (small if prob[l] < 1.0 else large).append(l)
    for i in large + small:
        prob[i] = 1.0
    return prob, alias


# -- initial states -----------------------------------------------------------


def init_state(measure: InitialMeasure, params: ModelParams,
               rng: np.random.Generator) -> LatticeState:
    """Draw an initial configuration; micro clock starts at zero."""
    n = params.n_sites
    if isinstance(measure, BernoulliProduct):
        probs = measure.profile.on_lattice(params.N)
        occ = (rng.random(n) < probs).astype(np.uint8)
        return LatticeState(occ)
    if isinstance(measure, ExactConfiguration):
        occ = np.asarray(measure.occupancy, dtype=np.uint8)
        if occ.shape[0] != n:
            raise ValueError("configuration length does not match the lattice")
        return LatticeState(occ.copy())
    if isinstance(measure, StationarySample):
        from .stationary import brute_force_stationary
        oracle = brute_force_stationary(params)
        idx = rng.choice(len(oracle.states), p=np.clip(oracle.distribution, 0, None)
                         / np.clip(oracle.distribution, 0, None).sum())
        return LatticeState(np.array(oracle.states[idx], dtype=np.uint8))
    raise TypeError(f"unknown initial measure {measure!r}")


# -- single-step reference sampler (desk scale) --------------------------------


@dataclass
class EventSampler:
    """Reference sampler over the enumerated rate table (exact mode) or the
    state-independent envelope (thinning mode).  Used for small-N checks;
    ensembles run through the compiled loops."""

    params: ModelParams
    mode: str = "exact"

    def __post_init__(self):
        if self.mode not in ("exact", "thinning"):
            raise ValueError("mode must be 'exact' or 'thinning'")

    def step(self, state: LatticeState, rng: np.random.Generator) -> tuple[float, object]:
        """Advance one event (or rejected attempt); returns (dt, event-or-None)."""
        if self.mode == "exact":
            rates = event_rates(state, self.params)
            total = sum(rates.values())
            if total <= 0.0:
                raise AbsorbedState("no state-changing event has positive rate")
            dt = rng.exponential(1.0 / total)
            events = list(rates)
            weights = np.array([rates[e] for e in events])
            event = events[rng.choice(len(events), p=weights / weights.sum())]
            state.micro_time += dt
            apply_event(state, event)
            return dt, event
        return self._thinning_step(state, rng)

    def _thinning_step(self, state, rng):
        p = self.params
        occ = state.occupancy
        n = p.n_sites
        kern = p.kernel
        ptab = kern.prob_table()
        z_weights = np.array([(n - z) * ptab[z - 1] for z in range(1, n)])
        wl, wr = p.flip_weights()
        env_l = max(p.alpha, 1.0 - p.alpha)
        env_r = max(p.beta, 1.0 - p.beta)
        r_bulk = float(z_weights.sum())
        r_left = float(wl.sum()) * env_l
        r_right = float(wr.sum()) * env_r
        total = r_bulk + r_left + r_right
        if total <= 0.0:
            raise AbsorbedState("envelope rate vanished")
        dt = rng.exponential(1.0 / total)
        state.micro_time += dt
        u = rng.random() * total
        if u < r_bulk and r_bulk > 0:
            z = 1 + rng.choice(n - 1, p=z_weights / r_bulk)
            x = 1 + rng.integers(0, n - z)
            if occ[x - 1] != occ[x + z - 1]:
                event = ("exchange", int(x), int(x + z))
                apply_event(state, event)
                return dt, event
            return dt, None
        if u < r_bulk + r_left:
            x = 1 + rng.choice(n, p=wl / wl.sum())
            accept = (1.0 - p.alpha if occ[x - 1] else p.alpha) / env_l
        else:
            x = 1 + rng.choice(n, p=wr / wr.sum())
            accept = (1.0 - p.beta if occ[x - 1] else p.beta) / env_r
        if rng.random() < accept:
            event = ("flip", int(x))
            apply_event(state, event)
            return dt, event
        return dt, None


# -- compiled ensemble runner ----------------------------------------------------


@dataclass(frozen=True)
class EnsembleResult:
    """Snapshot occupations for every replica: shape (replicas, snapshots, N-1)."""

    params: ModelParams
    schedule: SnapshotSchedule
    occupations: np.ndarray
    event_counts: np.ndarray
    master_seed: int
    sampler: str


def _resolve_sampler(params: ModelParams, sampler: str) -> str:
    if sampler == "auto":
        return "exact" if params.kernel.kind == NEAREST_NEIGHBOR else "thinning"
    if sampler == "exact" and params.kernel.kind != NEAREST_NEIGHBOR:
        raise ValueError("the exact-table sampler is nearest-neighbor only; use thinning")
    return sampler


def _nn_flip_weights(params: ModelParams) -> tuple[float, float, float, float]:
    """(wl1, wr1, wl2, wr2): reservoir weights at sites 1 and N-1.

    For N = 2 both reservoirs act on the single site, folded into the first
    slot; the second slot is disabled.
    """
    wl, wr = params.flip_weights()
    if params.n_sites == 1:
        return float(wl[0]), float(wr[0]), 0.0, 0.0
    return float(wl[0]), float(wr[0]), float(wl[-1]), float(wr[-1])


def _thinning_tables(params: ModelParams):
    n = params.n_sites
    ptab = params.kernel.prob_table()
    z_span = np.arange(1, n, dtype=np.int64)
    z_weights = (n - z_span) * ptab[:n - 1]
    keep = z_weights > 0
    z_span = z_span[keep]
    z_weights = z_weights[keep]
    if z_span.size:
        z_prob, z_alias = build_alias(z_weights)
        r_bulk = float(z_weights.sum())
    else:
        z_prob, z_alias = np.ones(1), np.zeros(1, dtype=np.int64)
        z_span = np.ones(1, dtype=np.int64)
        r_bulk = 0.0
    wl, wr = params.flip_weights()
    env_l = max(params.alpha, 1.0 - params.alpha)
    env_r = max(params.beta, 1.0 - params.beta)
    lx_prob, lx_alias = build_alias(wl)
    rx_prob, rx_alias = build_alias(wr)
    r_left = float(wl.sum()) * env_l
    r_right = float(wr.sum()) * env_r
    return (r_bulk, z_prob, z_alias, z_span,
            r_left, lx_prob, lx_alias, env_l,
            r_right, rx_prob, rx_alias, env_r)


def _initial_occupancy(measure, params, stream: RngStream) -> np.ndarray:
    return init_state(measure, params, stream.generator(purpose=1)).occupancy


def _run_one(params: ModelParams, measure, snap_micro: np.ndarray, horizon_micro: float,
             stream: RngStream, sampler: str, event_cap: int) -> tuple[np.ndarray, int, int]:
    occ = _initial_occupancy(measure, params, stream)
    n = params.n_sites
    snaps = np.zeros((snap_micro.size, n), dtype=np.uint8)
    seed = stream.kernel_seed()
    if sampler == "exact":
        wl1, wr1, wl2, wr2 = _nn_flip_weights(params)
        status, events, _ = _k.run_nn_exact(
            occ, 0.0, horizon_micro, snap_micro, snaps, wl1, wr1, wl2, wr2,
            params.alpha, params.beta, seed, event_cap)
    else:
        tables = _thinning_tables(params)
        status, events, _ = _k.run_thinning(
            occ, 0.0, horizon_micro, snap_micro, snaps,
            tables[0], tables[1], tables[2], tables[3],
            tables[4], tables[5], tables[6], tables[7], params.alpha,
            tables[8], tables[9], tables[10], tables[11], params.beta,
            seed, event_cap)
    return snaps, int(status), int(events)


def _run_chunk(args):
    (params, measure, snap_micro, horizon_micro, master_seed, replica_ids,
     sampler, event_cap) = args
    out = np.zeros((len(replica_ids), snap_micro.size, params.n_sites), dtype=np.uint8)
    counts = np.zeros(len(replica_ids), dtype=np.int64)
    statuses = np.zeros(len(replica_ids), dtype=np.int64)
    for j, rid in enumerate(replica_ids):
        snaps, status, events = _run_one(params, measure, snap_micro, horizon_micro,
                                         RngStream(master_seed, rid), sampler, event_cap)
        out[j] = snaps
        counts[j] = events
        statuses[j] = status
    return out, counts, statuses


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("EXH_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_ensemble(params: ModelParams, measure: InitialMeasure,
                 schedule: SnapshotSchedule, replicas: int, master_seed: int,
                 sampler: str = "auto", threads: int | None = None,
                 event_cap: int = DEFAULT_EVENT_CAP,
                 observer=None) -> EnsembleResult:
    """Run independent replicas and collect snapshot occupations.

    Results are reproducible: the trajectory of replica r depends only on
    (master_seed, r) and the parameters.  ``observer(replica_id, snaps)``
    receives every replica's snapshot block exactly once, in replica order.
    Exceeding ``event_cap`` raises EventCapExceeded with diagnostics.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    sampler = _resolve_sampler(params, sampler)
    snap_micro = schedule.micro(params.theta_N)
    horizon_micro = schedule.horizon * params.theta_N
    threads = resolve_threads(threads)

    occ_all = np.zeros((replicas, snap_micro.size, params.n_sites), dtype=np.uint8)
    counts = np.zeros(replicas, dtype=np.int64)
    statuses = np.zeros(replicas, dtype=np.int64)

    if threads == 1 or replicas < 4:
        for rid in range(replicas):
            snaps, status, events = _run_one(params, measure, snap_micro, horizon_micro,
                                             RngStream(master_seed, rid), sampler, event_cap)
            occ_all[rid] = snaps
            counts[rid] = events
            statuses[rid] = status
    else:
        chunks = np.array_split(np.arange(replicas), threads * 4)
        jobs = [(params, measure, snap_micro, horizon_micro, master_seed,
                 chunk.tolist(), sampler, event_cap) for chunk in chunks if chunk.size]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for chunk, (out, cnt, st) in zip([j[5] for j in jobs], pool.map(_run_chunk, jobs)):
                occ_all[chunk] = out
                counts[chunk] = cnt
                statuses[chunk] = st

    capped = np.nonzero(statuses == _k.STATUS_EVENT_CAP)[0]
    if capped.size:
        rid = int(capped[0])
        raise EventCapExceeded(
            f"replica {rid} exceeded the event cap {event_cap}",
            diagnostics={"replica": rid, "event_cap": event_cap,
                         "events": int(counts[rid]), "horizon": schedule.horizon,
                         "n_capped": int(capped.size)})
    if observer is not None:
        for rid in range(replicas):
            observer(rid, occ_all[rid])
    return EnsembleResult(params=params, schedule=schedule, occupations=occ_all,
                          event_counts=counts, master_seed=master_seed, sampler=sampler)


# -- specialized trajectory probes ------------------------------------------------


def _require_nn(params: ModelParams, what: str):
    if params.kernel.kind != NEAREST_NEIGHBOR:
        raise ValueError(f"{what} is implemented for the nearest-neighbor model only")


def pairing_coefficients(params: ModelParams, G) -> dict:
    """Precompute the affine pieces of the generator action on <pi, G>.

    In microscopic units the action is affine in the occupations:
    L f(eta) = a_const + sum_i a_coef[i] eta(i); the bond jump weights and
    flip square weights assemble the carre-du-champ the same way.
    """
    n = params.n_sites
    N = params.N
    inv = 1.0 / (N - 1)
    g_vals = np.array([float(G(x / N)) for x in range(1, N)])
    wl, wr = params.flip_weights()
    a_coef = np.zeros(n)
    a_const = 0.0
    for b in range(n - 1):  # bond between sites b, b+1 (0-based)
        d = 0.5 * (g_vals[b] - g_vals[b + 1]) * inv
        a_coef[b + 1] += d
        a_coef[b] -= d
    a_coef -= (wl + wr) * g_vals * inv
    a_const += float(np.sum((wl * params.alpha + wr * params.beta) * g_vals)) * inv
    bond_w = np.array([0.5 * ((g_vals[b] - g_vals[b + 1]) * inv) ** 2 for b in range(n - 1)])
    gb1 = (g_vals[0] * inv) ** 2
    gb2 = (g_vals[-1] * inv) ** 2
    return {"g_vals": g_vals, "a_coef": a_coef, "a_const": a_const,
            "bond_w": bond_w, "gb1": gb1, "gb2": gb2, "inv": inv}


def generator_action(params: ModelParams, occ: np.ndarray, G) -> float:
    """Theta(N) * L <pi, G> at a configuration, via the affine closed form."""
    c = pairing_coefficients(params, G)
    micro = c["a_const"] + float(c["a_coef"] @ occ.astype(float))
    return params.theta_N * micro


def run_dynkin_ensemble(params: ModelParams, measure, G, times, replicas: int,
                        master_seed: int, event_cap: int = DEFAULT_EVENT_CAP
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Martingale probe: per replica and snapshot time, the realized
    M_t = <pi_t, G> - <pi_0, G> - int_0^t Theta(N) L <pi_s, G> ds and the
    realized carre-du-champ integral, both exact between events."""
    _require_nn(params, "the pairing martingale probe")
    sched = SnapshotSchedule(tuple(times))
    snap_micro = sched.micro(params.theta_N)
    horizon = sched.horizon * params.theta_N
    c = pairing_coefficients(params, G)
    wl1, wr1, wl2, wr2 = _nn_flip_weights(params)
    out_m = np.zeros((replicas, snap_micro.size))
    out_qv = np.zeros((replicas, snap_micro.size))
    for rid in range(replicas):
        stream = RngStream(master_seed, rid)
        occ = _initial_occupancy(measure, params, stream)
        m_buf = np.zeros(snap_micro.size)
        qv_buf = np.zeros(snap_micro.size)
        status, events, _ = _k.run_nn_dynkin(
            occ, horizon, snap_micro, m_buf, qv_buf,
            wl1, wr1, wl2, wr2, params.alpha, params.beta,
            c["g_vals"], c["a_coef"], c["a_const"], c["bond_w"], c["gb1"], c["gb2"],
            c["inv"], stream.kernel_seed(), event_cap)
        if status == _k.STATUS_EVENT_CAP:
            raise EventCapExceeded(f"replica {rid} exceeded the event cap",
                                   {"replica": rid, "events": int(events)})
        out_m[rid] = m_buf
        out_qv[rid] = qv_buf
    return out_m, out_qv


def run_time_average_ensemble(params: ModelParams, measure, site: int, horizon: float,
                              replicas: int, master_seed: int, target: float | None = None,
                              box_eps: float | None = None,
                              event_cap: int = DEFAULT_EVENT_CAP) -> np.ndarray:
    """Boundary-occupation time averages (1/t) | int_0^t (eta_s(site) - ref) ds |.

    ref is the fixed ``target`` density, or, when ``box_eps`` is given, the
    running average over the box of floor(eps N) + 1 sites at the same edge.
    Times are macroscopic; the integral is exact between events.
    """
    _require_nn(params, "the boundary time average")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if not 1 <= site <= params.n_sites:
        raise ValueError("site must lie in the bulk")
    use_box = box_eps is not None
    if use_box:
        box_len = int(np.floor(box_eps * params.N)) + 1
        box_len = min(box_len, params.n_sites)
        if site not in (1, params.n_sites):
            raise ValueError("box references are defined at the edge sites")
        target_val = 0.0
    else:
        if target is None:
            raise ValueError("either target or box_eps is required")
        box_len = 1
        target_val = float(target)
    wl1, wr1, wl2, wr2 = _nn_flip_weights(params)
    horizon_micro = horizon * params.theta_N
    out = np.zeros(replicas)
    for rid in range(replicas):
        stream = RngStream(master_seed, rid)
        occ = _initial_occupancy(measure, params, stream)
        status, events, integral, _ = _k.run_nn_time_average(
            occ, horizon_micro, site - 1, target_val, box_len, use_box,
            wl1, wr1, wl2, wr2, params.alpha, params.beta,
            stream.kernel_seed(), event_cap)
        if status == _k.STATUS_EVENT_CAP:
            raise EventCapExceeded(f"replica {rid} exceeded the event cap",
                                   {"replica": rid, "events": int(events)})
        # integral is in micro time; averages are macro-normalized either way
        out[rid] = abs(integral) / horizon_micro
    return out
