"""Trajectory-level boundary diagnostics and the pairing martingale.

Time averages of the edge occupation approach the reservoir density when
the boundary is fast and the local box average when it is slow; the
pairing martingale has mean zero with variance equal to the mean of its
realized bracket.
"""

import math

import numpy as np

from exclusionlab import (BernoulliProduct, boundary_box_gap_average,
                          boundary_time_average, dynkin_probe,
                          nearest_neighbor_params)
from exclusionlab.params import constant_profile, step_profile

print("fast boundary (theta=0): time-average gap |eta(1) - alpha| vs N")
for N in (16, 32, 64, 128):
    p = nearest_neighbor_params(N, 0.3, 0.7, 1.0, 0.0)
    vals = boundary_time_average(p, BernoulliProduct(constant_profile(0.5)),
                                 site=1, target=0.3, horizon=1.0,
                                 replicas=400, master_seed=1)
    print(f"  N={N:4d}: {vals.mean():.4f} +- {vals.std(ddof=1)/math.sqrt(len(vals)):.4f}")

print("\nslow boundary (theta=2): time-average gap |eta(1) - box avg| vs N")
for N in (16, 32, 64, 128):
    p = nearest_neighbor_params(N, 0.3, 0.7, 1.0, 2.0)
    vals = boundary_box_gap_average(p, BernoulliProduct(constant_profile(0.5)),
                                    site=1, eps=0.1, horizon=1.0,
                                    replicas=400, master_seed=2)
    print(f"  N={N:4d}: {vals.mean():.4f} +- {vals.std(ddof=1)/math.sqrt(len(vals)):.4f}")

print("\npairing martingale, N=64, balanced boundaries, G = q(1-q)")
p = nearest_neighbor_params(64, 0.2, 0.8, 1.0, 1.0)
m, qv = dynkin_probe(p, BernoulliProduct(step_profile(0.2, 0.8)),
                     lambda q: q * (1 - q), (0.05, 0.1), replicas=4000,
                     master_seed=3)
for k, t in enumerate((0.05, 0.1)):
    mean = m[:, k].mean()
    se = m[:, k].std(ddof=1) / math.sqrt(m.shape[0])
    print(f"  t={t}: mean M = {mean:+.2e} ({abs(mean)/se:.2f} se), "
          f"Var M = {m[:, k].var(ddof=1):.3e}, mean bracket = {qv[:, k].mean():.3e}")
