"""Stationary structure of the boundary-driven chain.

Walks through the closed-form stationary profile and pair correlations,
checks them against the brute-force stationary law of the small chain, and
draws the three macroscopic stationary branches.
"""

import numpy as np

from exclusionlab import (brute_force_stationary, macro_profile,
                          nearest_neighbor_params, phi_ss, rho_ss)
from exclusionlab.stationary import phi_ss_matrix
from exclusionlab import svgplot

# exact oracle vs closed forms on a desk-scale chain
p = nearest_neighbor_params(5, alpha=0.0, beta=1.0, kappa=1.0, theta=0.0)
oracle = brute_force_stationary(p)
print("N=5, theta=0, densities 0 and 1")
print("site  closed-form  brute-force")
for x in range(1, 5):
    print(f"{x:4d}  {rho_ss(x, p):11.8f}  {oracle.profile[x - 1]:11.8f}")

print("\npair correlations (x, y) closed vs oracle")
for x in range(1, 5):
    for y in range(x + 1, 5):
        print(f"({x},{y})  {phi_ss(x, y, p):+.8f}  {oracle.correlation(x, y):+.8f}")

# the famous corner value at N=4
p4 = nearest_neighbor_params(4, 0.0, 1.0, 1.0, 0.0)
print(f"\nN=4 corner correlation phi(1,2) = {phi_ss(1, 2, p4):.10f} (= -1/24)")

# macroscopic stationary branches for densities 0.2 / 0.8
q = np.linspace(0.0, 1.0, 201)
series = [
    (q, macro_profile(q, 0.0, 1.0, 0.2, 0.8), "fast boundaries (pinned)"),
    (q, macro_profile(q, 1.0, 1.0, 0.2, 0.8), "balanced (partial slip)"),
    (q, macro_profile(q, 2.0, 1.0, 0.2, 0.8), "slow boundaries (flat)"),
]
svgplot.line_plot(series, "demo_stationary_branches.svg",
                  title="stationary profiles, reservoir densities 0.2 / 0.8",
                  xlabel="q", ylabel="density")
print("\nwrote demo_stationary_branches.svg")

# correlation heatmap at a moderate size
p64 = nearest_neighbor_params(64, 0.0, 1.0, 1.0, 1.0)
svgplot.heatmap(phi_ss_matrix(p64), "demo_correlations.svg",
                title="stationary correlations, N=64, balanced boundaries")
print("wrote demo_correlations.svg")
