"""Transcendental Robin eigenvalues and the spectral heat solver.

The eigenvalue equation 2 c s cos(s) = (s^2 - c^2) sin(s) has one root per
bracket ((n-1) pi, n pi); each root sits just above its lower endpoint, so
indexed by the nearest multiple of pi the usual n^2 pi^2 asymptotic holds.
"""

import math

import numpy as np

from exclusionlab import robin_basis, robin_eigenvalues, robin_spectral_solution
from exclusionlab.params import step_profile
from exclusionlab.spectral import eigenvalue_residual, robin_stationary
from exclusionlab import svgplot

for coeff in (0.0, 1.0, 3.0):
    lams = robin_eigenvalues(coeff, 8)
    resid = max(eigenvalue_residual(l, coeff) for l in lams)
    roots = " ".join(f"{math.sqrt(l):.4f}" for l in lams)
    print(f"c={coeff}: sqrt(lambda_n) = {roots}   (max residual {resid:.1e})")

print("\nfirst eigenvalue at c=1:", robin_eigenvalues(1.0, 1)[0], "(~1.7071)")

# relaxation of a step profile under balanced boundaries
g = step_profile(0.2, 0.8)
grid = np.linspace(0.0, 1.0, 121)
series = []
for t in (0.01, 0.05, 0.2, 1.0, 4.0):
    series.append((grid, robin_spectral_solution(g, 1.0, t, grid, 0.2, 0.8),
                   f"t={t}"))
series.append((grid, robin_stationary(grid, 1.0, 0.2, 0.8), "stationary"))
svgplot.line_plot(series, "demo_robin_relaxation.svg",
                  title="Robin relaxation of a step profile", xlabel="q",
                  ylabel="density")
print("wrote demo_robin_relaxation.svg")

basis = robin_basis(1.0, 4)
series = [(grid, basis(n, grid), f"mode {n}") for n in range(1, 5)]
svgplot.line_plot(series, "demo_robin_modes.svg",
                  title="normalized Robin eigenfunctions (c=1)", xlabel="q",
                  ylabel="X_n(q)")
print("wrote demo_robin_modes.svg")
