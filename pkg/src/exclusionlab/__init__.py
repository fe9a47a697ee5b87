"""Simulation and verification laboratory for symmetric exclusion dynamics
coupled to boundary reservoirs: exact event-driven simulation, closed-form
stationary objects, discrete Kolmogorov systems, and the limiting equations
(heat with Dirichlet/Robin/Neumann sides, reaction and reaction-diffusion,
regional-fractional reaction-diffusion), with cross-checks between layers.
"""

from .kernels import (LONG_JUMP, NEAREST_NEIGHBOR, JumpKernel, KernelError,
                      build_kernel)
from .params import (BernoulliProduct, ExactConfiguration, InitialProfile,
                     ModelParams, StationarySample, UnsupportedRegimeError,
                     bump_profile, constant_profile, default_time_scale,
                     linear_profile, long_jump_params, nearest_neighbor_params,
                     profile_preset, step_profile)
from .lattice import (LatticeState, apply_event, detailed_balance_check,
                      event_rates, generator_matrix, total_rate)
from .stationary import (StationaryOracle, ab_coefficients, brute_force_stationary,
                         log_partition, macro_profile, max_abs_phi_ss, phi_ss,
                         phi_ss_matrix, rho_ss)
from .kmc import (AbsorbedState, EnsembleResult, EventCapExceeded, EventSampler,
                  RngStream, SnapshotSchedule, init_state, run_ensemble)
from .observables import (CorrelationEstimate, DensityEstimate,
                          accumulate_correlation, accumulate_profile,
                          boundary_box_gap_average, boundary_time_average,
                          box_average, dynkin_probe, pair, pair_many)
from .operators import (correlation_generator, correlation_source,
                        longjump_generator, profile_generator, wedge_sites)
from .spectral import (heat_dirichlet_spectral, robin_basis, robin_eigenvalues,
                       robin_spectral_solution)
from .pde import (Regime, correlation_ode, correlation_steady_state,
                  discrete_profile_ode, dispatch_params, fractional_generator_ode,
                  kernel_laplacian_check, longjump_profile_ode, reaction_diffusion_fd,
                  reaction_exact, regime_dispatch, stationary_profile_ode)
from .fractional import (fractional_identity_check, frac_laplacian_line,
                         gamma_seminorm_form, regional_frac_laplacian_apply)

__version__ = "0.1.0"
