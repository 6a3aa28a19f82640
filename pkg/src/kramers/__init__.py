"""Phase-space wave-field simulator for a dissipative Klein-Kramers model.

A complex field phi(x, p, t) evolves under a transport-plus-phase generator
and a gamma-scaled dissipative generator.  At large gamma the dynamics
relaxes exponentially onto a slow subspace where it reduces to a
Schrodinger equation; at gamma = 0 the density |phi|^2 obeys the classical
Liouville equation.  The package ships the simulator, the slow-subspace
projector, independent reference solvers, and verification pipelines for
all three regimes.
"""

from ._version import __version__
from .analysis import (DecayFit, MetricSeries, ScalingReport,
                       SlowDynamicsScenario, convergence_order, field_error,
                       fit_decay_rate, gamma_scaling_study)
from .errors import (AccuracyWarning, BoundaryLeakWarning, ConfigError,
                     DegenerateKernelError, DivergenceError,
                     ExtrapolationWarning, GridMismatchError, KramersError,
                     ValidationError)
from .fields import (DensityField, PsiField, SpectralField, WaveField,
                     boundary_leak_ratio, l2_norm, marginal_x,
                     phase_space_integral, rho_from_phi, x_fourier,
                     x_fourier_inverse)
from .grid import Grid, GridSpec, make_grid, recommended_pmax
from .integrate import (ExactBPropagator, StepPlan, Trajectory,
                        exact_b_propagator, evolve, stable_dt, step_rk4)
from .operators import (OperatorContext, apply_dissipation, apply_dp,
                        apply_dx, apply_transport, rhs_classical_kk,
                        rhs_liouville, rhs_modified_kk)
from .oracles import (OUMode, RelativisticState, energy_from_momentum,
                      free_phase, liouville_transport, ou_mode, ou_mode_field,
                      proper_time, proper_time_from_momentum, schrodinger_evolve,
                      schrodinger_rhs, velocity_from_momentum)
from .params import (DoubleWellPotential, FreePotential, HamiltonianMode,
                     HarmonicPotential, Params, PolynomialPotential, Potential,
                     build_params, dH_dp, dH_dx, eval_hamiltonian, make_potential)
from .projection import (ProjectionContext, embed_psi, embed_psi_quadrature,
                         extract_psi, project_p0)
from .snapshot import read_snapshot, snapshot_checksum, write_snapshot
from .states import embedded_gaussian, gaussian_psi, random_smooth_field
