"""hjs_lab: simulation lab for the deformed Hamilton-Jacobi system in 1D.

A real ensemble (R, S) with the kappa-deformed Hamilton-Jacobi equation and
continuity is equivalent, through psi = R exp(i S / kappa), to a linear
complex-field evolution.  This package provides both integrators, the exact
maps between the representations, the generalized probability density and
measurement layer, and a harmonic-oscillator benchmark with closed-form
oracles.
"""
__version__ = "0.1.0"

from .errors import (BlowUpError, ConfigurationError, ConsistencyError,
                     DegenerateStateError, DomainError, HJSLabError,
                     InputError, NodeError, ParameterError, PhaseUnwrapError)
from .grid import Grid, derivative, detrended_derivative, integrate, make_grid
from .state import (EnsembleState, Kappa, Potential, WaveField, as_kappa,
                    evaluate_potential, normalize)
from .embedding import (EmbeddingCandidate, admissibility_coefficient, embed,
                        extract, linear_residual, madelung_residual,
                        reference_candidates)
from .observables import (InterferenceReport, MomentSet, born_density,
                          born_density_embedded, commutator_defect,
                          expectation, interference_modulation, moments,
                          pseudo_unitarity_defect, theta_inner_product,
                          velocity_field)
from .solver_linear import (LinearRunConfig, Trajectory, evolve as evolve_linear,
                            kinetic_factor, step as step_linear)
from .solver_madelung import (MadelungRunConfig, evolve as evolve_madelung,
                              quantum_potential, rhs as madelung_rhs, step_rk4)
from .benchmark import (BenchmarkParams, ComparisonReport, closed_form_moments,
                        closed_form_variances, initial_state, run_benchmark)
from .config import ScenarioConfig, parse_config
from .scenarios import run_scenario
