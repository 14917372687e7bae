"""Numerical checks of weighted Hardy-type inequalities for Gaussian-type measures
and a finite-volume solver for the 1D p-Kolmogorov heat equation with a singular
potential."""
from .errors import (DivergentIntegralError, InfiniteMeasureError, MembershipError, NoWitnessFound,
                     ParameterError, PreconditionError, SolutionOverflow, StepRejected,
                     WrongEntryPointError)
from .functionals import (HardyReport, PoincareReport, ckn_a_deficit, ckn_beta_deficit,
                          closed_form_power_functional, gamma_window, hardy_deficit, poincare_deficit,
                          poincare_report)
from .measure import (ProblemParams, SpectralBounds, closed_form_moment, eval_density, hardy_constant,
                      normalization_constant, spectral_bounds, sphere_surface)
from .optimality import (SweepResult, find_violating_function, optimality_sweep, shifted_quotient,
                         threshold_bisection)
from .pkolmogorov import (Grid1D, PdeConfig, PdeState, SolveReport, detect_blowup,
                          gk_nonexistence_probe, growth_bound, solve, steklov_average, step,
                          truncated_potential, weak_residual)
from .profiles import Bump, Power, Product, Sum, Tabulated, TestFunction, default_corpus, load_corpus
from .quad import IntegralResult, QuadratureRule, full_integral, radial_integral

__version__ = "0.1.0"
