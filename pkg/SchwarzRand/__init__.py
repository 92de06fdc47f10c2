# Randomized, greedy and OMP subspace correction with a spectral toolbox
# for the smoothness classes and a harness that checks the expected-error bounds
from .Common import *
from .HilbertSpace import InnerProductSpace, ProductSpace, LocalSubspace, SubspaceFamily, CollectiveFamily
from .Measure import DiscreteMeasure, RandomStream
from .Solver import (Problem, NoiseSpec, SolverTrajectory, alpha, alpha_bar, xi_optimal, run_random, run_omp,
                     run_greedy, run_noisy, run_variant)
from .Spectral import (SpectralDecomposition, SmoothnessClassReport, covariance_operator, spectral_decomp,
                       synthesis_decomp, hs_norm, a2_norm, aq_gamma_norm_orthonormal, a1_upper, make_hs_element,
                       class_report)
from .Instance import (Instance, orthonormal_instance, unit_dictionary_instance, rkhs_instance, collective_instance,
                       RkhsSpec, CollectiveSpec, sigma_eps)
from .Harness import (ExpectationCurve, BoundReport, mc_expectation, enumerate_expectation, bound_curves,
                      lower_bound_curve, rate_fit)
from .Suite import verify
from .Config import RunConfig

__version__ = '0.1.0'
