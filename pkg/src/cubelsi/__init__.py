"""Numerical companion for vector-valued log-Sobolev inequalities on the Hamming cube."""
__version__ = "0.1.0"

from .cube import (CubeFunction, CubePoint, WalshSpectrum, heat_semigroup, inverse_walsh, laplacian,
                   multilinear_eval, partial_derivative, partials, walsh_transform)
from .entropy import ent, ent_alpha, entropy_bounds_constants
from .errors import ArgumentError, CapabilityError, InequalityViolation, NumericalError
from .gradients import GradientTermConfig, QuadratureConfig, rademacher_gradient
from .inequalities import InequalityId, InequalityReport, evaluate, evaluate_kernel_form
from .norms import EUCLIDEAN, OrliczGauge, TargetNorm, lp_norm, orlicz_norm
from .quotient import EquivalenceRelation, distortion_lower_bound, quotient_metric
from .search import SearchConfig, extremize, extremize_sweep
from .symgroup import PermFunction, evaluate_dsc, evaluate_kn, evaluate_sym_lsi

__all__ = [name for name in dir() if not name.startswith("_")]
