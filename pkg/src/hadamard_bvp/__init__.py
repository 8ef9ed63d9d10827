"""Solver and analytic-certificate toolkit for two-point boundary value
problems driven by the Hadamard fractional derivative of order in (1, 2].

The problem solved is: fractional derivative of u equal to -F(x, u) on
(a, b) with 0 < a < b, u(a) = 0, u(b) = B.  The package computes numerical
solutions by fixed-point iteration on the Green's-function representation,
and emits sharp closed-form certificates for uniqueness and for eigenvalue
lower bounds of the homogeneous problem.
"""

from .core import (Interval, LogMonomial, Order, SampledFn, gamma_fn,
                   hadamard_derivative_log_monomial, hadamard_integral,
                   log_uniform_grid, to_log_coordinates)
from .certificates import (EigenCertificate, EigenVerdict, UniquenessCertificate,
                           Verdict, certify_uniqueness, eigen_lower_bound,
                           nonexistence_verdict, uniqueness_threshold)
from .errors import (CertificateInconsistencyError, DomainError, EvaluationError,
                     GridMismatchError, ParseError)
from .green import (GreenKernel, green_argmax, green_eval, green_max_integral,
                    green_row_integral)
from .solver import (GreenOperatorPlan, Problem, QuadratureConfig, SolveConfig,
                     SolveResult, apply_green_operator, build_plan,
                     linear_solve_direct, picard_solve, residual_check,
                     singular_integral)

__version__ = "0.1.0"

__all__ = [
    "CertificateInconsistencyError",
    "DomainError",
    "EigenCertificate",
    "EigenVerdict",
    "EvaluationError",
    "GreenKernel",
    "GreenOperatorPlan",
    "GridMismatchError",
    "Interval",
    "LogMonomial",
    "Order",
    "ParseError",
    "Problem",
    "QuadratureConfig",
    "SampledFn",
    "SolveConfig",
    "SolveResult",
    "UniquenessCertificate",
    "Verdict",
    "apply_green_operator",
    "build_plan",
    "certify_uniqueness",
    "eigen_lower_bound",
    "gamma_fn",
    "green_argmax",
    "green_eval",
    "green_max_integral",
    "green_row_integral",
    "hadamard_derivative_log_monomial",
    "hadamard_integral",
    "linear_solve_direct",
    "log_uniform_grid",
    "nonexistence_verdict",
    "picard_solve",
    "residual_check",
    "singular_integral",
    "to_log_coordinates",
    "uniqueness_threshold",
]
