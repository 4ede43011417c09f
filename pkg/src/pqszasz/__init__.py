"""(p,q)-Szasz-Mirakjan-Kantorovich operators: evaluation, statistical
convergence diagnostics and rate certificates."""

from .bivariate import SeparableSum, apply_bivariate, bivariate_moment_closed_form
from .error_bounds import BoundCertificate, ModulusConfig, SetE
from .kantorovich import (
    DEFAULT_CONFIG,
    DEFAULT_SPEC,
    BasisSpec,
    NegativeCellWarning,
    OperatorConfig,
    apply,
    moment_closed_form,
    second_central_moment,
)
from .kernels import BACKEND
from .pq_core import DomainError, NumericalFailure, PQParams, pq_integer
from .pq_integral import pq_integral_from_zero, pq_integral_interval

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BasisSpec",
    "BoundCertificate",
    "DEFAULT_CONFIG",
    "DEFAULT_SPEC",
    "DomainError",
    "ModulusConfig",
    "NegativeCellWarning",
    "NumericalFailure",
    "OperatorConfig",
    "PQParams",
    "SeparableSum",
    "SetE",
    "apply",
    "apply_bivariate",
    "bivariate_moment_closed_form",
    "moment_closed_form",
    "pq_integer",
    "pq_integral_from_zero",
    "pq_integral_interval",
    "second_central_moment",
]
