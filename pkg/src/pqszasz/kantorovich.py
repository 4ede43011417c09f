"""The (p,q)-Szasz-Mirakjan-Kantorovich operator.

    K_n(f; x) = [n] sum_k p^-k q^k s_{n,k}(x) int_{cell_k} f(t) d_{p,q}t,
    cell_k = [ [k] / (q^(k-1) [n]),  [k+1] / (q^k [n]) ]

with the basis

    s_{n,k}(x) = C_k ([n] x)^k / ([k]! N([n] x)).

The default basis (big-E normaliser, q-triangular C_k = q^(k(k-1)/2)) is
the only combination that reproduces the closed-form moments; the
alternative is kept selectable so that the moment test can tell them apart.
At p = q = 1 the operator is the classical Szasz-Mirakjan-Kantorovich
operator with Poisson weights and Riemann cell integrals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from .pq_core import (
    DomainError,
    NumericalFailure,
    PQParams,
    log_exponential_terms,
    pq_integer,
)
from .pq_integral import as_array_function, jackson_integrals

__all__ = [
    "BasisSpec",
    "OperatorConfig",
    "NegativeCellWarning",
    "NegativeCellError",
    "basis_probabilities",
    "basis_weight",
    "basis_weights",
    "cell_endpoints",
    "apply",
    "quadrature_rule",
    "moment_closed_form",
    "second_central_moment",
]


class NegativeCellWarning(RuntimeWarning):
    """A Kantorovich cell integral came out negative (possible for q < p)."""


class NegativeCellError(DomainError):
    pass


@dataclass(frozen=True)
class OperatorConfig:
    series_tol: float = 1e-16
    max_terms: int = 10000
    integral_tol: float = 1e-14
    negative_cell_policy: str = "warn"

    def __post_init__(self):
        if not (0.0 < self.series_tol < 1.0):
            raise DomainError("series_tol must lie in (0, 1)")
        if not (0.0 < self.integral_tol < 1.0):
            raise DomainError("integral_tol must lie in (0, 1)")
        if self.max_terms < 8:
            raise DomainError("max_terms must be at least 8")
        if self.negative_cell_policy not in ("warn", "error"):
            raise DomainError("negative_cell_policy must be 'warn' or 'error'")


@dataclass(frozen=True)
class BasisSpec:
    exponential_kind: str = "big-E"
    power_coefficient: str = "q-triangular"

    def __post_init__(self):
        if self.exponential_kind not in ("small-e", "big-E"):
            raise DomainError(f"unknown exponential kind {self.exponential_kind!r}")
        if self.power_coefficient not in ("p-triangular", "q-triangular"):
            raise DomainError(f"unknown power coefficient {self.power_coefficient!r}")

    def coefficient_base(self, params: PQParams) -> float:
        return params.p if self.power_coefficient == "p-triangular" else params.q

    def normaliser_base(self, params: PQParams) -> float:
        return params.p if self.exponential_kind == "small-e" else params.q


DEFAULT_SPEC = BasisSpec()
DEFAULT_CONFIG = OperatorConfig()
# quad refuses relative tolerances below about 50 machine epsilons
_QUAD_RTOL = 1e-13


def _check(n: int, x: float):
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")


def _log_normaliser(u: float, params: PQParams, spec: BasisSpec, cfg: OperatorConfig,
                    coeff_logs: np.ndarray) -> float:
    if spec.coefficient_base(params) == spec.normaliser_base(params):
        return float(logsumexp(coeff_logs))
    other = log_exponential_terms(
        u, spec.normaliser_base(params), params, cfg.series_tol, cfg.max_terms
    )
    return float(logsumexp(other))


def basis_probabilities(n: int, params: PQParams, x: float,
                        spec: BasisSpec = DEFAULT_SPEC,
                        cfg: OperatorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """s_{n,k}(x) for k = 0..K-1, truncated once the remaining mass is below series_tol."""
    _check(n, x)
    if x == 0.0:
        return np.array([1.0])
    u = pq_integer(n, params) * x
    logs = log_exponential_terms(
        u, spec.coefficient_base(params), params, cfg.series_tol, cfg.max_terms
    )
    return np.exp(logs - _log_normaliser(u, params, spec, cfg, logs))


def basis_weights(n: int, params: PQParams, x: float,
                  spec: BasisSpec = DEFAULT_SPEC,
                  cfg: OperatorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Full discrete weights p^-k q^k s_{n,k}(x)."""
    s = basis_probabilities(n, params, x, spec, cfg)
    k = np.arange(s.size, dtype=float)
    return s * np.exp(k * (math.log(params.q) - math.log(params.p)))


def basis_weight(n: int, k: int, params: PQParams, x: float,
                 spec: BasisSpec = DEFAULT_SPEC,
                 cfg: OperatorConfig = DEFAULT_CONFIG) -> float:
    _check(n, x)
    if k < 0:
        raise DomainError("k must be >= 0")
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    w = basis_weights(n, params, x, spec, cfg)
    if k < w.size:
        return float(w[k])
    # beyond the truncation point: evaluate the single term in log space
    u = pq_integer(n, params) * x
    base = spec.coefficient_base(params)
    log_fact = math.fsum(math.log(pq_integer(j, params)) for j in range(1, k + 1))
    log_term = 0.5 * k * (k - 1) * math.log(base) + k * math.log(u) - log_fact
    coeff_logs = log_exponential_terms(u, base, params, cfg.series_tol, cfg.max_terms)
    log_s = log_term - _log_normaliser(u, params, spec, cfg, coeff_logs)
    log_w = log_s + k * (math.log(params.q) - math.log(params.p))
    return math.exp(log_w) if log_w > -745.0 else 0.0


def cell_endpoints(n: int, params: PQParams, count: int) -> np.ndarray:
    """e_k = [k] / (q^(k-1) [n]) for k = 0..count; cell k is [e_k, e_{k+1}]."""
    big_n = pq_integer(n, params)
    q = params.q
    return np.array(
        [pq_integer(k, params) / (q ** (k - 1) * big_n) for k in range(count + 1)]
    )


def _classical_cells(f, n: int, count: int, tol: float) -> np.ndarray:
    out = np.empty(count)
    for k in range(count):
        val, _ = integrate.quad(lambda t: float(f(t)), k / n, (k + 1) / n,
                                epsabs=tol, epsrel=max(tol, _QUAD_RTOL), limit=200)
        out[k] = val
    return out


def apply(f, n: int, params: PQParams, x: float,
          spec: BasisSpec = DEFAULT_SPEC,
          cfg: OperatorConfig = DEFAULT_CONFIG) -> float:
    """Evaluate K_n(f; x).

    ``f`` should accept numpy arrays (scalar-only callables are vectorised
    automatically at some cost).
    """
    _check(n, x)
    w = basis_weights(n, params, x, spec, cfg)
    big_n = pq_integer(n, params)
    if params.classical:
        cells = _classical_cells(f, n, w.size, cfg.integral_tol)
    else:
        ends = cell_endpoints(n, params, w.size)
        fv = as_array_function(f)
        upper = jackson_integrals(fv, ends[1:], params, cfg.integral_tol)
        cells = np.diff(np.concatenate(([0.0], upper)))
        scale = np.maximum(np.abs(upper), 1.0)
        bad = cells < -10.0 * cfg.integral_tol * scale
        if np.any(bad & (w > cfg.series_tol)):
            k = int(np.argmax(bad))
            msg = (f"negative (p,q) cell integral {cells[k]:.3g} at k={k} "
                   f"(n={n}, p={params.p}, q={params.q})")
            if cfg.negative_cell_policy == "error":
                raise NegativeCellError(msg)
            warnings.warn(msg, NegativeCellWarning, stacklevel=2)
    terms = w * cells
    if not np.all(np.isfinite(terms)):
        raise NumericalFailure("operator series produced non-finite terms", w.size)
    return big_n * math.fsum(terms)


def _gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def quadrature_rule(n: int, params: PQParams, x: float,
                    spec: BasisSpec = DEFAULT_SPEC,
                    cfg: OperatorConfig = DEFAULT_CONFIG,
                    sup_f: float = 1.0,
                    gauss_order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Express f -> K_n(f; x) as sum_i c_i f(t_i).

    For q < p every Jackson node of every cell endpoint becomes a rule node:
    an endpoint e_k is the upper end of cell k-1 and the lower end of cell k,
    so its nodes carry the weight difference w_{k-1} - w_k. At the classical
    point each cell is covered by a Gauss-Legendre rule of ``gauss_order``
    points, which is exact for smooth integrands but only about 1e-8 accurate
    for ones with an endpoint singularity such as sqrt(t). ``sup_f`` scales
    the Jackson tail bound.
    """
    _check(n, x)
    w = basis_weights(n, params, x, spec, cfg)
    big_n = pq_integer(n, params)
    if params.classical:
        g, gw = _gauss_legendre(gauss_order)
        k = np.arange(w.size, dtype=float)[:, None]
        h = 1.0 / n
        nodes = (k + 0.5 * (g[None, :] + 1.0)) * h
        coeffs = big_n * w[:, None] * 0.5 * h * gw[None, :]
        return nodes.ravel(), coeffs.ravel()
    p, q = params.p, params.q
    ends = cell_endpoints(n, params, w.size)[1:]
    # weight on the Jackson integral over [0, e_{k+1}] is w_k - w_{k+1}
    w_next = np.append(w[1:], 0.0)
    end_w = big_n * (w - w_next)
    r = q / p
    e_max = float(ends.max())
    lead = (p - q) * e_max * sup_f * float(np.max(np.abs(end_w))) / (p * (1.0 - r))
    depth = 1
    if lead > cfg.integral_tol:
        depth = int(math.ceil(math.log(cfg.integral_tol / lead) / math.log(r))) + 1
    j = np.arange(depth, dtype=float)
    fac = np.exp(j * math.log(r)) / p
    nodes = ends[:, None] * fac[None, :]
    coeffs = ((p - q) * end_w * ends)[:, None] * fac[None, :]
    return nodes.ravel(), coeffs.ravel()


def _brackets(n: int, params: PQParams):
    return pq_integer(2, params), pq_integer(3, params), pq_integer(n, params)


def moment_closed_form(nu: int, n: int, params: PQParams, x: float) -> float:
    """K_n(t^nu; x) for nu in {0, 1, 2} in closed form."""
    _check(n, x)
    p, q = params.p, params.q
    b2, b3, bn = _brackets(n, params)
    if nu == 0:
        return 1.0
    if nu == 1:
        return x / q + 1.0 / (b2 * bn)
    if nu == 2:
        return (p / q**3) * x * x + ((p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn)) * x \
            + 1.0 / (b3 * bn * bn)
    raise DomainError(f"nu must be 0, 1 or 2, got {nu}")


def second_central_moment(n: int, params: PQParams, x: float) -> float:
    """delta_n(x) = K_n((t - x)^2; x)."""
    _check(n, x)
    p, q = params.p, params.q
    b2, b3, bn = _brackets(n, params)
    return (
        x * x * (p / q**3 - 2.0 / q + 1.0)
        + x * ((p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn) - 2.0 / (b2 * bn))
        + 1.0 / (b3 * bn * bn)
    )
