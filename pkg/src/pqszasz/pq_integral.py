"""Jackson-type (p,q)-integration.

    int_0^a f(t) d_{p,q}t = (p - q) a sum_{k>=0} q^k / p^(k+1) f(q^k a / p^(k+1))

Interval integrals are differences of integrals from zero. For q < p the
interval integral of a positive function is not guaranteed to be positive;
callers that need a sign guard check it themselves.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .pq_core import DomainError, NumericalFailure, PQParams

__all__ = [
    "NODE_BUDGET",
    "pq_integral_from_zero",
    "pq_integral_interval",
    "jackson_integrals",
    "jackson_depth",
    "as_array_function",
]

NODE_BUDGET = 1_000_000
_CHUNK = 256
# quad refuses relative tolerances below about 50 machine epsilons
_QUAD_RTOL = 1e-13


def as_array_function(f):
    """Wrap ``f`` so it maps an array to a float array of the same shape.

    Callables that reject arrays fall back to ``np.vectorize``.
    """
    if getattr(f, "_pq_array_ok", False):
        return f
    vec = np.vectorize(f, otypes=[float])

    def g(t):
        t = np.asarray(t, dtype=float)
        try:
            out = np.asarray(f(t), dtype=float)
        except (TypeError, ValueError):
            out = vec(t)
        if out.shape != t.shape:
            out = np.broadcast_to(out, t.shape).astype(float)
        return out

    g._pq_array_ok = True
    return g


def _classical_integral(f, a: float, b: float, tol: float) -> float:
    if a == b:
        return 0.0
    val, _err = integrate.quad(
        lambda t: float(f(t)), a, b, epsabs=tol, epsrel=max(tol, _QUAD_RTOL), limit=200
    )
    return float(val)


def pq_integral_from_zero(f, a: float, params: PQParams, tol: float = 1e-14) -> float:
    """Jackson (p,q)-integral of ``f`` over [0, a].

    Stops when the geometric tail bound
    ``(p-q) a r^K / (p (1-r)) * max|f|`` falls below ``tol``, with r = q/p and
    the running max of |f| over visited nodes standing in for the sup.
    At the classical point the ordinary Riemann integral is returned.
    """
    if a < 0:
        raise DomainError(f"upper limit must be >= 0, got {a}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if params.classical:
        return _classical_integral(f, 0.0, a, tol)
    if a == 0.0:
        return 0.0
    return float(jackson_integrals(f, np.array([a]), params, tol)[0])


def pq_integral_interval(f, a: float, b: float, params: PQParams, tol: float = 1e-14) -> float:
    if a > b:
        raise DomainError(f"interval [{a}, {b}] is reversed")
    if a < 0:
        raise DomainError(f"lower limit must be >= 0, got {a}")
    if a == b:
        return 0.0
    if params.classical:
        return _classical_integral(f, a, b, tol)
    vals = jackson_integrals(f, np.array([a, b]), params, tol)
    return float(vals[1] - vals[0])


def jackson_depth(scale: float, sup_f: float, params: PQParams, tol: float) -> int:
    """Number of nodes K at which the tail bound for an integral over [0, scale] meets ``tol``."""
    p, q = params.p, params.q
    r = q / p
    lead = (p - q) * scale * sup_f / (p * (1.0 - r))
    if lead <= tol:
        return 1
    return int(math.ceil(math.log(tol / lead) / math.log(r))) + 1


def jackson_integrals(f, ends: np.ndarray, params: PQParams, tol: float = 1e-14) -> np.ndarray:
    """Jackson integrals over [0, e] for every e in ``ends``, evaluating ``f`` in bulk.

    All ends share one node depth, chosen so that the tail bound holds for
    the largest end. ``f`` must accept numpy arrays.
    """
    if params.classical:
        raise DomainError("jackson_integrals is only defined for q < p")
    ends = np.asarray(ends, dtype=float)
    if np.any(ends < 0):
        raise DomainError("integration limits must be >= 0")
    fv = as_array_function(f)
    p, q = params.p, params.q
    r = q / p
    log_r = math.log(r)
    e_max = float(ends.max()) if ends.size else 0.0
    parts = []
    sup_f = 0.0
    start = 0
    while True:
        j = np.arange(start, start + _CHUNK, dtype=float)
        # node factor q^j / p^(j+1) = r^j / p
        fac = np.exp(j * log_r) / p
        nodes = ends[:, None] * fac[None, :]
        vals = fv(nodes)
        if not np.all(np.isfinite(vals)):
            raise NumericalFailure("integrand is not finite on the Jackson nodes", start)
        sup_f = max(sup_f, float(np.max(np.abs(vals))) if vals.size else 0.0)
        parts.append((vals * fac[None, :]).sum(axis=1))
        start += _CHUNK
        tail = (p - q) * e_max * math.exp(start * log_r) / (p * (1.0 - r)) * sup_f
        if tail < tol:
            break
        if start >= NODE_BUDGET:
            raise NumericalFailure(
                f"Jackson integral tail bound {tail:.3g} not below {tol:.3g} "
                f"within the {NODE_BUDGET}-node budget",
                start,
            )
    total = np.sum(parts, axis=0)
    return (p - q) * ends * total
