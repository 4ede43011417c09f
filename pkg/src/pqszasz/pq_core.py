"""Scalar (p,q)-calculus primitives.

Everything here works in binary64. Brackets are evaluated through the
homogeneous sum ``p**(n-1) + p**(n-2) q + ... + q**(n-1)`` so they stay
finite and accurate as q approaches p, and factorials switch to a
log-domain accumulation above ``LOG_SWITCHOVER``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DomainError",
    "NumericalFailure",
    "PQParams",
    "LOG_SWITCHOVER",
    "pq_integer",
    "pq_integers",
    "log_pq_factorial",
    "pq_factorial",
    "pq_binomial",
    "pq_exponential",
    "log_exponential_terms",
]

LOG_SWITCHOVER = 30


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalFailure(ArithmeticError):
    """A series or quadrature did not converge within its budget."""

    def __init__(self, message: str, terms_examined: int = 0):
        super().__init__(message)
        self.terms_examined = terms_examined


@dataclass(frozen=True)
class PQParams:
    """The pair (p, q) with ``0 < q < p <= 1``, or the classical point p = q = 1."""

    p: float
    q: float
    classical: bool = False

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if self.classical:
            if p != 1.0 or q != 1.0:
                raise DomainError(f"classical params require p = q = 1, got p={p}, q={q}")
        elif not (0.0 < q < p <= 1.0):
            raise DomainError(f"need 0 < q < p <= 1, got p={p}, q={q}")

    @classmethod
    def make(cls, p: float, q: float) -> "PQParams":
        """Build params, mapping p = q = 1 to the classical point."""
        if p == 1.0 and q == 1.0:
            return cls.classical_point()
        return cls(p, q)

    @classmethod
    def classical_point(cls) -> "PQParams":
        return cls(1.0, 1.0, classical=True)

    @property
    def ratio(self) -> float:
        """q / p, the contraction factor of the Jackson nodes."""
        return self.q / self.p


def pq_integer(n: int, params: PQParams) -> float:
    """[n]_{p,q} = (p^n - q^n)/(p - q), evaluated as a homogeneous sum."""
    if n < 0:
        raise DomainError(f"n must be a natural number, got {n}")
    if params.classical:
        return float(n)
    return _pq_integer_cached(n, params.p, params.q)


@lru_cache(maxsize=65536)
def _pq_integer_cached(n: int, p: float, q: float) -> float:
    if n == 0:
        return 0.0
    return math.fsum(p ** (n - 1 - i) * q**i for i in range(n))


def pq_integers(n, p, q) -> np.ndarray:
    """Vectorised [n]_{p,q} for arrays of n, p, q (broadcast together).

    Uses p^(n-1) (1 - r^n)/(1 - r) with r = q/p and ``expm1`` for the
    numerator and denominator, which keeps full relative accuracy as r -> 1
    without an O(n) loop. Entries with p == q fall back to n p^(n-1).
    """
    n, p, q = np.broadcast_arrays(
        np.asarray(n, dtype=float), np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    )
    out = n * p ** np.maximum(n - 1.0, 0.0)
    distinct = q != p
    if np.any(distinct):
        nd, pd, qd = n[distinct], p[distinct], q[distinct]
        lr = np.log(qd) - np.log(pd)
        out = out.copy()
        out[distinct] = pd ** (nd - 1.0) * np.expm1(nd * lr) / np.expm1(lr)
    return out


def log_pq_factorial(n: int, params: PQParams) -> float:
    """log([n]_{p,q}!), always accumulated in the log domain."""
    if n < 0:
        raise DomainError(f"n must be a natural number, got {n}")
    if params.classical:
        return math.lgamma(n + 1.0)
    return math.fsum(math.log(pq_integer(k, params)) for k in range(1, n + 1))


def pq_factorial(n: int, params: PQParams) -> float:
    """[n]_{p,q}! = [1][2]...[n].

    Direct product up to ``LOG_SWITCHOVER``, log-domain sum beyond it. All
    brackets are positive for n >= 1, so no sign bookkeeping is needed; the
    result may still overflow to inf or underflow to 0 for very large n.
    """
    if n < 0:
        raise DomainError(f"n must be a natural number, got {n}")
    if n <= LOG_SWITCHOVER:
        out = 1.0
        for k in range(1, n + 1):
            out *= pq_integer(k, params)
        return out
    lf = log_pq_factorial(n, params)
    try:
        return math.exp(lf)
    except OverflowError:
        return math.inf


def pq_binomial(n: int, k: int, params: PQParams) -> float:
    if k < 0 or n < 0:
        raise DomainError("n and k must be natural numbers")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    if k == 0 or k == n:
        return 1.0
    log_val = (
        log_pq_factorial(n, params)
        - log_pq_factorial(k, params)
        - log_pq_factorial(n - k, params)
    )
    return math.exp(log_val)


def _triangular_base(kind: str, params: PQParams) -> float:
    if kind == "small-e":
        return params.p
    if kind == "big-E":
        return params.q
    raise DomainError(f"unknown exponential kind {kind!r}")


def log_exponential_terms(
    u: float,
    base: float,
    params: PQParams,
    tol: float = 1e-17,
    max_terms: int = 10000,
) -> np.ndarray:
    """Log-magnitudes of the series terms ``base^(k(k-1)/2) u^k / [k]!`` for u > 0.

    Terms are generated until the series is past its peak and a geometric
    majorant of the remainder drops below ``tol`` times the running sum.
    Raises NumericalFailure when ``max_terms`` is exhausted first (the
    small-e series has a finite radius of convergence when p < 1).
    """
    if u <= 0.0:
        raise DomainError("u must be positive")
    log_u = math.log(u)
    logs = [0.0]
    running_max = 0.0
    running_sum = 1.0  # relative to exp(running_max)
    cur = 0.0
    for k in range(0, max_terms):
        # ratio t_{k+1} / t_k = base^k u / [k+1]
        log_ratio = k * math.log(base) + log_u - math.log(pq_integer(k + 1, params))
        cur += log_ratio
        logs.append(cur)
        if cur > running_max:
            running_sum = running_sum * math.exp(running_max - cur) + 1.0
            running_max = cur
        else:
            running_sum += math.exp(cur - running_max)
        if log_ratio < 0.0:
            # ratios are non-increasing past this point, so the tail is
            # dominated by a geometric series with the next ratio.
            next_log_ratio = (k + 1) * math.log(base) + log_u - math.log(
                pq_integer(k + 2, params)
            )
            r = math.exp(next_log_ratio)
            if r < 1.0:
                tail = math.exp(cur - running_max) * r / (1.0 - r)
                if tail < tol * running_sum:
                    return np.asarray(logs)
    raise NumericalFailure(
        f"exponential series did not converge for u={u} within {max_terms} terms",
        terms_examined=max_terms,
    )


def pq_exponential(
    x: float,
    kind: str,
    params: PQParams,
    tol: float = 1e-16,
    max_terms: int = 10000,
) -> float:
    """(p,q)-exponential ``sum_k c_k x^k / [k]!``.

    ``kind="small-e"`` uses c_k = p^(k(k-1)/2) and ``kind="big-E"`` uses
    c_k = q^(k(k-1)/2). Summation stops once three consecutive terms fall
    below ``tol`` times the magnitude of the partial sum.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    base = _triangular_base(kind, params)
    if x == 0.0:
        return 1.0
    log_abs_x = math.log(abs(x))
    neg = x < 0
    terms = [1.0]
    log_term = 0.0
    small = 0
    partial = 1.0
    for k in range(1, max_terms):
        log_term += (k - 1) * math.log(base) + log_abs_x - math.log(pq_integer(k, params))
        if log_term > 700.0:
            raise NumericalFailure(
                f"exponential series overflows at x={x}", terms_examined=k
            )
        term = math.exp(log_term)
        if neg and k % 2 == 1:
            term = -term
        terms.append(term)
        partial += term
        if abs(term) < tol * abs(partial):
            small += 1
            if small >= 3:
                return math.fsum(terms)
        else:
            small = 0
    raise NumericalFailure(
        f"{kind} exponential did not converge at x={x} within {max_terms} terms",
        terms_examined=max_terms,
    )
