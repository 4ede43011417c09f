"""Natural density, statistical limits and the Korovkin statistical report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kantorovich
from .kantorovich import DEFAULT_CONFIG, DEFAULT_SPEC, BasisSpec, OperatorConfig
from .pq_core import DomainError, PQParams, pq_integer, pq_integers

__all__ = [
    "DensityReport",
    "ParamSequenceScheme",
    "SCHEMES",
    "get_scheme",
    "natural_density",
    "stat_limit_check",
    "ordinary_tail_sup",
    "korovkin_decomposition",
    "grid_sups",
    "second_central_moment_array",
    "korovkin_statistical_report",
    "KorovkinReport",
]

DEFAULT_EPS = 0.01
DEFAULT_HORIZONS = (10**3, 10**4, 10**5, 10**6)
_BLOCK = 100_000


@dataclass(frozen=True)
class DensityReport:
    horizon: int
    exception_count: int
    density_estimate: float
    epsilon: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.density_estimate <= 1.0):
            raise DomainError("density estimate must lie in [0, 1]")


def _eval_indexed(fn, idx: np.ndarray) -> np.ndarray:
    """Evaluate an index map on an int array, falling back to a Python loop."""
    try:
        out = np.asarray(fn(idx))
        if out.shape == idx.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([fn(int(i)) for i in idx])


def _blocks(N: int):
    for lo in range(1, N + 1, _BLOCK):
        yield np.arange(lo, min(lo + _BLOCK, N + 1), dtype=np.int64)


def natural_density(predicate, N: int, eps: float | None = None) -> DensityReport:
    """Exact count of k <= N with ``predicate(k)``, divided by N.

    ``predicate`` may be vectorised (int array -> bool array) or scalar.
    """
    if N < 1:
        raise DomainError("horizon N must be >= 1")
    count = 0
    for idx in _blocks(N):
        count += int(np.count_nonzero(_eval_indexed(predicate, idx).astype(bool)))
    return DensityReport(N, count, count / N, eps)


def stat_limit_check(seq, L: float, eps: float, N: int) -> DensityReport:
    """Density of the exception set {k <= N : |x_k - L| >= eps}."""
    if eps <= 0:
        raise DomainError("eps must be positive")

    def exceptional(k):
        return np.abs(np.asarray(_eval_indexed(seq, k), dtype=float) - L) >= eps

    return natural_density(exceptional, N, eps)


def ordinary_tail_sup(seq, L: float, start: int, N: int) -> float:
    """max_{start <= k <= N} |x_k - L|: a finite-horizon proxy for the tail sup."""
    if start > N:
        raise DomainError("start must not exceed N")
    idx = np.arange(start, N + 1, dtype=np.int64)
    return float(np.max(np.abs(np.asarray(_eval_indexed(seq, idx), dtype=float) - L)))


def is_square(k):
    k = np.asarray(k, dtype=np.int64)
    r = np.floor(np.sqrt(k.astype(float))).astype(np.int64)
    # guard the float sqrt on both sides
    r = np.where((r + 1) * (r + 1) <= k, r + 1, r)
    r = np.where(r * r > k, r - 1, r)
    return r * r == k


@dataclass(frozen=True)
class ParamSequenceScheme:
    """Rules n -> (p_n, q_n), with a disturbance value on an exception set.

    The rules and the exception predicate must accept integer numpy arrays.
    """

    name: str
    q_rule: Callable
    p_rule: Callable
    exception_set: Callable | None = None
    disturbance: tuple[float, float] | None = None
    note: str = ""

    def p_q(self, n):
        """Arrays (p_n, q_n) for an int array (or int) ``n``."""
        idx = np.atleast_1d(np.asarray(n, dtype=np.int64))
        p = np.asarray(self.p_rule(idx), dtype=float) * np.ones(idx.shape)
        q = np.asarray(self.q_rule(idx), dtype=float) * np.ones(idx.shape)
        if self.exception_set is not None and self.disturbance is not None:
            hit = np.asarray(self.exception_set(idx), dtype=bool)
            p = np.where(hit, self.disturbance[0], p)
            q = np.where(hit, self.disturbance[1], q)
        return p, q

    def params(self, n: int) -> PQParams:
        p, q = self.p_q(n)
        return PQParams.make(float(p[0]), float(q[0]))

    def q_sequence(self, k):
        return self.p_q(k)[1]

    def p_sequence(self, k):
        return self.p_q(k)[0]


def _smooth_q(n):
    return 1.0 - 1.0 / (np.asarray(n, dtype=float) + 1.0)


def _smooth_p(n):
    return 1.0 - 1.0 / (np.asarray(n, dtype=float) + 1.0) ** 2


SCHEMES = {
    "smooth": ParamSequenceScheme(
        "smooth", _smooth_q, _smooth_p,
        note="q_n = 1 - 1/(n+1), p_n = 1 - 1/(n+1)^2; converges in the ordinary sense",
    ),
    "disturbed-squares": ParamSequenceScheme(
        "disturbed-squares", _smooth_q, _smooth_p, is_square, (1.0, 0.5),
        note="smooth, but (p, q) = (1, 1/2) on perfect squares (density 0)",
    ),
    "constant-sub-one": ParamSequenceScheme(
        "constant-sub-one", lambda n: 0.9 * np.ones(np.shape(n)),
        lambda n: 0.95 * np.ones(np.shape(n)),
        note="q_n = 0.9, p_n = 0.95; statistical limit 0.9, not 1 (negative control)",
    ),
}


def get_scheme(name: str) -> ParamSequenceScheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise DomainError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None


def korovkin_decomposition(n: int, params: PQParams) -> tuple[float, float, float]:
    """(alpha_n, beta_n, gamma_n) with K_n(t^2) - x^2 = alpha x^2 + beta x + gamma."""
    if n < 1:
        raise DomainError("n must be >= 1")
    p, q = params.p, params.q
    b2, b3, bn = (pq_integer(m, params) for m in (2, 3, n))
    alpha = p / q**3 - 1.0
    beta = (p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn)
    gamma = 1.0 / (b3 * bn * bn)
    return alpha, beta, gamma


def grid_sups(n, p, q, grid) -> dict[int, np.ndarray]:
    """Closed-form grid sups of |K_n(t^nu; x) - x^nu| for nu = 1, 2, vectorised over n.

    ``n``, ``p``, ``q`` are equal-length arrays; returns arrays of that length.
    """
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    x = np.asarray(grid, dtype=float)[None, :]
    bn = pq_integers(n, p, q)[:, None]
    b2 = (p + q)[:, None]
    b3 = (p * p + p * q + q * q)[:, None]
    pc, qc = p[:, None], q[:, None]
    e1 = x / qc + 1.0 / (b2 * bn) - x
    m2 = (pc / qc**3) * x * x + ((pc + b2) / (qc * b3 * bn) + 1.0 / (qc * qc * bn)) * x \
        + 1.0 / (b3 * bn * bn)
    e2 = m2 - x * x
    return {1: np.max(np.abs(e1), axis=1), 2: np.max(np.abs(e2), axis=1)}


def second_central_moment_array(n, p, q, x) -> np.ndarray:
    """delta_n(x) = K_n((t - x)^2; x) for arrays of n, p, q at a fixed x."""
    n = np.asarray(n, dtype=float)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    bn = pq_integers(n, p, q)
    b2 = p + q
    b3 = p * p + p * q + q * q
    m1 = x / q + 1.0 / (b2 * bn)
    m2 = (p / q**3) * x * x + ((p + b2) / (q * b3 * bn) + 1.0 / (q * q * bn)) * x \
        + 1.0 / (b3 * bn * bn)
    return m2 - 2.0 * x * m1 + x * x


def scheme_grid_sups(scheme: ParamSequenceScheme, ns, grid) -> dict[int, np.ndarray]:
    ns = np.asarray(ns, dtype=np.int64)
    p, q = scheme.p_q(ns)
    return grid_sups(ns, p, q, grid)


def exception_density(scheme: ParamSequenceScheme, nu: int, grid, eps: float,
                      N: int) -> DensityReport:
    """Density of {m <= N : grid sup of |K_m(t^nu) - x^nu| >= eps}."""
    if nu == 0:
        return DensityReport(N, 0, 0.0, eps)
    count = 0
    for idx in _blocks(N):
        count += int(np.count_nonzero(scheme_grid_sups(scheme, idx, grid)[nu] >= eps))
    return DensityReport(N, count, count / N, eps)


@dataclass
class KorovkinReport:
    scheme: str
    eps: float
    horizon: int
    rows: list[dict] = field(default_factory=list)
    densities: dict[int, DensityReport] = field(default_factory=dict)

    COLUMNS = ("n", "p_n", "q_n", "nu", "grid_sup", "eps", "exception_density")


def korovkin_statistical_report(
    scheme: ParamSequenceScheme,
    n_values,
    grid,
    spec: BasisSpec = DEFAULT_SPEC,
    cfg: OperatorConfig = DEFAULT_CONFIG,
    eps: float = DEFAULT_EPS,
    horizon: int = 10**4,
    validate: bool = False,
) -> KorovkinReport:
    """Grid sups of |K_n(t^nu) - x^nu| (nu = 0, 1, 2) along a parameter scheme.

    Sups are over the supplied grid, not over [0, inf). With ``validate``
    the series operator is evaluated as well and the largest deviation from
    the closed form is stored per row under ``series_gap``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("grid must be nonempty")
    if np.any(grid < 0):
        raise DomainError("grid must lie in [0, inf)")
    report = KorovkinReport(scheme.name, eps, horizon)
    for nu in (0, 1, 2):
        report.densities[nu] = exception_density(scheme, nu, grid, eps, horizon)
    for n in n_values:
        params = scheme.params(n)
        sups = grid_sups([n], [params.p], [params.q], grid)
        for nu in (0, 1, 2):
            sup = 0.0 if nu == 0 else float(sups[nu][0])
            row = {
                "n": int(n), "p_n": params.p, "q_n": params.q, "nu": nu,
                "grid_sup": sup, "eps": eps,
                "exception_density": report.densities[nu].density_estimate,
            }
            if validate:
                gap = 0.0
                for x in grid:
                    series = kantorovich.apply(lambda t, nu=nu: t**nu, n, params, float(x),
                                               spec, cfg)
                    closed = kantorovich.moment_closed_form(nu, n, params, float(x))
                    gap = max(gap, abs(series - closed))
                row["series_gap"] = gap
            report.rows.append(row)
    return report


def triangle_bound_nu1(n: int, params: PQParams, x_max: float) -> float:
    """|1/q - 1| x_max + 1/([2][n]), an upper bound for the nu = 1 grid sup."""
    b2 = params.p + params.q
    bn = pq_integer(n, params)
    return abs(1.0 / params.q - 1.0) * x_max + 1.0 / (b2 * bn)


def decomposition_bound_nu2(n: int, params: PQParams, x_max: float) -> float:
    a, b, g = korovkin_decomposition(n, params)
    return a * x_max**2 + b * x_max + g
