"""Univariate rate certificates: modulus of continuity and Lipschitz maximal functions.

Grid moduli and grid maximal functions are lower bounds for the true
suprema. A certificate that fails is therefore re-evaluated on a grid with
half the step (at most ``refinements`` times) before it is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kantorovich, kernels
from .kantorovich import DEFAULT_CONFIG, DEFAULT_SPEC, BasisSpec, OperatorConfig
from .pq_core import DomainError, PQParams
from .pq_integral import as_array_function

__all__ = [
    "BoundCertificate",
    "ModulusConfig",
    "SetE",
    "modulus_of_continuity",
    "lipschitz_maximal",
    "lipschitz_profile",
    "distance_to_set",
    "measure_M",
    "theorem41_certificate",
    "theorem42_certificate",
]

HOLD_TOL = 1e-12
CERT_COLUMNS = ("theorem", "f_id", "n", "p", "q", "x", "lhs", "rhs", "slack", "holds")


@dataclass
class BoundCertificate:
    lhs: float
    rhs: float
    context: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.slack >= -HOLD_TOL * (1.0 + abs(self.rhs))

    def as_row(self) -> dict:
        row = dict(self.context)
        row.update(lhs=self.lhs, rhs=self.rhs, slack=self.slack, holds=self.holds)
        return row


@dataclass(frozen=True)
class ModulusConfig:
    domain_end: float = 2.0
    grid_step: float = 1.0 / 512
    refinements: int = 2


DEFAULT_MODULUS = ModulusConfig()


@dataclass(frozen=True)
class SetE:
    """A nonempty subset of [0, inf): the half line, finitely many points, or intervals.

    Interval ends may be ``math.inf``.
    """

    kind: str
    points: tuple = ()
    intervals: tuple = ()

    def __post_init__(self):
        if self.kind not in ("full-halfline", "finite-point-set", "interval-list"):
            raise DomainError(f"unknown set kind {self.kind!r}")
        if any(v < 0 for v in self.points):
            raise DomainError("points of E must be >= 0")
        for a, b in self.intervals:
            if a < 0 or b < a:
                raise DomainError(f"bad interval [{a}, {b}]")

    @classmethod
    def halfline(cls) -> "SetE":
        return cls("full-halfline")

    @classmethod
    def of_points(cls, pts) -> "SetE":
        return cls("finite-point-set", points=tuple(float(v) for v in pts))

    @classmethod
    def of_intervals(cls, ivs) -> "SetE":
        return cls("interval-list", intervals=tuple((float(a), float(b)) for a, b in ivs))

    @property
    def label(self) -> str:
        if self.kind == "full-halfline":
            return "[0,inf)"
        if self.kind == "finite-point-set":
            return "{" + ",".join(f"{v:g}" for v in self.points) + "}"
        return "U".join(f"[{a:g},{b:g}]" for a, b in self.intervals)


def distance_to_set(x: float, E: SetE) -> float:
    if E.kind == "full-halfline":
        return 0.0 if x >= 0 else -x
    if E.kind == "finite-point-set":
        if not E.points:
            raise DomainError("E is empty")
        return min(abs(x - v) for v in E.points)
    if not E.intervals:
        raise DomainError("E is empty")
    return min(max(a - x, 0.0, x - b) for a, b in E.intervals)


def uniform_grid(domain_end: float, grid_step: float) -> np.ndarray:
    count = max(int(round(domain_end / grid_step)), 1)
    return np.linspace(0.0, domain_end, count + 1)


def modulus_of_continuity(f, delta: float, domain_end: float = 2.0,
                          grid_step: float = 1.0 / 512) -> float:
    """Grid sup of |f(t) - f(x)| over t, x in [0, domain_end] with |t - x| < delta.

    A lower bound on the true modulus.
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    if grid_step > delta / 8.0 * (1 + 1e-12):
        raise DomainError(f"grid_step {grid_step:g} exceeds delta/8 = {delta / 8:g}")
    grid = uniform_grid(domain_end, grid_step)
    h = grid[1] - grid[0]
    width = int(math.ceil(delta / h)) - 1
    values = np.ascontiguousarray(as_array_function(f)(grid), dtype=float)
    return float(kernels.window_modulus(values, width))


def lipschitz_maximal(f, alpha: float, x: float, domain_end: float = 2.0,
                      grid_step: float = 1.0 / 512) -> float:
    """Grid sup over t > 0 of |f(t) - f(x)| / |t - x|^alpha, skipping |t - x| < grid_step."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    grid = uniform_grid(domain_end, grid_step)[1:]
    fv = as_array_function(f)
    values = np.ascontiguousarray(fv(grid), dtype=float)
    fx = float(fv(np.array([x]))[0])
    min_gap = grid_step * (1.0 - 1e-9)
    return float(kernels.lipschitz_at(values, grid, fx, float(x), alpha, min_gap))


def lipschitz_profile(f, alpha: float, domain_end: float = 2.0,
                      grid_step: float = 1.0 / 512) -> tuple[np.ndarray, np.ndarray]:
    """Grid points and the grid maximal function at each of them."""
    grid = uniform_grid(domain_end, grid_step)
    values = np.ascontiguousarray(as_array_function(f)(grid), dtype=float)
    min_gap = (grid[1] - grid[0]) * (1.0 - 1e-9)
    return grid, np.asarray(kernels.lipschitz_profile(values, grid, alpha, min_gap))


def measure_M(f, alpha: float, domain_end: float = 2.0, grid_step: float = 1.0 / 512,
              headroom: float = 0.1) -> float:
    """max over the grid of (1 + x)^alpha * f~_alpha(x), plus ``headroom``."""
    grid, prof = lipschitz_profile(f, alpha, domain_end, grid_step)
    return float(np.max((1.0 + grid) ** alpha * prof)) * (1.0 + headroom)


def _f_at(f, x: float) -> float:
    return float(as_array_function(f)(np.array([x]))[0])


def theorem41_certificate(f, n: int, params: PQParams, x: float,
                          spec: BasisSpec = DEFAULT_SPEC,
                          cfg: OperatorConfig = DEFAULT_CONFIG,
                          mod_cfg: ModulusConfig = DEFAULT_MODULUS,
                          f_id: str = "f") -> BoundCertificate:
    """|K_n f - f| <= 2 w(f; sqrt(delta_n(x))) at one point.

    The modulus is taken on [0, max(domain_end, x + sqrt(delta))].
    """
    lhs = abs(kantorovich.apply(f, n, params, x, spec, cfg) - _f_at(f, x))
    root = math.sqrt(kantorovich.second_central_moment(n, params, x))
    domain = max(mod_cfg.domain_end, x + root)
    step = min(mod_cfg.grid_step, root / 8.0)
    ctx = {"theorem": "4.1", "f_id": f_id, "n": n, "p": params.p, "q": params.q, "x": x}
    for level in range(mod_cfg.refinements + 1):
        rhs = 2.0 * modulus_of_continuity(f, root, domain, step)
        cert = BoundCertificate(lhs, rhs, dict(ctx, refinements=level))
        if cert.holds:
            break
        step /= 2.0
    return cert


def theorem42_certificate(f, alpha: float, M: float | None, E: SetE, n: int,
                          params: PQParams, x: float,
                          spec: BasisSpec = DEFAULT_SPEC,
                          cfg: OperatorConfig = DEFAULT_CONFIG,
                          mod_cfg: ModulusConfig = DEFAULT_MODULUS,
                          f_id: str = "f") -> BoundCertificate:
    """|K_n f - f| <= M (delta_n^(alpha/2) + 2 d(x, E)^alpha).

    ``M=None`` measures M from the grid maximal function (see ``measure_M``).
    With E = [0, inf) the distance term vanishes.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    if M is None:
        M = measure_M(f, alpha, mod_cfg.domain_end, mod_cfg.grid_step)
    if M <= 0:
        raise DomainError("M must be positive")
    lhs = abs(kantorovich.apply(f, n, params, x, spec, cfg) - _f_at(f, x))
    delta = kantorovich.second_central_moment(n, params, x)
    d = distance_to_set(x, E)
    rhs = M * (delta ** (alpha / 2.0) + 2.0 * d**alpha)
    ctx = {"theorem": "4.2", "f_id": f_id, "n": n, "p": params.p, "q": params.q, "x": x,
           "alpha": alpha, "M": M, "E": E.label}
    return BoundCertificate(lhs, rhs, ctx)
