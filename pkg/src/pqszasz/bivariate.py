"""Tensor-product bivariate operator and its rate certificates.

    K_{n1,n2}(f; x, y) = [n1][n2] sum_{k1,k2} w_{n1,k1}(x) w_{n2,k2}(y)
                         int_{cell_k1} int_{cell_k2} f(t, s) d_{p1,q1}t d_{p2,q2}s

Each axis carries its own (p, q) and its own univariate basis. Functions
given as a ``SeparableSum`` of products g(t) h(s) use the factorised path;
anything else goes through the per-axis quadrature rules.
"""

from __future__ import annotations

import math

import numpy as np

from . import kantorovich, kernels
from .error_bounds import (
    BoundCertificate,
    ModulusConfig,
    SetE,
    distance_to_set,
    uniform_grid,
)
from .kantorovich import DEFAULT_CONFIG, DEFAULT_SPEC, BasisSpec, OperatorConfig
from .pq_core import DomainError, PQParams
from .pq_integral import as_array_function

__all__ = [
    "SeparableSum",
    "apply_bivariate",
    "bivariate_moment_closed_form",
    "bivariate_modulus",
    "bivariate_lipschitz_maximal",
    "measure_M_bivariate",
    "theorem61_certificate",
    "theorem62_certificate",
]

_BLOCK_ENTRIES = 2_000_000


class SeparableSum:
    """f(t, s) = sum_i c_i g_i(t) h_i(s). Also callable as an ordinary function."""

    def __init__(self, terms):
        self.terms = [(float(c), as_array_function(g), as_array_function(h))
                      for c, g, h in terms]

    def __call__(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        out = np.zeros(np.broadcast(t, s).shape)
        for c, g, h in self.terms:
            out = out + c * g(t) * h(s)
        return out


def _check(n1, n2, x, y):
    if n1 < 1 or n2 < 1:
        raise DomainError("n1 and n2 must be >= 1")
    if x < 0 or y < 0:
        raise DomainError("x and y must be >= 0")


def _generic(f, n1, n2, params1, params2, x, y, spec, cfg) -> float:
    # sup|f| proxy for the Jackson tail bound: f on a coarse box around (x, y)
    probe = np.linspace(0.0, 2.0 * max(x, y, 1.0), 9)
    sup_f = float(np.max(np.abs(f(probe[:, None], probe[None, :])))) or 1.0
    t, ct = kantorovich.quadrature_rule(n1, params1, x, spec, cfg, sup_f)
    s, cs = kantorovich.quadrature_rule(n2, params2, y, spec, cfg, sup_f)
    rows = max(1, _BLOCK_ENTRIES // s.size)
    total = []
    for lo in range(0, t.size, rows):
        blk = f(t[lo:lo + rows, None], s[None, :])
        if not np.all(np.isfinite(blk)):
            raise kantorovich.NumericalFailure("integrand is not finite on the rule nodes")
        total.append(ct[lo:lo + rows] @ (blk @ cs))
    return math.fsum(total)


def apply_bivariate(f, n1: int, n2: int, params1: PQParams, params2: PQParams,
                    x: float, y: float,
                    spec: BasisSpec = DEFAULT_SPEC,
                    cfg: OperatorConfig = DEFAULT_CONFIG,
                    generic: bool = False) -> float:
    """K_{n1,n2}(f; x, y).

    ``f`` is a ``SeparableSum`` (factorised path unless ``generic``) or any
    array-aware callable f(t, s).
    """
    _check(n1, n2, x, y)
    if isinstance(f, SeparableSum) and not generic:
        return math.fsum(
            c * kantorovich.apply(g, n1, params1, x, spec, cfg)
            * kantorovich.apply(h, n2, params2, y, spec, cfg)
            for c, g, h in f.terms
        )
    return _generic(f, n1, n2, params1, params2, x, y, spec, cfg)


def bivariate_moment_closed_form(i: int, n1: int, n2: int, params1: PQParams,
                                 params2: PQParams, x: float, y: float) -> float:
    """K_{n1,n2}(f_i; x, y) for f_0 = 1, f_1 = t, f_2 = s, f_3 = t^2 + s^2."""
    _check(n1, n2, x, y)
    if i == 0:
        return 1.0
    if i == 1:
        return kantorovich.moment_closed_form(1, n1, params1, x)
    if i == 2:
        return kantorovich.moment_closed_form(1, n2, params2, y)
    if i == 3:
        return (kantorovich.moment_closed_form(2, n1, params1, x)
                + kantorovich.moment_closed_form(2, n2, params2, y))
    raise DomainError(f"i must be 0..3, got {i}")


def _mesh_values(f, grid):
    return np.ascontiguousarray(f(grid[:, None], grid[None, :]), dtype=float)


def bivariate_modulus(f, d1: float, d2: float, domain_end: float = 2.0,
                      grid_step: float = 1.0 / 64) -> float:
    """Grid sup of |f(t,s) - f(x,y)| with |t - x| <= d1, |s - y| <= d2 (a lower bound)."""
    if d1 <= 0 or d2 <= 0:
        raise DomainError("d1 and d2 must be positive")
    grid = uniform_grid(domain_end, grid_step)
    h = grid[1] - grid[0]
    w1 = int(math.floor(d1 / h * (1 + 1e-12)))
    w2 = int(math.floor(d2 / h * (1 + 1e-12)))
    return float(kernels.window_modulus_2d(_mesh_values(f, grid), w1, w2))


def bivariate_lipschitz_maximal(f, alpha1: float, alpha2: float, x: float, y: float,
                                domain_end: float = 2.0, grid_step: float = 1.0 / 64) -> float:
    """Grid sup of |f(t,s) - f(x,y)| / (|t-x|^a1 |s-y|^a2), skipping gaps below one step."""
    if not (0 < alpha1 <= 1 and 0 < alpha2 <= 1):
        raise DomainError("alpha1, alpha2 must lie in (0, 1]")
    grid = uniform_grid(domain_end, grid_step)
    F = _mesh_values(f, grid)
    fxy = float(np.asarray(f(np.array([x]), np.array([y]))).ravel()[0])
    min_gap = (grid[1] - grid[0]) * (1.0 - 1e-9)
    return float(kernels.bivariate_lipschitz_at(F, grid, grid, fxy, float(x), float(y),
                                                alpha1, alpha2, min_gap))


def measure_M_bivariate(f, alpha1: float, alpha2: float, domain_end: float = 2.0,
                        grid_step: float = 1.0 / 32, headroom: float = 0.1) -> float:
    """max over the grid of (1+x)^a1 (1+y)^a2 f~_{a1,a2}(x, y), plus ``headroom``."""
    grid = uniform_grid(domain_end, grid_step)
    F = _mesh_values(f, grid)
    min_gap = (grid[1] - grid[0]) * (1.0 - 1e-9)
    prof = np.asarray(kernels.bivariate_lipschitz_profile(F, grid, grid, alpha1, alpha2,
                                                          min_gap))
    weight = np.outer((1.0 + grid) ** alpha1, (1.0 + grid) ** alpha2)
    return float(np.max(weight * prof)) * (1.0 + headroom)


def _lhs(f, n1, n2, params1, params2, x, y, spec, cfg):
    val = apply_bivariate(f, n1, n2, params1, params2, x, y, spec, cfg)
    fxy = float(np.asarray(f(np.array([x]), np.array([y]))).ravel()[0])
    return abs(val - fxy)


def _context(theorem, f_id, n1, n2, params1, params2, x, y):
    return {"theorem": theorem, "f_id": f_id, "n": n1, "p": params1.p, "q": params1.q,
            "x": x, "n2": n2, "p2": params2.p, "q2": params2.q, "y": y}


def theorem61_certificate(f, n1: int, n2: int, params1: PQParams, params2: PQParams,
                          x: float, y: float,
                          spec: BasisSpec = DEFAULT_SPEC,
                          cfg: OperatorConfig = DEFAULT_CONFIG,
                          mod_cfg: ModulusConfig = ModulusConfig(grid_step=1.0 / 64),
                          f_id: str = "f") -> BoundCertificate:
    """|K f - f| <= 4 w~(f; sqrt(delta_n1(x)), sqrt(delta_n2(y))).

    The context records ``holds_with_8``: whether the bound with constant 8
    would hold when the stated one fails.
    """
    lhs = _lhs(f, n1, n2, params1, params2, x, y, spec, cfg)
    r1 = math.sqrt(kantorovich.second_central_moment(n1, params1, x))
    r2 = math.sqrt(kantorovich.second_central_moment(n2, params2, y))
    domain = max(mod_cfg.domain_end, x + r1, y + r2)
    step = min(mod_cfg.grid_step, r1 / 8.0, r2 / 8.0)
    ctx = _context("6.1", f_id, n1, n2, params1, params2, x, y)
    for level in range(mod_cfg.refinements + 1):
        w = bivariate_modulus(f, r1, r2, domain, step)
        cert = BoundCertificate(lhs, 4.0 * w, dict(ctx, refinements=level,
                                                   holds_with_8=lhs <= 8.0 * w))
        if cert.holds:
            break
        step /= 2.0
    return cert


def theorem62_certificate(f, alpha1: float, alpha2: float, M: float | None, E: SetE,
                          n1: int, n2: int, params1: PQParams, params2: PQParams,
                          x: float, y: float,
                          spec: BasisSpec = DEFAULT_SPEC,
                          cfg: OperatorConfig = DEFAULT_CONFIG,
                          mod_cfg: ModulusConfig = ModulusConfig(grid_step=1.0 / 32),
                          f_id: str = "f") -> BoundCertificate:
    """|K f - f| <= M (D1 D2 + D1 d_y + D2 d_x + 2 d_x d_y),

    with D1 = delta_n1(x)^(a1/2), D2 = delta_n2(y)^(a2/2), d_x = d(x,E)^a1,
    d_y = d(y,E)^a2. ``M=None`` measures M on the grid.
    """
    if not (0 < alpha1 <= 1 and 0 < alpha2 <= 1):
        raise DomainError("alpha1, alpha2 must lie in (0, 1]")
    if M is None:
        M = measure_M_bivariate(f, alpha1, alpha2, mod_cfg.domain_end, mod_cfg.grid_step)
    if M <= 0:
        raise DomainError("M must be positive")
    lhs = _lhs(f, n1, n2, params1, params2, x, y, spec, cfg)
    D1 = kantorovich.second_central_moment(n1, params1, x) ** (alpha1 / 2.0)
    D2 = kantorovich.second_central_moment(n2, params2, y) ** (alpha2 / 2.0)
    dx = distance_to_set(x, E) ** alpha1
    dy = distance_to_set(y, E) ** alpha2
    rhs = M * (D1 * D2 + D1 * dy + D2 * dx + 2.0 * dx * dy)
    ctx = _context("6.2", f_id, n1, n2, params1, params2, x, y)
    ctx.update(alpha1=alpha1, alpha2=alpha2, M=M, E=E.label)
    return BoundCertificate(lhs, rhs, ctx)
