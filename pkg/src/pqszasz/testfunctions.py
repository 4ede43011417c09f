"""Named test functions used by the CLI and the certificate sweeps."""

import numpy as np

from .bivariate import SeparableSum

UNIVARIATE = {
    "one": lambda t: np.ones_like(np.asarray(t, dtype=float)),
    "t": lambda t: np.asarray(t, dtype=float),
    "t2": lambda t: np.asarray(t, dtype=float) ** 2,
    "exp": lambda t: np.exp(-np.asarray(t, dtype=float)),
    "sqrt": lambda t: np.sqrt(np.asarray(t, dtype=float)),
    "rational": lambda t: np.asarray(t, dtype=float) / (1.0 + np.asarray(t, dtype=float)),
}

_one, _t, _t2, _exp = (UNIVARIATE[k] for k in ("one", "t", "t2", "exp"))

BIVARIATE = {
    "one": SeparableSum([(1.0, _one, _one)]),
    "t": SeparableSum([(1.0, _t, _one)]),
    "s": SeparableSum([(1.0, _one, _t)]),
    "sq": SeparableSum([(1.0, _t2, _one), (1.0, _one, _t2)]),
    "sum": SeparableSum([(1.0, _t, _one), (1.0, _one, _t)]),
    "prod": SeparableSum([(1.0, _t, _t)]),
    "exp": SeparableSum([(1.0, _exp, _exp)]),
}


def univariate(name: str):
    try:
        return UNIVARIATE[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; choose from {sorted(UNIVARIATE)}") from None


def bivariate(name: str):
    try:
        return BIVARIATE[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; choose from {sorted(BIVARIATE)}") from None
