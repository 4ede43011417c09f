"""Grid kernels, backed by the compiled extension when it is importable.

Set ``PQSZASZ_PURE=1`` to force the NumPy fallback. ``BACKEND`` names the
implementation in use.
"""

import os

from . import _purepy

_NAMES = (
    "window_modulus",
    "window_modulus_2d",
    "lipschitz_at",
    "lipschitz_profile",
    "bivariate_lipschitz_at",
    "bivariate_lipschitz_profile",
)

_impl = _purepy
BACKEND = "python"
if not os.environ.get("PQSZASZ_PURE"):
    try:
        from . import _speedups as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _purepy

window_modulus = _impl.window_modulus
window_modulus_2d = _impl.window_modulus_2d
lipschitz_at = _impl.lipschitz_at
lipschitz_profile = _impl.lipschitz_profile
bivariate_lipschitz_at = _impl.bivariate_lipschitz_at
bivariate_lipschitz_profile = _impl.bivariate_lipschitz_profile


def backend_module(name: str):
    """Return the kernel module for ``"python"`` or ``"cython"`` (ImportError if unbuilt)."""
    if name == "python":
        return _purepy
    if name == "cython":
        from . import _speedups
        return _speedups
    raise ValueError(f"unknown backend {name!r}")
