"""Time the compiled grid kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on the inputs a typical certificate sweep feeds it. The
two backends must agree before a timing is reported.
"""

import argparse
import timeit

import numpy as np

from pqszasz.kernels import backend_module


def cases():
    g1 = np.linspace(0.0, 2.0, 1025)
    v1 = np.exp(-g1) + np.sqrt(g1)
    g2 = np.linspace(0.0, 2.0, 65)
    F = np.exp(-g2[:, None] - g2[None, :]) + np.outer(g2, g2)
    return [
        ("window_modulus", (v1, 64)),
        ("window_modulus_2d", (F, 8, 8)),
        ("lipschitz_at", (v1, g1, 1.0, 1.0, 0.5, g1[1] * 0.999)),
        ("lipschitz_profile", (v1, g1, 0.5, g1[1] * 0.999)),
        ("bivariate_lipschitz_at", (F, g2, g2, 2.0, 1.0, 1.0, 1.0, 1.0, g2[1] * 0.999)),
        ("bivariate_lipschitz_profile", (F, g2, g2, 1.0, 0.5, g2[1] * 0.999)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    py = backend_module("python")
    try:
        cy = backend_module("cython")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return
    print(f"{'kernel':30s} {'python [s]':>12s} {'cython [s]':>12s} {'speedup':>9s}")
    for name, call_args in cases():
        a = np.asarray(getattr(py, name)(*call_args))
        b = np.asarray(getattr(cy, name)(*call_args))
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12), name
        t_py = min(timeit.repeat(lambda: getattr(py, name)(*call_args),
                                 number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: getattr(cy, name)(*call_args),
                                 number=1, repeat=args.repeat))
        print(f"{name:30s} {t_py:12.6f} {t_cy:12.6f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
