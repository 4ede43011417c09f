"""Independent high-precision reference implementations (mpmath).

These follow the defining series term by term at 40 digits and share no
code with the package.
"""

import mpmath as mp

mp.mp.dps = 40


def bracket(n, p, q):
    p, q = mp.mpf(p), mp.mpf(q)
    if p == q:
        return n * p ** (n - 1)
    return (p**n - q**n) / (p - q)


def factorial(n, p, q):
    out = mp.mpf(1)
    for k in range(1, n + 1):
        out *= bracket(k, p, q)
    return out


def exp_series(x, base, p, q, terms=400):
    x = mp.mpf(x)
    return mp.fsum(mp.mpf(base) ** (k * (k - 1) // 2) * x**k / factorial(k, p, q)
                   for k in range(terms))


def jackson(f, a, p, q, terms=3000):
    p, q, a = mp.mpf(p), mp.mpf(q), mp.mpf(a)
    return (p - q) * a * mp.fsum(q**j / p ** (j + 1) * f(q**j * a / p ** (j + 1))
                                 for j in range(terms))


def operator(f, n, p, q, x, kmax=120, terms=3000):
    """K_n(f; x) for q < p straight from the defining double series."""
    p, q, x = mp.mpf(p), mp.mpf(q), mp.mpf(x)
    bn = bracket(n, p, q)
    u = bn * x
    norm = exp_series(u, q, p, q)
    total = mp.mpf(0)
    for k in range(kmax):
        s = q ** (k * (k - 1) // 2) * u**k / factorial(k, p, q) / norm
        lo = bracket(k, p, q) / (q ** (k - 1) * bn)
        hi = bracket(k + 1, p, q) / (q**k * bn)
        cell = jackson(f, hi, p, q, terms) - jackson(f, lo, p, q, terms)
        total += (q / p) ** k * s * cell
    return bn * total


def classical_operator(f, n, x, kmax=None):
    """Classical Kantorovich operator with Poisson weights and mpmath quad."""
    n, x = int(n), mp.mpf(x)
    kmax = kmax or int(n * x + 40 + 10 * mp.sqrt(n * x + 1))
    total = mp.mpf(0)
    for k in range(kmax):
        wk = mp.exp(-n * x) * (n * x) ** k / mp.factorial(k)
        total += wk * mp.quad(f, [mp.mpf(k) / n, mp.mpf(k + 1) / n])
    return n * total
