# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels. Same signatures and results as ``_purepy``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, INFINITY

cnp.import_array()


def window_modulus(double[::1] values, Py_ssize_t width):
    cdef Py_ssize_t n = values.shape[0], i, j, hi
    cdef double best = 0.0, d
    for i in range(n):
        hi = i + width
        if hi > n - 1:
            hi = n - 1
        for j in range(i + 1, hi + 1):
            d = fabs(values[j] - values[i])
            if d > best:
                best = d
    return best


def window_modulus_2d(double[:, ::1] F, Py_ssize_t w1, Py_ssize_t w2):
    # separable rectangle max/min: a pass along rows, then along columns
    cdef Py_ssize_t n1 = F.shape[0], n2 = F.shape[1]
    cdef Py_ssize_t i, j, a, b, lo, hi
    cdef double mx, mn, best = 0.0
    rmax_arr = np.empty((n1, n2))
    rmin_arr = np.empty((n1, n2))
    cdef double[:, ::1] rmax = rmax_arr, rmin = rmin_arr
    for i in range(n1):
        for j in range(n2):
            lo = j - w2 if j >= w2 else 0
            hi = j + w2 if j + w2 < n2 else n2 - 1
            mx = F[i, lo]
            mn = mx
            for b in range(lo + 1, hi + 1):
                if F[i, b] > mx:
                    mx = F[i, b]
                elif F[i, b] < mn:
                    mn = F[i, b]
            rmax[i, j] = mx
            rmin[i, j] = mn
    for i in range(n1):
        lo = i - w1 if i >= w1 else 0
        hi = i + w1 if i + w1 < n1 else n1 - 1
        for j in range(n2):
            mx = rmax[lo, j]
            mn = rmin[lo, j]
            for a in range(lo + 1, hi + 1):
                if rmax[a, j] > mx:
                    mx = rmax[a, j]
                if rmin[a, j] < mn:
                    mn = rmin[a, j]
            if mx - F[i, j] > best:
                best = mx - F[i, j]
            if F[i, j] - mn > best:
                best = F[i, j] - mn
    return best


def lipschitz_at(double[::1] values, double[::1] grid, double fx, double x,
                 double alpha, double min_gap):
    cdef Py_ssize_t n = values.shape[0], j
    cdef double best = 0.0, gap, r
    for j in range(n):
        gap = fabs(grid[j] - x)
        if gap < min_gap:
            continue
        r = fabs(values[j] - fx) / pow(gap, alpha)
        if r > best:
            best = r
    return best


def lipschitz_profile(double[::1] values, double[::1] grid, double alpha, double min_gap):
    cdef Py_ssize_t n = values.shape[0], i, j
    cdef double gap, r
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    for i in range(n):
        for j in range(i + 1, n):
            gap = fabs(grid[j] - grid[i])
            if gap < min_gap:
                continue
            r = fabs(values[j] - values[i]) / pow(gap, alpha)
            if r > out[i]:
                out[i] = r
            if r > out[j]:
                out[j] = r
    return out_arr


def bivariate_lipschitz_at(double[:, ::1] F, double[::1] g1, double[::1] g2,
                           double fxy, double x, double y,
                           double a1, double a2, double min_gap):
    cdef Py_ssize_t n1 = F.shape[0], n2 = F.shape[1], a, b
    cdef double best = 0.0, d1, d2, den, r
    for a in range(n1):
        d1 = fabs(g1[a] - x)
        if d1 < min_gap:
            continue
        den = pow(d1, a1)
        for b in range(n2):
            d2 = fabs(g2[b] - y)
            if d2 < min_gap:
                continue
            r = fabs(F[a, b] - fxy) / (den * pow(d2, a2))
            if r > best:
                best = r
    return best


def bivariate_lipschitz_profile(double[:, ::1] F, double[::1] g1, double[::1] g2,
                                double a1, double a2, double min_gap):
    cdef Py_ssize_t n1 = F.shape[0], n2 = F.shape[1], i, j, a, b
    cdef double d1, d2, den, r, v
    p1_arr = np.empty((n1, n1))
    p2_arr = np.empty((n2, n2))
    cdef double[:, ::1] p1 = p1_arr
    cdef double[:, ::1] p2 = p2_arr
    for i in range(n1):
        for a in range(n1):
            d1 = fabs(g1[a] - g1[i])
            p1[i, a] = pow(d1, a1) if d1 >= min_gap else INFINITY
    for j in range(n2):
        for b in range(n2):
            d2 = fabs(g2[b] - g2[j])
            p2[j, b] = pow(d2, a2) if d2 >= min_gap else INFINITY
    out_arr = np.zeros((n1, n2))
    cdef double[:, ::1] out = out_arr
    for i in range(n1):
        for j in range(n2):
            v = F[i, j]
            for a in range(n1):
                den = p1[i, a]
                if den == INFINITY:
                    continue
                for b in range(n2):
                    r = fabs(F[a, b] - v) / (den * p2[j, b])
                    if r > out[i, j]:
                        out[i, j] = r
    return out_arr
