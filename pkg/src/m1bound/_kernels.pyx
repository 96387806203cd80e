# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled J0/J1 and term-set evaluation.

J0/J1 come from scipy's Cephes bindings, the same routines the numpy fallback
calls, so pointwise results agree bit for bit. ``termset_scan`` is the hot
path: on an evenly spaced grid each large-argument term is evaluated from the
Hankel expansion with cos/sin advanced by rotation, restarted from an exact
sincos every ``BLOCK`` steps.
"""
import numpy as np
from libc.math cimport sqrt
from scipy.special.cython_special cimport j0 as _j0, j1 as _j1

cdef extern from "math.h" nogil:
    void sincos(double x, double* s, double* c)

from ._hankel import N_TERMS, P0, Q0, SCAN_SWITCH

BACKEND = "cython"

DEF MAXTERMS = 16
cdef int NT = N_TERMS
cdef double XS = SCAN_SWITCH
cdef double hp[MAXTERMS]
cdef double hq[MAXTERMS]
for _k in range(N_TERMS):
    hp[_k] = P0[_k]
    hq[_k] = Q0[_k]

cdef double TWO_OVER_PI = 0.63661977236758134308
cdef double INV_SQRT2 = 0.70710678118654752440
cdef Py_ssize_t BLOCK = 64


def j0(x):
    """J0 on an array of nonnegative arguments (no range checks)."""
    arr = np.asarray(x, dtype=np.float64)
    cdef double[::1] src = np.ascontiguousarray(arr).ravel()
    out = np.empty(src.shape[0])
    cdef double[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _j0(src[i])
    return out.reshape(arr.shape)


def j1(x):
    """J1 on an array of nonnegative arguments (no range checks)."""
    arr = np.asarray(x, dtype=np.float64)
    cdef double[::1] src = np.ascontiguousarray(arr).ravel()
    out = np.empty(src.shape[0])
    cdef double[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _j1(src[i])
    return out.reshape(arr.shape)


def termset_eval(t, double constant, dists, weights):
    """constant + sum_k weights[k] * J0(t * dists[k]), summed in k order."""
    arr = np.asarray(t, dtype=np.float64)
    cdef double[::1] tv = np.ascontiguousarray(arr).ravel()
    cdef double[::1] dv = np.ascontiguousarray(dists, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    if dv.shape[0] != wv.shape[0]:
        raise ValueError("dists and weights differ in length")
    out = np.empty(tv.shape[0])
    cdef double[::1] dst = out
    cdef Py_ssize_t i, k
    cdef Py_ssize_t nt = tv.shape[0]
    cdef Py_ssize_t nk = dv.shape[0]
    cdef double acc
    with nogil:
        for i in range(nt):
            acc = constant
            for k in range(nk):
                acc = acc + wv[k] * _j0(tv[i] * dv[k])
            dst[i] = acc
    return out.reshape(arr.shape)


def termset_scan(Py_ssize_t start, Py_ssize_t n, double h, double constant, dists, weights):
    """termset_eval at t_i = (start + i) * h for i in 0..n-1."""
    cdef double[::1] dv = np.ascontiguousarray(dists, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    if dv.shape[0] != wv.shape[0]:
        raise ValueError("dists and weights differ in length")
    if start < 0 or n < 0 or not h > 0:
        raise ValueError("need start >= 0, n >= 0, h > 0")
    out = np.full(n, constant)
    cdef double[::1] acc = out
    cdef Py_ssize_t i, j, k, stop
    cdef double d, w, x, r, z, pp, qq, c, s, cd, sd, tmp
    cdef int m
    with nogil:
        for k in range(dv.shape[0]):
            d = dv[k]
            w = wv[k]
            i = 0
            while i < n and ((start + i) * h) * d < XS:
                acc[i] += w * _j0(((start + i) * h) * d)
                i += 1
            sincos(h * d, &sd, &cd)
            while i < n:
                x = ((start + i) * h) * d
                sincos(x, &s, &c)
                stop = i + BLOCK
                if stop > n:
                    stop = n
                for j in range(i, stop):
                    x = ((start + j) * h) * d
                    r = 1.0 / x
                    z = r * r
                    pp = hp[NT - 1]
                    qq = hq[NT - 1]
                    for m in range(NT - 2, -1, -1):
                        pp = pp * z + hp[m]
                        qq = qq * z + hq[m]
                    # cos(x - pi/4) = (c + s)/sqrt2, sin(x - pi/4) = (s - c)/sqrt2
                    acc[j] += w * sqrt(TWO_OVER_PI * r) * INV_SQRT2 * (
                        pp * (c + s) - qq * r * (s - c))
                    tmp = c * cd - s * sd
                    s = s * cd + c * sd
                    c = tmp
                i = stop
    return out
