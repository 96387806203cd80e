"""numpy fallback for the hot kernels, selected when the extension is missing."""
import numpy as np
from scipy import special

BACKEND = "python"


def j0(x):
    """J0 on an array of nonnegative arguments (no range checks)."""
    return special.j0(np.asarray(x, dtype=np.float64))


def j1(x):
    """J1 on an array of nonnegative arguments (no range checks)."""
    return special.j1(np.asarray(x, dtype=np.float64))


def termset_eval(t, constant, dists, weights):
    """constant + sum_k weights[k] * J0(t * dists[k]), summed in k order."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    if len(dists) != len(weights):
        raise ValueError("dists and weights differ in length")
    out = np.full(t.shape, float(constant))
    for d, w in zip(np.asarray(dists, dtype=np.float64), np.asarray(weights, dtype=np.float64)):
        out += w * special.j0(t * d)
    return out


def termset_scan(start, n, h, constant, dists, weights):
    """termset_eval at t_i = (start + i) * h for i in 0..n-1."""
    if start < 0 or n < 0 or not h > 0:
        raise ValueError("need start >= 0, n >= 0, h > 0")
    t = np.arange(start, start + n, dtype=np.float64) * h
    return termset_eval(t, constant, dists, weights)
