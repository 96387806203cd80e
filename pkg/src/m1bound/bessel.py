"""Order-zero Bessel function J0 (the rotational average of a plane wave).

Arguments are restricted to ``[0, X_MAX]``; everything the pipeline evaluates
stays inside that range.
"""
from dataclasses import dataclass
import math

import numpy as np

from ._backend import kernels

X_MAX = 4000.0

# Cephes J0; observed worst absolute error against mpmath on [0, 4000] is
# ~2e-15, the advertised bound keeps a wide margin.
ABS_ERROR_BOUND = 1e-13

# max |J0'| = max |J1|, attained at 1.8411837813406593; rounded up.
MAX_ABS_DERIV = 0.58186522429
# max |J0''| = max |J2 - J0| / 2 = 1/2, attained at x = 0.
MAX_ABS_SECOND_DERIV = 0.5


class BesselRangeError(ValueError):
    pass


@dataclass(frozen=True)
class BesselEval:
    argument: float
    value: float
    abs_error_bound: float


def _check(x):
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and not (np.all(arr >= 0.0) and np.all(arr <= X_MAX)):
        bad = arr[(arr < 0.0) | (arr > X_MAX) | np.isnan(arr)]
        raise BesselRangeError(
            f"argument {bad.flat[0]!r} outside [0, {X_MAX}]")
    return arr


def omega2(x):
    """J0(x) for scalar or array ``x`` in [0, 4000]."""
    arr = _check(x)
    out = kernels.j0(arr)
    return float(out) if np.ndim(x) == 0 else out


def omega2_eval(x):
    return BesselEval(float(x), omega2(float(x)), ABS_ERROR_BOUND)


def omega2_deriv(x):
    """d/dx J0(x) = -J1(x)."""
    arr = _check(x)
    out = -kernels.j1(arr)
    return float(out) if np.ndim(x) == 0 else out


def envelope(x):
    """sqrt(2 / (pi x)), an upper bound for |J0(x)| on x > 0."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0.0):
        raise ValueError("envelope is defined for x > 0 only")
    out = np.sqrt(2.0 / (np.pi * arr))
    return float(out) if np.ndim(x) == 0 else out


def golden_section(f, lo, hi, tol=1e-12):
    """Minimize a unimodal scalar function on [lo, hi]; returns (x, f(x))."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d), (f(a), a), (f(b), b)]
    fx, x = min(candidates)
    return x, fx


def min_on_interval(lo, hi, step=0.01):
    """Global minimum of J0 on [lo, hi]: grid scan, then golden-section refinement."""
    if not 0.0 <= lo < hi <= X_MAX:
        raise ValueError(f"need 0 <= lo < hi <= {X_MAX}, got ({lo}, {hi})")
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    grid = np.linspace(lo, hi, n)
    vals = omega2(grid)
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n - 1)]
    x, fx = golden_section(lambda v: omega2(v), a, b)
    return x, fx
