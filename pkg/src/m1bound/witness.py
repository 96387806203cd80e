"""Witness functions W(t) and the density bound they certify.

W(t) = v0 + v1 J0(t) + sum_G w_G [C1R coefficient of G](t)
                      - sum_theta w_theta [CT coefficient of theta](t).

If W(0) >= 1 and W(t) >= 0 for all t > 0, the density is at most the positive
root of delta^2 = B delta + C with B = v0 + sum w_G alpha_G - 5 sum w_theta and
C = sum w_theta.

Nonnegativity on the continuum is checked by dense sampling with interval
guards (first- and second-derivative bounds) and a Landau-envelope tail. This
is a floating-point certificate, not an interval-arithmetic proof.
"""
from dataclasses import dataclass, field, replace
from functools import cached_property
import math

import numpy as np

from . import constraints, geometry
from ._backend import kernels
from .bessel import MAX_ABS_DERIV, MAX_ABS_SECOND_DERIV, X_MAX

GUARANTEE = "floating-point Lipschitz/second-order guard + Landau tail (not interval-rigorous)"
NEG_TOL = 1e-9
MIN_STEP = 1e-7
CHUNK = 1 << 16


@dataclass(frozen=True)
class GraphWeight:
    graph: geometry.UnitDistanceGraph
    alpha: int
    weight: float
    triangle: geometry.TriangleSpec = None
    edge_policy: str = "complete"


@dataclass(frozen=True)
class AngleWeight:
    theta: float
    weight: float


@dataclass(frozen=True)
class WitnessCertificate:
    v0: float
    v1: float
    graphs: tuple = ()
    angles: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for gw in self.graphs:
            if not gw.weight >= 0.0:
                raise ValueError(f"graph weight {gw.weight} is negative")
            alpha = geometry.independence_number(gw.graph)
            if alpha != gw.alpha:
                raise ValueError(f"stored alpha {gw.alpha} but the graph has alpha {alpha}")
        for aw in self.angles:
            if not aw.weight >= 0.0:
                raise ValueError(f"angle weight {aw.weight} is negative")

    @cached_property
    def termset(self):
        parts = [(self.v0, constraints.TermSet(1.0)),
                 (self.v1, constraints.row_c0().termset)]
        parts += [(gw.weight, constraints.c1r_termset(gw.graph)) for gw in self.graphs]
        parts += [(-aw.weight, constraints.ct_termset(aw.theta)) for aw in self.angles]
        return constraints.TermSet.combine(parts)

    def with_v0(self, v0):
        return replace(self, v0=v0)


@dataclass
class VerificationResult:
    verified: bool
    checked_interval: tuple
    grid_step: float
    lipschitz_constant: float
    tail_threshold: float
    worst_value: float
    worst_t: float
    lower_bound: float
    w0: float
    violations: list
    samples: int = 0
    guarantee: str = GUARANTEE


def eval_W(cert, t):
    return cert.termset.evaluate(t)


def lipschitz_bound(cert):
    """Upper bound on |W'| over t >= 0."""
    total = abs(cert.v1)
    total += sum(gw.weight * sum(abs(w) * d for d, w in constraints.c1r_termset(gw.graph).terms)
                 for gw in cert.graphs)
    total += sum(aw.weight * sum(abs(w) * d for d, w in constraints.ct_termset(aw.theta).terms)
                 for aw in cert.angles)
    return MAX_ABS_DERIV * total


def second_derivative_bound(cert):
    dists, weights = cert.termset.merged
    return MAX_ABS_SECOND_DERIV * float(np.sum(np.abs(weights) * dists ** 2))


def tail_threshold(cert):
    """T such that W(t) > 0 for every t > T, from |J0(x)| <= sqrt(2 / (pi x))."""
    ts = cert.termset
    c = ts.constant
    if not c > 0.0:
        raise ValueError(f"constant term of W is {c}; the tail cannot be certified")
    dists, weights = ts.merged
    if dists.size == 0:
        return 0.0
    s = float(np.sum(np.abs(weights) / np.sqrt(dists)))
    return (2.0 / math.pi) * (s / c) ** 2


class _Evaluator:
    """W on arrays of t inside one chunk [t_lo, t_hi].

    Terms whose argument would leave the J0 range on the chunk are replaced by
    their envelope at t_lo, a constant lower bound valid across the chunk.
    """

    def __init__(self, cert):
        ts = cert.termset
        self.constant = ts.constant
        self.dists, self.weights = ts.merged
        self.L = lipschitz_bound(cert)
        self.M = second_derivative_bound(cert)
        self.set_chunk(0.0, 0.0)

    def set_chunk(self, t_lo, t_hi):
        self.near = self.dists * t_hi <= X_MAX
        self.far = 0.0
        if not self.near.all():
            far_d, far_w = self.dists[~self.near], self.weights[~self.near]
            self.far = float(np.sum(np.abs(far_w) * np.sqrt(2.0 / (math.pi * t_lo * far_d))))

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = kernels.termset_eval(t, self.constant, self.dists[self.near],
                                   self.weights[self.near])
        return out - self.far if self.far else out

    def scan(self, start, n, h):
        """Values at t = (start + i) * h, i < n (the grid np.arange gives)."""
        out = kernels.termset_scan(start, n, h, self.constant, self.dists[self.near],
                                   self.weights[self.near])
        return out - self.far if self.far else out

    def lower(self, fa, fb, h):
        lip = 0.5 * (fa + fb - self.L * h)
        curv = np.minimum(fa, fb) - self.M * h * h / 8.0
        return np.maximum(lip, curv)


def _refine_min(ev, a, b):
    from .bessel import golden_section
    ev.set_chunk(a, b)
    t, _ = golden_section(lambda v: float(ev(np.array([v]))[0]), a, b, 1e-10)
    return float(t)


def verify_nonneg(cert, sample_step=1e-3, t_max=None):
    """Check W(0) >= 1 and W(t) >= 0 on (0, inf).

    Samples (0, T] at ``sample_step``; an interval passes when its guard lower
    bound is >= -1e-9. Failing intervals whose samples are nonnegative are
    halved down to 1e-7; negative samples are violations outright. Beyond T
    the envelope bound certifies positivity.
    """
    ev = _Evaluator(cert)
    w0 = cert.termset.value_at_zero()
    T = tail_threshold(cert)
    if t_max is not None:
        T = min(T, t_max)
    h = float(sample_step)
    n_int = max(1, int(math.ceil(T / h)))
    worst, worst_t, lower = math.inf, 0.0, math.inf
    bad = []
    samples = 0
    for start in range(0, n_int, CHUNK):
        stop = min(n_int, start + CHUNK)
        t = np.arange(start, stop + 1, dtype=np.float64) * h
        ev.set_chunk(t[0], t[-1])
        f = ev.scan(start, t.size, h)
        samples += t.size
        k = int(np.argmin(f[1:])) + 1
        if f[k] < worst:
            worst, worst_t = float(f[k]), float(t[k])
        lb = ev.lower(f[:-1], f[1:], h)
        ok = lb >= -NEG_TOL
        lower = min(lower, float(lb[ok].min(initial=math.inf)))
        if ok.all():
            continue
        stack = []
        sub_lower = math.inf
        for i in np.flatnonzero(~ok):
            if min(f[i], f[i + 1]) < -NEG_TOL:
                bad.append((t[i], t[i + 1]))
                sub_lower = min(sub_lower, float(lb[i]))
            else:
                stack.append((t[i], t[i + 1], f[i], f[i + 1]))
        while stack:
            a, b, fa, fb = stack.pop()
            m = 0.5 * (a + b)
            fm = float(ev(np.array([m]))[0])
            samples += 1
            if fm < worst:
                worst, worst_t = fm, m
            for lo_, hi_, flo, fhi in ((a, m, fa, fm), (m, b, fm, fb)):
                lbi = float(ev.lower(np.array([flo]), np.array([fhi]), hi_ - lo_)[0])
                if lbi >= -NEG_TOL:
                    sub_lower = min(sub_lower, lbi)
                elif min(flo, fhi) < -NEG_TOL or hi_ - lo_ <= MIN_STEP:
                    sub_lower = min(sub_lower, lbi)
                    bad.append((lo_, hi_))
                else:
                    stack.append((lo_, hi_, flo, fhi))
        # subdivision replaces the coarse bounds of the failing intervals
        lower = min(lower, sub_lower)
    violations = [_refine_min(ev, max(0.0, a - h), b + h) for a, b in _cluster(bad, h)]
    verified = w0 >= 1.0 - NEG_TOL and not bad and worst >= -NEG_TOL
    return VerificationResult(
        verified=verified,
        checked_interval=(0.0, T),
        grid_step=h,
        lipschitz_constant=ev.L,
        tail_threshold=T,
        worst_value=float(worst),
        worst_t=float(worst_t),
        lower_bound=float(lower if math.isfinite(lower) else worst),
        w0=float(w0),
        violations=[float(v) for v in violations],
        samples=samples,
    )


def _cluster(bad, h):
    """Merge failing intervals closer than 2h into one (a, b) span per dip."""
    spans = []
    for a, b in sorted(bad):
        if spans and a - spans[-1][1] <= 2.0 * h:
            spans[-1][1] = max(spans[-1][1], b)
        else:
            spans.append([a, b])
    return spans


def bound_from_witness(cert):
    """(delta, B, C): positive root of delta^2 = B delta + C."""
    B = float(cert.v0) + sum(gw.weight * gw.alpha for gw in cert.graphs) \
        - 5.0 * sum(aw.weight for aw in cert.angles)
    C = float(sum(aw.weight for aw in cert.angles))
    return quadratic_root(B, C), B, C


def quadratic_root(B, C):
    disc = math.sqrt(B * B + 4.0 * C)
    if B >= 0.0:
        return 0.5 * (B + disc)
    # avoids cancellation when B < 0
    return 2.0 * C / (disc - B)
