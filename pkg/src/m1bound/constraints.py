"""Constraint rows on the normalized spectrum, as functions of frequency t.

Every row coefficient has the form c(t) = constant + sum_k w_k J0(t d_k): a
configuration averaged over rotations contributes one J0 term per distance.
"""
from dataclasses import dataclass, field
import itertools
from functools import cached_property

import numpy as np

from . import geometry
from ._backend import kernels
from .bessel import MAX_ABS_DERIV, X_MAX, BesselRangeError

MERGE_TOL = 1e-12
SENSES = ("<=", "=", ">=")
KINDS = ("CS", "C0", "C1R", "CT")


@dataclass(frozen=True)
class TermSet:
    constant: float
    terms: tuple = ()

    def __post_init__(self):
        const = float(self.constant)
        kept = []
        for d, w in self.terms:
            d, w = float(d), float(w)
            if d < 0.0:
                raise ValueError(f"negative distance {d}")
            if d == 0.0:
                const += w
            else:
                kept.append((d, w))
        object.__setattr__(self, "constant", const)
        object.__setattr__(self, "terms", tuple(kept))

    @cached_property
    def merged(self):
        """(dists, weights) arrays with equal distances combined, sorted by distance."""
        if not self.terms:
            return np.empty(0), np.empty(0)
        order = sorted(self.terms)
        dists, weights = [order[0][0]], [order[0][1]]
        for d, w in order[1:]:
            if d - dists[-1] <= MERGE_TOL:
                weights[-1] += w
            else:
                dists.append(d)
                weights.append(w)
        keep = [i for i, w in enumerate(weights) if w != 0.0]
        return (np.array([dists[i] for i in keep]), np.array([weights[i] for i in keep]))

    @property
    def max_distance(self):
        return max((d for d, _ in self.terms), default=0.0)

    @property
    def min_distance(self):
        return min((d for d, _ in self.terms), default=0.0)

    def evaluate(self, t):
        """c(t) for scalar or array t >= 0."""
        arr = np.asarray(t, dtype=np.float64)
        if arr.size:
            if np.any(arr < 0.0):
                raise BesselRangeError("t must be nonnegative")
            if np.max(arr) * self.max_distance > X_MAX:
                raise BesselRangeError(
                    f"t = {np.max(arr)} times distance {self.max_distance} exceeds {X_MAX}")
        dists, weights = self.merged
        out = kernels.termset_eval(arr.ravel(), self.constant, dists, weights).reshape(arr.shape)
        return float(out) if np.ndim(t) == 0 else out

    def value_at_zero(self):
        return self.constant + sum(w for _, w in self.terms)

    def lipschitz(self):
        return MAX_ABS_DERIV * sum(abs(w) * d for d, w in self.terms)

    def scaled(self, factor):
        return TermSet(self.constant * factor, tuple((d, w * factor) for d, w in self.terms))

    @staticmethod
    def combine(parts):
        """Sum of ``(coefficient, termset)`` pairs."""
        const = 0.0
        terms = []
        for coef, ts in parts:
            const += coef * ts.constant
            terms.extend((d, coef * w) for d, w in ts.terms)
        return TermSet(const, tuple(terms))


@dataclass(frozen=True)
class ConstraintRow:
    kind: str
    termset: TermSet
    sense: str
    rhs_const: float
    rhs_delta_coeff: float = 0.0
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown row kind {self.kind!r}")
        if self.sense not in SENSES:
            raise ValueError(f"unknown sense {self.sense!r}")

    def rhs(self, delta=None):
        if self.rhs_delta_coeff == 0.0:
            return self.rhs_const
        if delta is None or delta <= 0.0:
            raise ValueError(f"row {self.kind} needs a positive delta")
        return self.rhs_const + self.rhs_delta_coeff / delta


@dataclass(frozen=True)
class GridSpec:
    step: float = 0.05
    count: int = 12001
    extra: tuple = ()

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError("grid step must be positive")
        if self.count < 1:
            raise ValueError("grid needs at least one point")
        if any(t < 0.0 for t in self.extra):
            raise ValueError("extra grid points must be nonnegative")

    @cached_property
    def _values(self):
        base = np.arange(self.count, dtype=np.float64) * self.step
        if not self.extra:
            return base
        vals = np.unique(np.concatenate([base, np.asarray(self.extra, dtype=np.float64)]))
        keep = np.concatenate([[True], np.diff(vals) > 1e-12])
        return vals[keep]

    def values(self):
        return self._values

    def __len__(self):
        return len(self._values)

    def with_points(self, points):
        return GridSpec(self.step, self.count, tuple(sorted(set(self.extra) | set(map(float, points)))))


def row_cs():
    return ConstraintRow("CS", TermSet(1.0), "=", 1.0, provenance={"kind": "CS"})


def row_c0():
    return ConstraintRow("C0", TermSet(0.0, ((1.0, 1.0),)), "=", 0.0, provenance={"kind": "C0"})


def c1r_termset(g):
    terms = [(p.norm, 1.0) for p in g.vertices]
    terms += [(g.vertices[i].dist(g.vertices[j]), -1.0) for i, j in g.edges]
    return TermSet(0.0, tuple(terms))


def row_c1r(g, alpha=None, provenance=None):
    """Subgraph row: vertex terms minus edge terms, at most alpha(g)."""
    if len(g.vertices) == 0:
        raise ValueError("empty graph")
    if alpha is None:
        alpha = geometry.independence_number(g)
    prov = {"kind": "C1R", "alpha": int(alpha)}
    prov.update(provenance or {})
    return ConstraintRow("C1R", c1r_termset(g), "<=", float(alpha), 0.0, prov)


def ct_termset(theta):
    g1, g2 = geometry.build_ct_graphs(theta)
    terms = [(a.dist(b), 1.0) for a, b in itertools.combinations(g1.vertices, 2)]
    terms += [(p.norm, -1.0) for p in g2.vertices]
    return TermSet(0.0, tuple(terms))


def row_ct(theta):
    """Triple-correlation row for angle theta: value at least 5 - 1/delta."""
    return ConstraintRow("CT", ct_termset(theta), ">=", 5.0, -1.0,
                         {"kind": "CT", "theta": float(theta)})


def triangle_row(spec, edge_policy="complete"):
    g = geometry.build_triangle(spec, edge_policy)
    return row_c1r(g, provenance={"triangle": {"x1": spec.x1, "x2": spec.x2, "y": spec.y},
                                  "edge_policy": edge_policy})


def sample_row(row, grid):
    return row.termset.evaluate(grid.values())


def eval_row(row, t):
    return row.termset.evaluate(t)
