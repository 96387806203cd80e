"""Planar point configurations and the graphs built on them."""
from dataclasses import dataclass, field
import itertools
import math
import warnings

import numpy as np

EDGE_TOL = 1e-9
MAX_EXHAUSTIVE = 24
MIN_SEPARATION = 0.1
EDGE_POLICIES = ("complete", "unit", "none")

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class PlanarPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    @property
    def norm(self):
        return math.hypot(self.x, self.y)

    def dist(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class UnitDistanceGraph:
    """Embedded graph on planar points.

    With ``general=False`` every edge must have unit length; ``general=True``
    admits arbitrary edge sets (the subgraph constraint works for any graph).
    """

    vertices: tuple
    edges: tuple
    edge_tolerance: float = EDGE_TOL
    general: bool = False
    labels: tuple = field(default=None, compare=False)

    def __post_init__(self):
        verts = tuple(v if isinstance(v, PlanarPoint) else PlanarPoint(*v)
                      for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        for i, j in itertools.combinations(range(n), 2):
            if verts[i].dist(verts[j]) <= self.edge_tolerance:
                raise ValueError(f"duplicate vertices {i} and {j}")
        seen = set()
        canon = []
        for e in self.edges:
            i, j = sorted((int(e[0]), int(e[1])))
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i and j < n):
                raise ValueError(f"edge {(i, j)} out of range")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge {(i, j)}")
            if not self.general and abs(verts[i].dist(verts[j]) - 1.0) > self.edge_tolerance:
                raise ValueError(f"edge {(i, j)} is not a unit distance")
            seen.add((i, j))
            canon.append((i, j))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"P{i}" for i in range(n)))

    def __len__(self):
        return len(self.vertices)

    def adjacency(self):
        """Neighbour bitmasks, one int per vertex."""
        adj = [0] * len(self.vertices)
        for i, j in self.edges:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return adj

    @property
    def alpha(self):
        return independence_number(self)


def unit_edges(points, tol=EDGE_TOL):
    pts = [p if isinstance(p, PlanarPoint) else PlanarPoint(*p) for p in points]
    return [(i, j) for i, j in itertools.combinations(range(len(pts)), 2)
            if abs(pts[i].dist(pts[j]) - 1.0) <= tol]


def ct_points(theta):
    """The eight points V1..V8 for rotation angle ``theta``."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = math.cos(theta), math.sin(theta)
    h = SQRT3 / 2.0
    return (
        PlanarPoint(0.0, 0.0),
        PlanarPoint(h, 0.5),
        PlanarPoint(h, -0.5),
        PlanarPoint(SQRT3, 0.0),
        PlanarPoint(c, s),
        PlanarPoint(h + c, 0.5 + s),
        PlanarPoint(h + c, -0.5 + s),
        PlanarPoint(SQRT3 + c, s),
    )


G1_LABELS = ("V1", "V2", "V3", "V4", "V5", "V6", "V7")
G2_LABELS = ("V1", "V2", "V3", "V4", "V6", "V7", "V8")


def build_ct_graphs(theta, tol=EDGE_TOL):
    """Return (G1, G2): the seven-vertex unit distance graphs for ``theta``."""
    v = ct_points(theta)
    graphs = []
    for labels in (G1_LABELS, G2_LABELS):
        pts = tuple(v[int(lab[1:]) - 1] for lab in labels)
        graphs.append(UnitDistanceGraph(pts, tuple(unit_edges(pts, tol)),
                                        edge_tolerance=tol, labels=labels))
    return graphs[0], graphs[1]


@dataclass(frozen=True)
class TriangleSpec:
    """Vertex set {(x1, 0), (x2, y), (x2, -y)}."""

    x1: float
    x2: float
    y: float

    def points(self):
        return (PlanarPoint(self.x1, 0.0), PlanarPoint(self.x2, self.y),
                PlanarPoint(self.x2, -self.y))

    def min_separation(self):
        pts = self.points()
        norms = [p.norm for p in pts if p.norm > 0.0]
        return min(norms + pair_distances(pts))


def build_triangle(spec, edge_policy="complete", tol=EDGE_TOL):
    """Graph on the three triangle points under the given edge policy."""
    if edge_policy not in EDGE_POLICIES:
        raise ValueError(f"unknown edge policy {edge_policy!r}")
    pts = spec.points()
    if min(pair_distances(pts)) <= tol:
        raise ValueError(f"degenerate triangle {spec}")
    if spec.min_separation() < MIN_SEPARATION:
        warnings.warn(f"triangle {spec} has a norm or distance below {MIN_SEPARATION}",
                      stacklevel=2)
    if edge_policy == "complete":
        edges = ((0, 1), (0, 2), (1, 2))
    elif edge_policy == "unit":
        edges = tuple(unit_edges(pts, tol))
    else:
        edges = ()
    return UnitDistanceGraph(pts, edges, edge_tolerance=tol,
                             general=edge_policy == "complete",
                             labels=("A", "B", "C"))


def _mis(cand, adj):
    # exact maximum independent set size over the candidate bitmask
    if cand == 0:
        return 0
    v = (cand & -cand).bit_length() - 1
    rest = cand & ~(1 << v)
    if adj[v] & cand == 0:
        return 1 + _mis(rest, adj)
    take = 1 + _mis(rest & ~adj[v], adj)
    if take == bin(cand).count("1"):
        return take
    return max(take, _mis(rest, adj))


def independence_number(g):
    """Exact independence number by exhaustive branching on vertex bitmasks."""
    n = len(g.vertices)
    if n > MAX_EXHAUSTIVE:
        raise ValueError(f"{n} vertices exceeds the exhaustive-search limit {MAX_EXHAUSTIVE}")
    return _mis((1 << n) - 1, g.adjacency())


def independent_subsets(g, k):
    """All k-subsets of vertex indices spanning no edge, lexicographically."""
    n = len(g.vertices)
    if n > MAX_EXHAUSTIVE:
        raise ValueError(f"{n} vertices exceeds the exhaustive-search limit {MAX_EXHAUSTIVE}")
    adj = g.adjacency()
    out = []
    for combo in itertools.combinations(range(n), k):
        mask = 0
        for i in combo:
            mask |= 1 << i
        if all(adj[i] & mask == 0 for i in combo):
            out.append(combo)
    return out


def pair_distances(points):
    """Sorted list of all C(n, 2) pairwise distances."""
    pts = [p if isinstance(p, PlanarPoint) else PlanarPoint(*p) for p in points]
    if len(pts) < 2:
        raise ValueError("need at least two points")
    return sorted(a.dist(b) for a, b in itertools.combinations(pts, 2))


def as_array(points):
    return np.array([(p.x, p.y) for p in points], dtype=np.float64)
