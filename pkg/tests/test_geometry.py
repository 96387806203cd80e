import itertools
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from m1bound import geometry
from m1bound.geometry import PlanarPoint, TriangleSpec, UnitDistanceGraph

from conftest import G1_SPEC, REFERENCE_ANGLES


def test_theta_zero_points():
    g1, g2 = geometry.build_ct_graphs(0.0)
    assert g1.vertices[4] == PlanarPoint(1.0, 0.0)
    v8 = g2.vertices[g2.labels.index("V8")]
    assert v8.x == pytest.approx(math.sqrt(3) + 1, abs=1e-15) and v8.y == 0.0


def test_edge_counts_and_v1v2():
    g1, g2 = geometry.build_ct_graphs(1.851176)
    assert len(g1.edges) == 11 and len(g2.edges) == 11
    assert (0, 1) in g1.edges


def test_edge_count_matches_brute_force():
    for th in REFERENCE_ANGLES:
        pts = geometry.ct_points(th)
        for labels, g in zip((geometry.G1_LABELS, geometry.G2_LABELS), geometry.build_ct_graphs(th)):
            sel = [pts[int(lab[1:]) - 1] for lab in labels]
            n = sum(abs(math.dist((a.x, a.y), (b.x, b.y)) - 1) <= 1e-9
                    for a, b in itertools.combinations(sel, 2))
            assert n == len(g.edges)


@pytest.mark.parametrize("theta", REFERENCE_ANGLES)
def test_ct_independence(theta):
    for g in geometry.build_ct_graphs(theta):
        assert geometry.independence_number(g) == 3
        triples = [tuple(g.labels[i] for i in s) for s in geometry.independent_subsets(g, 3)]
        assert triples == [("V1", "V4", "V6"), ("V1", "V4", "V7")]


def test_triangle_policies():
    g = geometry.build_triangle(G1_SPEC)
    assert len(g.vertices) == 3 and len(g.edges) == 3 and g.alpha == 1
    assert geometry.build_triangle(G1_SPEC, "none").alpha == 3
    assert geometry.build_triangle(G1_SPEC, "unit").edges == ()
    norms = sorted(p.norm for p in TriangleSpec(0.0, 1.0, 0.5).points())
    assert norms == pytest.approx([0.0, math.sqrt(1.25), math.sqrt(1.25)])


def test_triangle_errors_and_warnings():
    with pytest.raises(ValueError):
        geometry.build_triangle(TriangleSpec(1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        geometry.build_triangle(G1_SPEC, "bogus")
    with pytest.warns(UserWarning):
        geometry.build_triangle(TriangleSpec(0.05, 1.0, 0.5))


def test_graph_validation():
    with pytest.raises(ValueError):
        UnitDistanceGraph(((0, 0), (0.5, 0)), ((0, 1),))
    with pytest.raises(ValueError):
        UnitDistanceGraph(((0, 0), (1, 0)), ((0, 0),))
    with pytest.raises(ValueError):
        UnitDistanceGraph(((0, 0), (1, 0)), ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        UnitDistanceGraph(((0, 0), (0, 0)), ())
    with pytest.raises(ValueError):
        PlanarPoint(float("inf"), 0.0)


def test_independence_edge_cases():
    pts = tuple((3.0 * i, 0.0) for i in range(6))
    assert geometry.independence_number(UnitDistanceGraph(pts, ())) == 6
    assert geometry.independent_subsets(UnitDistanceGraph(pts, ()), 0) == [()]
    big = UnitDistanceGraph(tuple((3.0 * i, 0.0) for i in range(25)), ())
    with pytest.raises(ValueError):
        geometry.independence_number(big)


def test_pair_distances():
    assert len(geometry.pair_distances(G1_SPEC.points())) == 3
    assert len(geometry.pair_distances(geometry.build_ct_graphs(0.3)[0].vertices)) == 21
    assert geometry.pair_distances([(0, 0), (1, 0)]) == [1.0]
    with pytest.raises(ValueError):
        geometry.pair_distances([(0, 0)])


def test_bundled_configs_respect_separation(reference_config):
    for spec in reference_config.triangles:
        assert spec.min_separation() >= 0.1
    for th in reference_config.angles:
        for g in geometry.build_ct_graphs(th):
            norms = [p.norm for p in g.vertices if p.norm > 0]
            assert min(norms + geometry.pair_distances(g.vertices)) >= 0.1


def _mis_brute(g):
    n = len(g.vertices)
    edges = set(g.edges)
    for k in range(n, -1, -1):
        for s in itertools.combinations(range(n), k):
            if not any((i, j) in edges for i, j in itertools.combinations(s, 2)):
                return k


def _ct_or_skip(theta):
    # a few angles make V5..V8 coincide with V1..V4
    try:
        return geometry.build_ct_graphs(theta)
    except ValueError:
        assume(False)


def test_coincident_angle_rejected():
    with pytest.raises(ValueError):
        geometry.build_ct_graphs(math.pi / 6)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-math.pi, max_value=math.pi))
def test_reflection_symmetry(theta):
    # reflect every point across the x-axis; V2<->V3 and V6<->V7 swap roles
    g1, _ = _ct_or_skip(theta)
    refl = tuple(PlanarPoint(p.x, -p.y) for p in g1.vertices)
    g1r = UnitDistanceGraph(refl, tuple(geometry.unit_edges(refl)))
    assert set(g1r.edges) == set(g1.edges)
    swap = {0: 0, 1: 2, 2: 1, 3: 3, 4: 4, 5: 6, 6: 5}
    g1m, _ = geometry.build_ct_graphs(-theta)
    mapped = {tuple(sorted((swap[i], swap[j]))) for i, j in g1m.edges}
    assert mapped == set(g1.edges)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.0, max_value=2 * math.pi), st.permutations(range(7)))
def test_alpha_permutation_invariant(theta, perm):
    g1, _ = _ct_or_skip(theta)
    verts = tuple(g1.vertices[i] for i in perm)
    g = UnitDistanceGraph(verts, tuple(geometry.unit_edges(verts)))
    assert geometry.independence_number(g) == geometry.independence_number(g1) == _mis_brute(g1)
