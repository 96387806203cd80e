import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from m1bound import bessel, constraints, geometry
from m1bound.constraints import GridSpec, TermSet

from conftest import G1_SPEC
from oracles import j0_series

Z1 = 2.404825557695773


def test_row_c0():
    row = constraints.row_c0()
    assert constraints.eval_row(row, 0.0) == 1.0
    assert abs(constraints.eval_row(row, Z1)) < 1e-10
    assert constraints.eval_row(row, 1.0) == pytest.approx(float(j0_series(1)), abs=1e-10)
    assert (row.sense, row.rhs()) == ("=", 0.0)


def test_row_cs():
    row = constraints.row_cs()
    assert (row.sense, row.rhs()) == ("=", 1.0)
    assert np.all(constraints.eval_row(row, np.linspace(0, 500, 11)) == 1.0)


def test_row_c1r_triangle():
    row = constraints.triangle_row(G1_SPEC)
    assert row.kind == "C1R" and row.sense == "<=" and row.rhs() == 1.0
    assert row.termset.value_at_zero() == 0.0
    assert constraints.eval_row(row, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_row_c1r_origin_vertex_folds():
    pts = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2))
    g = geometry.UnitDistanceGraph(pts, tuple(geometry.unit_edges(pts)))
    row = constraints.row_c1r(g)
    assert row.termset.constant == 1.0
    assert row.rhs() == 1.0
    assert row.termset.value_at_zero() == len(g.vertices) - len(g.edges)


def test_row_ct():
    row = constraints.row_ct(1.851176)
    ts = row.termset
    assert ts.constant == -1.0
    assert sum(w > 0 for _, w in ts.terms) == 21
    assert sum(w < 0 for _, w in ts.terms) == 6
    assert ts.value_at_zero() == 14.0
    assert constraints.eval_row(row, 0.0) == pytest.approx(14.0, abs=1e-12)
    assert (row.sense, row.rhs_const, row.rhs_delta_coeff) == (">=", 5.0, -1.0)
    assert row.rhs(0.25) == 1.0
    with pytest.raises(ValueError):
        row.rhs()


def test_sample_row():
    grid = GridSpec()
    v = constraints.sample_row(constraints.row_c0(), grid)
    assert v.shape == (12001,) and v[0] == 1.0
    row = constraints.row_ct(1.9)
    s = constraints.sample_row(row, grid)
    assert s[0] == pytest.approx(14.0)
    idx = [3, 1777, 12000]
    for i in idx:
        assert s[i] == constraints.eval_row(row, grid.values()[i])


def test_grid_extra_points():
    g = GridSpec(0.5, 5).with_points([0.25, 1.0, 0.25 + 1e-14])
    vals = g.values()
    assert np.all(np.diff(vals) > 0) and vals[0] == 0.0
    assert len(g) == 6
    with pytest.raises(ValueError):
        GridSpec(0.0, 5)


def test_envelope_bound_on_large_t():
    g = geometry.UnitDistanceGraph(((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)),
                                   ((0, 1), (0, 2), (1, 2)))
    row = constraints.row_c1r(g)
    dists, weights = row.termset.merged
    for t in (200.0, 901.3, 3000.0):
        bound = abs(row.termset.constant) + np.sum(np.abs(weights)) * bessel.envelope(t * dists.min())
        assert abs(constraints.eval_row(row, t) - row.termset.constant) <= bound


def test_range_error():
    row = constraints.row_ct(1.9)
    with pytest.raises(bessel.BesselRangeError):
        constraints.eval_row(row, 3000.0)
    with pytest.raises(bessel.BesselRangeError):
        constraints.eval_row(row, -1.0)


def test_termset_merging_matches_raw_sum():
    ts = constraints.ct_termset(1.87)
    t = np.linspace(0, 300, 997)
    raw = ts.constant + sum(w * bessel.omega2(t * d) for d, w in ts.terms)
    assert np.max(np.abs(ts.evaluate(t) - raw)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0.1, 4.0), st.floats(-3, 3)), min_size=1, max_size=12),
       st.randoms(use_true_random=False))
def test_merging_order_independent(terms, rnd):
    shuffled = list(terms)
    rnd.shuffle(shuffled)
    a, b = TermSet(0.5, tuple(terms)).merged, TermSet(0.5, tuple(shuffled)).merged
    assert np.array_equal(a[0], b[0])
    assert np.allclose(a[1], b[1], atol=1e-14)


def test_lipschitz_by_finite_differences():
    rng = np.random.default_rng(3)
    for row in (constraints.row_ct(1.86), constraints.triangle_row(G1_SPEC)):
        L = row.termset.lipschitz()
        t = rng.uniform(0, 900, 100)
        h = 1e-4
        fd = np.abs(row.termset.evaluate(t + h) - row.termset.evaluate(t)) / h
        assert np.all(fd <= L * (1 + 1e-6))


def test_distances_come_from_geometry(reference_config):
    for spec in reference_config.triangles:
        pts = spec.points()
        allowed = set(geometry.pair_distances(pts)) | {p.norm for p in pts}
        for d, _ in constraints.triangle_row(spec).termset.terms:
            assert d in allowed
    for th in reference_config.angles:
        g1, g2 = geometry.build_ct_graphs(th)
        allowed = set(geometry.pair_distances(g1.vertices)) | {p.norm for p in g2.vertices}
        for d, _ in constraints.ct_termset(th).terms:
            assert d in allowed


def test_c1_recovery_under_c0():
    # for a unit distance graph the edge terms all sit at distance 1, so under
    # sum kappa J0(t) = 0 the subgraph row equals the vertex-only row
    g1, _ = geometry.build_ct_graphs(1.851176)
    row = constraints.row_c1r(g1)
    vert_only = TermSet(0.0, tuple((p.norm, 1.0) for p in g1.vertices))
    edge_d = [d for d, w in row.termset.terms if w < 0]
    assert len(edge_d) == len(g1.edges) and np.allclose(edge_d, 1.0, atol=1e-12)
    # mass at 0 and at t1 with J0(t1) < 0 chosen so that sum kappa J0(t) = 0
    t1 = 3.8317059702
    j = bessel.omega2(t1)
    k1 = 1.0 / (1.0 - j)
    t, k = np.array([0.0, t1]), np.array([1.0 - k1, k1])
    assert abs(k @ bessel.omega2(t)) < 1e-15
    assert k @ row.termset.evaluate(t) == pytest.approx(k @ vert_only.evaluate(t), abs=1e-9)
