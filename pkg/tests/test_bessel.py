import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from m1bound import _kernels_py, bessel
from m1bound._backend import kernels

from oracles import j0_series, j1_series, j0_global_min, golden_min


@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.404825557695773, 5.5, 11.9, 12.0, 12.1, 17.3, 30.0, 55.5])
def test_omega2_matches_series(x):
    assert bessel.omega2(x) == pytest.approx(float(j0_series(x)), abs=1e-12)


def test_known_values():
    assert bessel.omega2(0.0) == 1.0
    assert bessel.omega2(1.0) == pytest.approx(0.7651976865579666, abs=1e-10)
    assert abs(bessel.omega2(2.404825557695773)) < 1e-10


def test_large_arguments_against_mpmath():
    rng = np.random.default_rng(7)
    xs = np.concatenate([rng.uniform(12, 100, 300), rng.uniform(100, 4000, 300), [4000.0]])
    got = bessel.omega2(xs)
    want = np.array([float(mpmath.besselj(0, mpmath.mpf(float(x)))) for x in xs])
    assert np.max(np.abs(got - want)) < bessel.ABS_ERROR_BOUND


def test_eval_carries_error_bound():
    ev = bessel.omega2_eval(3.0)
    assert ev.abs_error_bound <= 1e-10
    assert ev.value == bessel.omega2(3.0)


@pytest.mark.parametrize("x", [-1e-9, 4000.0001, float("nan")])
def test_range_errors(x):
    with pytest.raises(bessel.BesselRangeError):
        bessel.omega2(x)
    with pytest.raises(bessel.BesselRangeError):
        bessel.omega2_deriv(x)


def test_derivative():
    assert bessel.omega2_deriv(0.0) == 0.0
    assert bessel.omega2_deriv(1.8411837813406593) == pytest.approx(-0.5818652242, abs=1e-8)
    assert abs(bessel.omega2_deriv(2.404825557695773)) == pytest.approx(0.5191474973, abs=1e-8)
    for x in (0.7, 9.0, 14.0, 250.0, 3999.0):
        assert bessel.omega2_deriv(x) == pytest.approx(-float(mpmath.besselj(1, x)), abs=1e-9)


def test_max_abs_derivative_constant():
    # |J0'| = |J1| peaks at the first extremum of J1
    x = golden_min(lambda v: -j1_series(v), 1.5, 2.2)
    peak = float(j1_series(x))
    assert peak <= bessel.MAX_ABS_DERIV < peak + 1e-10


def test_max_abs_second_derivative_constant():
    xs = np.linspace(0.0, 60.0, 60001)
    j0 = np.array([float(mpmath.besselj(0, x)) for x in xs[::50]])
    j2 = np.array([float(mpmath.besselj(2, x)) for x in xs[::50]])
    assert np.max(np.abs(j2 - j0) / 2) <= bessel.MAX_ABS_SECOND_DERIV + 1e-15


def test_envelope():
    assert bessel.envelope(2 / math.pi) == pytest.approx(1.0, abs=1e-15)
    assert bessel.envelope(200.0) == pytest.approx(0.05641895835, abs=1e-11)
    with pytest.raises(ValueError):
        bessel.envelope(0.0)


def test_min_on_interval():
    x, m = bessel.min_on_interval(0.0, 10.0)
    x_ref, m_ref = j0_global_min()
    assert x == pytest.approx(float(x_ref), abs=1e-6)
    assert m == pytest.approx(float(m_ref), abs=1e-12)
    assert x == pytest.approx(3.8317059702, abs=1e-6)
    x, m = bessel.min_on_interval(0.0, 1.0)
    assert x == pytest.approx(1.0, abs=1e-9)
    assert m == pytest.approx(bessel.omega2(1.0), abs=1e-15)
    z = 2.404825557695773
    assert bessel.min_on_interval(z - 0.1, z + 0.1)[1] < 0
    with pytest.raises(ValueError):
        bessel.min_on_interval(2.0, 1.0)


def test_bounded_by_one():
    xs = np.linspace(0, 4000, 200001)
    assert np.max(np.abs(bessel.omega2(xs))) <= 1.0


def test_deterministic():
    xs = np.random.default_rng(1).uniform(0, 4000, 1000)
    a, b = bessel.omega2(xs), bessel.omega2(xs.copy())
    assert a.tobytes() == b.tobytes()


def test_backends_agree():
    xs = np.random.default_rng(2).uniform(0, 4000, 20000)
    xs[:200] = np.linspace(11.5, 12.5, 200)
    assert np.max(np.abs(kernels.j0(xs) - _kernels_py.j0(xs))) < 1e-14
    assert np.max(np.abs(kernels.j1(xs) - _kernels_py.j1(xs))) < 1e-14


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=4000.0))
def test_scalar_and_array_paths_agree(x):
    assert bessel.omega2(x) == bessel.omega2(np.array([x]))[0]
