import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capdrop.trig import (
    NonFiniteError,
    SolverGrid,
    TrigSeries,
    analytic_norm,
    c_fold_project,
    differentiate,
    evaluate,
    from_samples,
    inner,
    l2_norm,
    nonlinear_map,
    reflect,
    samples,
    sobolev_norm,
    translate,
)

N = 16
coeffs = st.lists(st.floats(-1, 1), min_size=2 * N + 1, max_size=2 * N + 1).map(
    lambda v: TrigSeries.from_vector(np.array(v))
)


def direct_sum(f, theta):
    ell = np.arange(1, f.N + 1)
    return f.mean + np.cos(np.outer(theta, ell)) @ f.cos + np.sin(np.outer(theta, ell)) @ f.sin


@pytest.mark.parametrize(
    "f, theta, expected",
    [
        (TrigSeries.mode(1, N, "cos"), 0.0, 1.0),
        (TrigSeries.zeros(N), 1.234, 0.0),
        (TrigSeries.mode(2, N, "sin"), math.pi / 4, 1.0),
    ],
)
def test_evaluate_examples(f, theta, expected):
    assert evaluate(f, theta) == pytest.approx(expected, abs=1e-15)


@given(coeffs, st.floats(-10, 10))
def test_evaluate_matches_direct_sum(f, theta):
    assert evaluate(f, theta) == pytest.approx(direct_sum(f, np.array([theta]))[0], abs=1e-12)


@given(coeffs)
def test_sample_round_trip(f):
    for M in (2 * N + 1, 3 * N, 64):
        assert np.allclose(from_samples(samples(f, M), N).vector, f.vector, atol=1e-14)


def test_coarse_grid_leaves_unresolved_modes_zero():
    f = TrigSeries.mode(2, N, "cos") + TrigSeries.mode(N, N, "sin")
    g = from_samples(samples(f, 11), N)
    assert g.cos[1] == pytest.approx(1.0) and np.all(g.cos[5:] == 0) and np.all(g.sin[5:] == 0)


@pytest.mark.parametrize(
    "f, expected",
    [
        (TrigSeries.mode(1, N, "cos"), TrigSeries.mode(1, N, "sin", -1.0)),
        (TrigSeries.constant(5.0, N), TrigSeries.zeros(N)),
        (TrigSeries.mode(3, N, "sin"), TrigSeries.mode(3, N, "cos", 3.0)),
    ],
)
def test_differentiate_examples(f, expected):
    assert differentiate(f).allclose(expected, atol=1e-15)


@given(coeffs)
def test_derivative_matches_finite_difference(f):
    theta, h = np.linspace(0, 2 * np.pi, 7), 1e-5
    fd = (direct_sum(f, theta + h) - direct_sum(f, theta - h)) / (2 * h)
    assert np.allclose(evaluate(differentiate(f), theta), fd, atol=1e-7 * (1 + np.abs(f.vector).sum() * N**3))


def test_nonlinear_map_examples():
    g = SolverGrid(N)
    one = nonlinear_map(TrigSeries.zeros(N), np.exp, g)
    assert one.allclose(TrigSeries.constant(1.0, N), atol=1e-15)
    c = TrigSeries.mode(1, N, "cos")
    sq = nonlinear_map([c, c], np.multiply, g)
    assert sq.allclose(TrigSeries.constant(0.5, N) + TrigSeries.mode(2, N, "cos", 0.5), atol=1e-15)


def test_nonlinear_map_matches_oversampled_quadrature():
    g = SolverGrid(N)
    xi = TrigSeries.mode(1, N, "cos", 0.1)
    got = nonlinear_map(xi, lambda x: np.exp(2 * x), g)
    # independent oracle: 4x oversampled rectangle rule, mode by mode
    M = 4 * g.M
    th = 2 * np.pi * np.arange(M) / M
    vals = np.exp(0.2 * np.cos(th))
    ell = np.arange(1, N + 1)
    cos = 2 / M * np.cos(np.outer(ell, th)) @ vals
    sin = 2 / M * np.sin(np.outer(ell, th)) @ vals
    assert got.mean == pytest.approx(vals.mean(), abs=1e-12)
    assert np.allclose(got.cos, cos, atol=1e-12) and np.allclose(got.sin, sin, atol=1e-12)


def test_nonlinear_map_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        nonlinear_map(TrigSeries.mode(1, N, "cos"), lambda x: np.log(x), SolverGrid(N))


@pytest.mark.parametrize("s", [0.0, 1.0, 2.5, 3.0])
def test_unit_constant_has_unit_norm(s):
    assert sobolev_norm(TrigSeries.constant(1 / math.sqrt(2 * math.pi), N), s) == pytest.approx(1.0, rel=1e-15)


def test_norm_examples():
    assert sobolev_norm(TrigSeries.mode(1, N, "cos"), 0.0) == pytest.approx(math.sqrt(2 * math.pi))
    expected = math.sqrt(math.e**4 * 5 * math.pi)
    assert analytic_norm(TrigSeries.mode(2, N, "cos"), 1.0, 1.0) == pytest.approx(expected, rel=1e-14)


@given(coeffs)
def test_l2_norm_matches_quadrature(f):
    M = 256
    vals = samples(f, M)
    assert l2_norm(f) ** 2 == pytest.approx(2 * np.pi * np.mean(vals**2), rel=1e-12, abs=1e-14)


@given(coeffs, coeffs)
def test_inner_is_symmetric(f, g):
    assert inner(f, g) == pytest.approx(inner(g, f), abs=1e-13)


@pytest.mark.parametrize(
    "f, alpha, expected",
    [
        (TrigSeries.mode(1, N, "cos"), math.pi, TrigSeries.mode(1, N, "cos", -1.0)),
        (TrigSeries.constant(2.5, N), 0.7, TrigSeries.constant(2.5, N)),
        (TrigSeries.mode(1, N, "sin"), math.pi / 2, TrigSeries.mode(1, N, "cos")),
    ],
)
def test_translate_examples(f, alpha, expected):
    assert translate(f, alpha).allclose(expected, atol=1e-15)


@given(coeffs, st.floats(-7, 7), st.floats(-7, 7))
def test_translation_is_a_group_action_and_isometry(f, a, b):
    assert np.allclose(translate(translate(f, a), b).vector, translate(f, a + b).vector, atol=1e-12)
    assert sobolev_norm(translate(f, a), 3) == pytest.approx(sobolev_norm(f, 3), rel=1e-12, abs=1e-14)
    th = np.linspace(0, 6, 5)
    assert np.allclose(evaluate(translate(f, a), th), direct_sum(f, th + a), atol=1e-12)


@given(coeffs)
def test_reflection(f):
    th = np.linspace(0, 6, 5)
    assert np.allclose(evaluate(reflect(f), th), direct_sum(f, -th), atol=1e-12)
    assert reflect(reflect(f)).allclose(f)


def test_c_fold_example():
    f = TrigSeries.mode(1, N, "cos") + TrigSeries.mode(2, N, "cos")
    assert c_fold_project(f, 2).allclose(TrigSeries.mode(2, N, "cos"))


@given(coeffs, st.integers(1, 5))
def test_c_fold_projection_is_idempotent_and_invariant(f, c):
    p = c_fold_project(f, c)
    assert c_fold_project(p, c).allclose(p)
    assert translate(p, 2 * math.pi / c).allclose(p, atol=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        SolverGrid(32, M=40)
    assert SolverGrid(32).M >= 65
