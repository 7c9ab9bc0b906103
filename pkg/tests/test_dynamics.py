import math

import numpy as np
import pytest
from scipy.special import iv

from capdrop.dynamics import (
    PhysParams,
    angular_momentum,
    angular_momentum_alt,
    conserved,
    crosscheck,
    grad_angular_momentum,
    grad_hamiltonian,
    grad_mass,
    hamiltonian,
    mass,
    poisson_bracket,
    rhs,
)
from capdrop.state import DropState
from capdrop.trig import SolverGrid, TrigSeries, from_samples, inner, nonlinear_map

N = 32
GRID = SolverGrid(N)
P = PhysParams(1.0)
Z = TrigSeries.zeros(N)


def mode(ell, kind="cos", amp=1.0):
    return TrigSeries.mode(ell, N, kind, amp)


def const(c):
    return TrigSeries.constant(c, N)


def test_params_validate():
    with pytest.raises(ValueError):
        PhysParams(0.0)


def test_rhs_static_circle_is_fixed():
    r = rhs(DropState.zeros(N), P, GRID)
    assert np.all(r.vector == 0.0)


def test_rhs_pure_potential_mode():
    r = rhs(DropState(Z, mode(1)), P, GRID)
    assert r.xi.allclose(mode(1), atol=1e-13)
    assert r.chi.allclose(mode(2, amp=0.5), atol=1e-13)


@pytest.mark.parametrize("c, sigma0", [(0.2, 1.0), (-0.3, 2.0)])
def test_rhs_constant_radius(c, sigma0):
    r = rhs(DropState(const(c), Z), PhysParams(sigma0), GRID)
    assert r.xi.allclose(Z, atol=1e-15)
    assert r.chi.allclose(const(-sigma0 * (math.exp(-c) - 1.0)), atol=1e-14)


@pytest.mark.parametrize(
    "u, expected",
    [
        (DropState(Z, Z), math.pi),
        (DropState(const(0.3), Z), 2 * math.pi * math.exp(0.3) - math.pi * math.exp(0.6)),
        (DropState(Z, mode(1)), math.pi / 2 + math.pi),
    ],
)
def test_hamiltonian_examples(u, expected):
    assert hamiltonian(u, P, GRID) == pytest.approx(expected, rel=1e-14)


def test_angular_momentum_examples(series):
    assert angular_momentum(DropState(Z, series(N)), GRID) == pytest.approx(0.0, abs=1e-15)
    assert angular_momentum(DropState(series(N) * 0.1, const(2.0)), GRID) == pytest.approx(0.0, abs=1e-15)
    u = DropState(mode(1, amp=0.1), mode(1, "sin"))
    assert angular_momentum(u, GRID) == pytest.approx(-math.pi * iv(1, 0.2), abs=1e-13)
    assert angular_momentum(u, GRID) == pytest.approx(-0.31574, abs=1e-5)


def test_angular_momentum_forms_agree(small_state):
    for _ in range(5):
        u = small_state()
        assert angular_momentum(u, GRID) == pytest.approx(angular_momentum_alt(u, GRID), abs=1e-12)


def test_mass_is_area(series):
    xi = series(N) * 0.1
    assert mass(DropState(xi, Z), GRID) == pytest.approx(
        0.5 * 2 * math.pi * nonlinear_map(xi, lambda x: np.exp(2 * x), GRID).mean, rel=1e-14
    )


@pytest.mark.parametrize(
    "u, gxi, gchi",
    [
        (DropState(Z, Z), Z, Z),
        (DropState(const(0.2), Z), const(math.exp(0.2) - math.exp(0.4)), Z),
        (DropState(Z, mode(1)), None, mode(1)),
    ],
)
def test_hamiltonian_gradient_examples(u, gxi, gchi):
    g = grad_hamiltonian(u, P, GRID)
    if gxi is not None:
        assert g.xi.allclose(gxi, atol=1e-13)
    assert g.chi.allclose(gchi, atol=1e-13)


def test_angular_momentum_gradient_examples():
    g = grad_angular_momentum(DropState(Z, mode(1, "sin")), GRID)
    assert g.xi.allclose(mode(1, amp=-1.0), atol=1e-15) and g.chi.allclose(Z, atol=1e-15)
    g = grad_angular_momentum(DropState(mode(1), Z), GRID)
    # −e^{2cosθ} sin θ from independent fine samples
    th = GRID.points(8 * GRID.M)
    expected = from_samples(-np.exp(2 * np.cos(th)) * np.sin(th), N)
    assert g.xi.allclose(Z, atol=1e-15)
    assert np.allclose(g.chi.vector, expected.vector, atol=1e-12)


def _directional(fun, u, v, h=1e-3):
    f = lambda t: fun(u + v * t)  # noqa: E731
    return (8 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12 * h)


@pytest.mark.parametrize("name", ["H", "I", "M"])
def test_gradients_match_finite_differences(name, small_state):
    funcs = {
        "H": (lambda w: hamiltonian(w, P, GRID), lambda w: grad_hamiltonian(w, P, GRID)),
        "I": (lambda w: angular_momentum(w, GRID), lambda w: grad_angular_momentum(w, GRID)),
        "M": (lambda w: mass(w, GRID), lambda w: grad_mass(w, GRID)),
    }
    fun, grad = funcs[name]
    u = small_state()
    v = small_state()
    v = v * (1.0 / v.norm())
    g = grad(u)
    exact = inner(g.xi, v.xi) + inner(g.chi, v.chi)
    assert _directional(fun, u, v) == pytest.approx(exact, rel=1e-6, abs=1e-9)


def test_hamiltonian_system_identity(small_state):
    for _ in range(3):
        u = small_state()
        g = grad_hamiltonian(u, P, GRID)
        r = rhs(u, P, GRID)
        w = lambda f: nonlinear_map([u.xi, f], lambda x, y: np.exp(-2 * x) * y, GRID)  # noqa: E731
        assert np.allclose(r.xi.vector, w(g.chi).vector, atol=1e-10)
        assert np.allclose(r.chi.vector, (-w(g.xi)).vector, atol=1e-10)


def test_brackets(small_state):
    u = small_state()
    gh = grad_hamiltonian(u, P, GRID)
    gi, gm = grad_angular_momentum(u, GRID), grad_mass(u, GRID)
    assert poisson_bracket(gh, gh, u, GRID) == pytest.approx(0.0, abs=1e-15)
    assert abs(poisson_bracket(gi, gh, u, GRID)) <= 1e-9
    assert abs(poisson_bracket(gm, gh, u, GRID)) <= 1e-9
    assert poisson_bracket(gi, gh, u, GRID) == pytest.approx(-poisson_bracket(gh, gi, u, GRID), abs=1e-15)


def test_circle_form_crosscheck(small_state):
    assert crosscheck(DropState.zeros(N), P, GRID) == pytest.approx(0.0, abs=1e-15)
    assert crosscheck(DropState(const(0.25), Z), P, GRID) <= 1e-12
    for _ in range(3):
        assert crosscheck(small_state(), P, GRID) <= 1e-9


def test_conserved_bundle(small_state):
    u = small_state()
    c = conserved(u, P, GRID)
    assert (c.H, c.I, c.M) == (hamiltonian(u, P, GRID), angular_momentum(u, GRID), mass(u, GRID))
