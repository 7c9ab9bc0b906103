import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from capdrop.dynamics import PhysParams, angular_momentum
from capdrop.linear import bifurcation_frequency
from capdrop.rotating import (
    Constraints,
    NewtonError,
    RotatingWave,
    align_phase,
    alignment_error,
    continue_branch,
    newton_solve,
    orbit_hamiltonian_spread,
    residual,
    residual_jacobian,
    residual_time_form,
    seed_wave,
    symmetry_defect,
    validate_rotation,
    variational_defect,
)
from capdrop.state import DropState, reversibility, translate
from capdrop.trig import SolverGrid, TrigSeries, from_samples, l2_norm, reflect, samples, sobolev_norm

N = 32
GRID = SolverGrid(N)
P = PhysParams(1.0)
OMEGA2 = bifurcation_frequency(2, 1.0)


@pytest.fixture(scope="module")
def wave():
    return newton_solve(seed_wave(2, 1.0, 1e-4, GRID), Constraints(1e-4, 2, "reversible"), P, GRID)


@given(st.floats(-3, 3))
def test_circle_solves_for_every_frequency(omega):
    z = TrigSeries.zeros(N)
    f1, f2 = residual(omega, z, z, P, GRID)
    assert max(np.abs(f1.vector).max(), np.abs(f2.vector).max()) <= 1e-14


def test_time_form_identity(small_state):
    for _ in range(3):
        u = small_state()
        f1, f2 = residual(0.8, u.xi, u.chi, P, GRID)
        t1, t2 = residual_time_form(0.8, u.xi, u.chi, P, GRID)
        M = GRID.fine_M
        e = np.exp(2 * samples(u.xi, M))
        assert l2_norm(f2 - from_samples(-e * samples(t1, M), N)) <= 1e-10
        assert l2_norm(f1 - from_samples(e * samples(t2, M), N)) <= 1e-10


def test_second_component_has_zero_mean(small_state):
    u = small_state()
    _, f2 = residual(1.3, u.xi, u.chi, P, GRID)
    assert abs(2 * math.pi * f2.mean) <= 1e-10


def test_translation_equivariance(small_state):
    u = small_state(N, 0.05, 0.05)
    alpha = 1.1
    v = translate(u, alpha)
    a = DropState(*residual(0.9, v.xi, v.chi, P, GRID))
    b = translate(DropState(*residual(0.9, u.xi, u.chi, P, GRID)), alpha)
    assert (a - b).norm() <= 1e-9


def test_reversibility_equivariance(small_state):
    u = small_state(N, 0.05, 0.05)
    v = reversibility(u)
    f1, f2 = residual(0.9, v.xi, v.chi, P, GRID)
    g1, g2 = residual(0.9, u.xi, u.chi, P, GRID)
    assert l2_norm(f1 - reflect(g1)) <= 1e-10
    assert l2_norm(f2 + reflect(g2)) <= 1e-10


def test_residual_is_a_gradient(wave, small_state):
    assert variational_defect(wave, P, GRID) <= 1e-10
    u = small_state()
    w = RotatingWave(0.7, u.xi, u.chi, 0.0)
    assert variational_defect(w, P, GRID) <= 1e-10


def test_jacobian_against_finite_differences(small_state):
    u = small_state(N, 0.05, 0.05)
    omega = 1.1
    J, d_omega = residual_jacobian(omega, u.xi, u.chi, P, GRID)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(u.vector.size) * np.exp(-0.3 * np.tile(np.r_[0, np.arange(1, N + 1), np.arange(1, N + 1)], 2))
    h = 1e-6

    def F(vec, om):
        s = DropState.from_vector(vec)
        return DropState(*residual(om, s.xi, s.chi, P, GRID)).vector

    fd = (F(u.vector + h * v, omega) - F(u.vector - h * v, omega)) / (2 * h)
    assert np.abs(J @ v - fd).max() <= 1e-6
    fd_w = (F(u.vector, omega + h) - F(u.vector, omega - h)) / (2 * h)
    assert np.abs(d_omega - fd_w).max() <= 1e-7


def test_static_circle_in_one_step():
    guess = RotatingWave(OMEGA2, TrigSeries.zeros(N), TrigSeries.zeros(N), 0.0, ell=2)
    w = newton_solve(guess, Constraints(0.0, 2, "reversible"), P, GRID)
    assert w.iterations == 1
    assert w.state.norm() == 0.0 and w.omega == OMEGA2


@pytest.mark.parametrize("symmetry", ["reversible", "none"])
def test_seeded_solve_converges_quadratically(symmetry):
    a = 1e-4
    w = newton_solve(seed_wave(2, 1.0, a, GRID), Constraints(a, 2, symmetry), P, GRID)
    assert w.residual_norm <= 1e-10
    assert angular_momentum(w.state, GRID) == pytest.approx(a, rel=1e-10)
    hist = np.array(w.history)
    big = hist[hist > 1e-9]
    ratios = big[1:] / big[:-1] ** 2
    assert ratios.size >= 1 and np.all(ratios < 1e3)


def test_newton_reports_failure():
    a = 1e-3
    with pytest.raises(NewtonError):
        newton_solve(seed_wave(2, 1.0, a, GRID), Constraints(a, 2, "reversible"), P, GRID, max_iter=1)


def test_hamiltonian_is_constant_on_the_orbit(wave):
    assert orbit_hamiltonian_spread(wave, P, GRID, np.linspace(0, 2 * np.pi, 9)) <= 1e-12


def test_phase_alignment(wave):
    assert align_phase(wave, wave)[0] % math.pi == pytest.approx(0.0, abs=1e-12)
    moved = replace(wave, eta=translate(wave.eta, 0.3), beta=translate(wave.beta, 0.3))
    alpha, aligned = align_phase(moved, wave)
    # α undoes the shift, modulo the 2π/ℓ symmetry of the wave
    assert math.remainder(alpha + 0.3, math.pi) == pytest.approx(0.0, abs=1e-12)
    assert alignment_error(moved, wave) <= 1e-12


def test_free_solution_lies_on_the_reversible_orbit(wave):
    a = wave.a
    seed = seed_wave(2, 1.0, a, GRID)
    tilted = replace(seed, eta=translate(seed.eta, 0.4) + TrigSeries.mode(3, N, "sin", 1e-5), beta=translate(seed.beta, 0.4))
    free = newton_solve(tilted, Constraints(a, 2, "none"), P, GRID)
    assert alignment_error(free, wave) <= 1e-8


def test_branch_scaling():
    br = continue_branch(2, 1.0, [1e-6, 4e-6, 1.6e-5], "reversible", GRID)
    assert br.a_values.tolist() == [1e-6, 4e-6, 1.6e-5]
    assert abs(br.amplitude_exponent() - 0.5) <= 0.02
    c = br.bounded_constant()
    assert c.max() / c.min() - 1 <= 0.05
    assert np.all(np.abs(br.omegas - OMEGA2) <= c.max() * np.sqrt(br.a_values))


@pytest.mark.parametrize("c", [2, 3])
def test_c_fold_branch_keeps_its_symmetry(c):
    br = continue_branch(1, 1.0, [1e-5, 2e-5], "none", GRID, c=c)
    for w in br.points:
        assert symmetry_defect(w) <= 1e-12
        off = (np.arange(1, N + 1) % c) != 0
        assert np.abs(np.r_[w.eta.cos[off], w.eta.sin[off], w.beta.cos[off], w.beta.sin[off]]).max() <= 1e-12
    assert br.omega_intercept() == pytest.approx(bifurcation_frequency(c, 1.0), abs=1e-6)


def test_branch_argument_checks():
    with pytest.raises(ValueError):
        continue_branch(1, 1.0, [1e-5], "none", GRID)
    with pytest.raises(ValueError):
        continue_branch(2, 1.0, [2e-5, 1e-5], "none", GRID)


def test_rigid_rotation(wave):
    z = TrigSeries.zeros(N)
    assert validate_rotation(RotatingWave(OMEGA2, z, z, 0.0, ell=2), P, GRID, 0.01, T=0.5) == 0.0
    err = validate_rotation(wave, P, GRID, 1e-2, T=0.5)
    assert err <= 1e-6


def test_wave_serialization(wave):
    d = wave.to_dict()
    assert set(d) >= {"sigma0", "xi", "chi", "omega"}
    assert TrigSeries.from_dict(d["xi"]).allclose(wave.eta)
    assert sobolev_norm(wave.eta, 3) > 0


def test_only_the_implemented_sigma_sign_solves(wave):
    from capdrop.rotating import sign_variant_residuals

    implemented, flipped = sign_variant_residuals(wave, P, GRID)
    assert implemented <= 1e-10
    # the flipped group leaves an O(√a) defect
    assert flipped >= 0.1 * math.sqrt(wave.a)
