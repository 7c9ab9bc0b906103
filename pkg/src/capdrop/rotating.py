"""Rotating waves: profiles (η, β) with ξ(t, θ) = η(θ + ωt), χ(t, θ) = β(θ + ωt).

They are zeros of the gradient-form residual F = ∇H − ω∇I,

    F₁ = −½Q² + ½β'² − σ₀(e^η(η'/s)' − e^η/s + e^{2η}) + ωe^{2η}β',
    F₂ = G(η)β − ωe^{2η}η',

with s = √(1+η'²) and Q = (G(η)β + η'β')/s.  Branches are parameterized by
the angular momentum a = I(η, β) and computed by Newton's method on a
square augmented system.

Augmented system
----------------
Unknowns are the retained coefficients of η and β, the frequency ω and,
outside the reversible subspace, two unfolding multipliers μ₀ and μ₁:

    F(u) + μ₀(0, 1) + μ₁ w = 0,   I(u) = a,   mean β = 0,   ⟨η, w_η⟩ = 0.

Here w is the orbit tangent at the seed; for a cos(ℓθ) seed the phase
condition says that the sin(ℓθ) coefficient of η vanishes.  Both ⟨F, (0, 1)⟩ and
⟨F, (η', β')⟩ vanish identically, so any solution has μ₀ = μ₁ = 0 up to
round-off and solves F = 0.  In the reversible subspace E (η even, β odd)
neither degeneracy is present and the multipliers and the phase and mean
constraints are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.optimize import root_scalar

from .dno import DnoOperator
from .dynamics import PhysParams, angular_momentum, grad_hamiltonian, hamiltonian, mass, rhs
from .evolution import simulate
from .linear import bifurcation_frequency
from .state import DropState
from .state import translate as translate_state
from .trig import SolverGrid, TrigSeries, differentiate, from_samples, l2_norm, nonlinear_map, samples, sobolev_norm

__all__ = [
    "RotatingWave",
    "Branch",
    "Constraints",
    "NewtonError",
    "BranchError",
    "residual",
    "residual_time_form",
    "residual_jacobian",
    "newton_solve",
    "seed_wave",
    "continue_branch",
    "align_phase",
    "alignment_error",
    "validate_rotation",
    "symmetry_defect",
    "symmetry_tag",
    "sign_variant_residuals",
]

NEWTON_TOL = 1e-11
NEWTON_MAX_ITER = 25
# reciprocal condition below which the augmented Jacobian is treated as singular
MIN_RCOND = 1e-15


class NewtonError(RuntimeError):
    """Newton's method failed to converge or met a singular Jacobian."""


class BranchError(RuntimeError):
    """Continuation stopped early; ``branch`` holds the points computed so far."""

    def __init__(self, msg: str, branch: "Branch"):
        super().__init__(msg)
        self.branch = branch


def symmetry_tag(symmetry: str, c: int) -> str:
    if symmetry not in ("none", "reversible"):
        raise ValueError(f"symmetry must be 'none' or 'reversible', got {symmetry!r}")
    if c < 1:
        raise ValueError("c must be a positive integer")
    if c == 1:
        return symmetry
    return f"c_fold({c})" if symmetry == "none" else f"both({c})"


@dataclass(frozen=True, eq=False)
class RotatingWave:
    omega: float
    eta: TrigSeries
    beta: TrigSeries
    a: float
    residual_norm: float = math.inf
    symmetry: str = "none"
    ell: int = 1
    sigma0: float = 1.0
    history: tuple[float, ...] = ()

    @property
    def state(self) -> DropState:
        return DropState(self.eta, self.beta)

    @property
    def iterations(self) -> int:
        """Number of residual evaluations used by the solve."""
        return len(self.history)

    def to_dict(self) -> dict:
        return {
            "sigma0": self.sigma0,
            "xi": self.eta.to_dict(),
            "chi": self.beta.to_dict(),
            "omega": self.omega,
            "a": self.a,
            "ell": self.ell,
            "symmetry": self.symmetry,
            "residual": self.residual_norm,
        }


@dataclass
class Branch:
    ell_star: int
    sigma0: float
    symmetry: str
    c: int = 1
    points: list[RotatingWave] = field(default_factory=list)

    @property
    def omega_star(self) -> float:
        return bifurcation_frequency(self.c * self.ell_star, self.sigma0)

    @property
    def a_values(self) -> np.ndarray:
        return np.array([w.a for w in self.points])

    @property
    def omegas(self) -> np.ndarray:
        return np.array([w.omega for w in self.points])

    def amplitude_exponent(self, s: float = 3.0) -> float:
        """Slope of log ‖η_a‖_{H^s} against log a."""
        a = self.a_values
        amp = np.array([sobolev_norm(w.eta, s) for w in self.points])
        return float(np.polyfit(np.log(a), np.log(amp), 1)[0])

    def fit(self, s: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
        """Scaling constants per point.

        Returns (C_ω, C_amp) with C_ω = |ω_a − ω_*|/√a and
        C_amp = ‖η_a‖_{H^s}/√a.
        """
        a = self.a_values
        c_omega = np.abs(self.omegas - self.omega_star) / np.sqrt(a)
        c_amp = np.array([sobolev_norm(w.eta, s) for w in self.points]) / np.sqrt(a)
        return c_omega, c_amp

    def bounded_constant(self) -> np.ndarray:
        """(|ω_a − ω_*| + ‖η_a‖_{H³} + ‖β_a‖_{H^{5/2}})/√a for each point."""
        a = self.a_values
        tot = np.abs(self.omegas - self.omega_star)
        tot = tot + np.array([sobolev_norm(w.eta, 3.0) + sobolev_norm(w.beta, 2.5) for w in self.points])
        return tot / np.sqrt(a)

    def omega_intercept(self, degree: int = 2) -> float:
        """ω at a = 0 from a polynomial fit of ω_a in a."""
        deg = min(degree, len(self.points) - 1)
        return float(np.polyval(np.polyfit(self.a_values, self.omegas, deg), 0.0))

    def rows(self, p: PhysParams, grid: SolverGrid, s: float = 3.0) -> list[tuple[float, ...]]:
        """CSV rows (a, ω, residual, ‖η‖_{H^s}, ‖β‖_{H^s}, H, I, M, symmetry defect)."""
        out = []
        for w in self.points:
            u = w.state.truncate(grid.N)
            out.append(
                (
                    w.a,
                    w.omega,
                    w.residual_norm,
                    sobolev_norm(w.eta, s),
                    sobolev_norm(w.beta, s),
                    hamiltonian(u, p, grid),
                    angular_momentum(u, grid),
                    mass(u, grid),
                    symmetry_defect(w),
                )
            )
        return out


# residual ---------------------------------------------------------------

def residual(
    omega: float, eta: TrigSeries, beta: TrigSeries, p: PhysParams, grid: SolverGrid
) -> tuple[TrigSeries, TrigSeries]:
    """(F₁, F₂) = ∇H − ω∇I at (η, β)."""
    return _Evaluation(omega, DropState(eta, beta), p, grid).residual()


def residual_time_form(
    omega: float, eta: TrigSeries, beta: TrigSeries, p: PhysParams, grid: SolverGrid
) -> tuple[TrigSeries, TrigSeries]:
    """(ωη' − ∂_tξ, ωβ' − ∂_tχ) evaluated at (ξ, χ) = (η, β).

    Related to the gradient form by F₁ = e^{2η}F₀,₂ and F₂ = −e^{2η}F₀,₁.
    """
    u = DropState(eta, beta).truncate(grid.N)
    r = rhs(u, p, grid)
    return differentiate(u.xi) * omega - r.xi, differentiate(u.chi) * omega - r.chi


class _Evaluation:
    """Fine-grid fields of one residual evaluation, shared with the Jacobian."""

    def __init__(self, omega: float, u: DropState, p: PhysParams, grid: SolverGrid):
        N = grid.N
        self.omega, self.p, self.grid = float(omega), p, grid
        self.u = u.truncate(N)
        self.op = DnoOperator(self.u.xi, grid)
        self.g_series = self.op.apply(self.u.chi)
        Mf = grid.fine_M
        self.x = samples(self.u.xi, Mf)
        self.dx = samples(differentiate(self.u.xi), Mf)
        self.q = samples(differentiate(self.u.chi), Mf)
        self.g = samples(self.g_series, Mf)
        self.s = np.sqrt(1.0 + self.dx**2)
        self.dslope = samples(differentiate(from_samples(self.dx / self.s, N)), Mf)
        self.ex = np.exp(self.x)
        self.e2x = self.ex**2
        self.Q = (self.g + self.dx * self.q) / self.s

    def residual(self) -> tuple[TrigSeries, TrigSeries]:
        sig, w, N = self.p.sigma0, self.omega, self.grid.N
        f1 = (
            -0.5 * self.Q**2
            + 0.5 * self.q**2
            - sig * (self.ex * self.dslope - self.ex / self.s + self.e2x)
            + w * self.e2x * self.q
        )
        f2 = self.g - w * self.e2x * self.dx
        return from_samples(f1, N), from_samples(f2, N)

    def jacobian(self) -> tuple[np.ndarray, np.ndarray]:
        """(∂F/∂(η, β), ∂F/∂ω) on packed coefficient vectors."""
        N, Mf = self.grid.N, self.grid.fine_M
        S, P, D = _operators(N, Mf)
        sig, w = self.p.sigma0, self.omega
        x_, dx, q, s = self.x, self.dx, self.q, self.s
        ex, e2x, Q = self.ex, self.e2x, self.Q
        Gm = self.op.matrix()
        SD = S @ D
        dg_eta = self.op.shape_jacobian(self.u.chi)
        dg_eta_s = S @ dg_eta
        g_beta_s = S @ Gm

        col = lambda f, A: f[:, None] * A  # noqa: E731
        # F₁ in η
        coef_dg = -Q / s
        coef_dp = -(Q / s) * q + Q * Q * dx / s**2 - sig * ex * dx / s**3
        coef_dx = -sig * (ex * self.dslope - ex / s + 2.0 * e2x) + 2.0 * w * e2x * q
        curv = S @ (D @ (P @ col(1.0 / s**3, SD)))
        J11 = P @ (col(coef_dg, dg_eta_s) + col(coef_dp, SD) + col(coef_dx, S) - sig * col(ex, curv))
        # F₁ in β
        coef_dq = -(Q / s) * dx + q + w * e2x
        J12 = P @ (col(coef_dg, g_beta_s) + col(coef_dq, SD))
        # F₂
        J21 = dg_eta - P @ (col(2.0 * w * e2x * dx, S) + col(w * e2x, SD))
        J22 = Gm
        J = np.block([[J11, J12], [J21, J22]])
        d_omega = np.concatenate((P @ (e2x * q), -(P @ (e2x * dx))))
        return J, d_omega

    def angular_momentum_gradient(self) -> tuple[float, np.ndarray]:
        """I and its gradient in packed (η, β) coefficients."""
        N, Mf = self.grid.N, self.grid.fine_M
        S, _, D = _operators(N, Mf)
        h = 2.0 * math.pi / Mf
        val = -0.5 * h * float(np.sum(self.e2x * self.q))
        d_eta = h * ((-self.e2x * self.q) @ S)
        d_beta = h * ((-0.5 * self.e2x) @ (S @ D))
        return val, np.concatenate((d_eta, d_beta))


@lru_cache(maxsize=8)
def _operators(N: int, Mf: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampling S (Mf×n), projection P (n×Mf) and derivative D (n×n)."""
    theta = 2.0 * math.pi * np.arange(Mf) / Mf
    ell = np.arange(1, N + 1, dtype=float)
    arg = np.outer(theta, ell)
    S = np.hstack((np.ones((Mf, 1)), np.cos(arg), np.sin(arg)))
    weights = np.concatenate(([1.0 / Mf], np.full(2 * N, 2.0 / Mf)))
    P = weights[:, None] * S.T
    n = 2 * N + 1
    D = np.zeros((n, n))
    D[1 : N + 1, N + 1 :] = np.diag(ell)
    D[N + 1 :, 1 : N + 1] = -np.diag(ell)
    for A in (S, P, D):
        A.flags.writeable = False
    return S, P, D


def residual_jacobian(
    omega: float, eta: TrigSeries, beta: TrigSeries, p: PhysParams, grid: SolverGrid
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic Jacobian of the packed residual with respect to (η, β) and ω."""
    return _Evaluation(omega, DropState(eta, beta), p, grid).jacobian()


# Newton -----------------------------------------------------------------

@dataclass(frozen=True)
class Constraints:
    """Side conditions of a constrained solve.

    Parameters
    ----------
    a : float
        Target angular momentum.
    ell : int
        Active mode of the seed (cℓ* for c-fold problems).
    symmetry : {"none", "reversible"}
        Restrict to E = {η even, β odd}.
    c : int
        Keep only the modes that are multiples of ``c``.
    tangent : DropState, optional
        Orbit tangent w used for the phase condition ⟨η, w_η⟩ = 0 and the
        unfolding; defaults to (η', β') of the guess.
    """

    a: float
    ell: int
    symmetry: str = "none"
    c: int = 1
    tangent: DropState | None = None

    @property
    def reversible(self) -> bool:
        return self.symmetry == "reversible"


def _masks(N: int, cons: Constraints) -> tuple[np.ndarray, np.ndarray]:
    modes = np.arange(1, N + 1)
    fold = (modes % cons.c) == 0
    eta = np.concatenate(([True], fold, fold))
    beta = np.concatenate(([True], fold, fold))
    if cons.reversible:
        eta[N + 1 :] = False
        beta[: N + 1] = False
    return eta, beta


def _seed_tangent(w: RotatingWave, ell: int, N: int) -> DropState:
    t = DropState(differentiate(w.eta.truncate(N)), differentiate(w.beta.truncate(N)))
    if t.norm() > 0:
        return t
    # zero guess: orbit tangent of the kernel direction at ω
    return DropState(TrigSeries.mode(ell, N, "sin", -ell), TrigSeries.mode(ell, N, "cos", -w.omega * ell))


def newton_solve(
    guess: RotatingWave,
    constraints: Constraints,
    p: PhysParams,
    grid: SolverGrid,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
) -> RotatingWave:
    """Solve F(ω; η, β) = 0 with I(η, β) = a.

    Raises
    ------
    NewtonError
        When ``max_iter`` is exceeded or the augmented Jacobian is singular.
    """
    N = grid.N
    cons = constraints
    tag = symmetry_tag(cons.symmetry, cons.c)
    if cons.ell % cons.c:
        raise ValueError("the active mode must be a multiple of c")
    m_eta, m_beta = _masks(N, cons)
    unknown = np.concatenate((m_eta, m_beta))
    idx = np.flatnonzero(unknown)
    n = 2 * N + 1
    phase = not cons.reversible
    # F rows are measured in L²×L²
    wts = np.tile(np.concatenate(([2.0 * math.pi], np.full(2 * N, math.pi))), 2)
    mean_free = bool(m_beta[0])
    if phase:
        w = cons.tangent if cons.tangent is not None else _seed_tangent(guess, cons.ell, N)
        w = w.truncate(N)
        wv = w.vector * (1.0 / w.norm())
        wv[n] = 0.0
        # phase row ⟨η, w_η⟩; for a cos(ℓθ) seed it zeroes the sin(ℓθ) coefficient of η
        phase_row = np.zeros(2 * n)
        phase_row[:n] = wts[:n] * wv[:n]
        phase_row = phase_row[idx]

    x = np.concatenate((guess.state.truncate(N).vector * unknown, [guess.omega]))
    mu = np.zeros(2)
    history: list[float] = []

    for it in range(max_iter + 1):
        u = DropState.from_vector(x[:-1])
        ev = _Evaluation(x[-1], u, p, grid)
        f1, f2 = ev.residual()
        F = np.concatenate((f1.vector, f2.vector))
        if phase:
            F = F + mu[1] * wv
        if mean_free:
            F[n] += mu[0]
        I_val, dI = ev.angular_momentum_gradient()
        eqs = [F[idx], [I_val - cons.a]]
        if phase:
            eqs.append([phase_row @ x[idx]])
        if mean_free:
            eqs.append([x[n]])
        R = np.concatenate(eqs)
        aug_norm = math.sqrt(float(np.sum(wts[idx] * R[: idx.size] ** 2) + np.sum(R[idx.size :] ** 2)))
        history.append(aug_norm)
        if aug_norm <= tol:
            f_norm = math.hypot(l2_norm(f1), l2_norm(f2))
            return RotatingWave(
                omega=float(x[-1]),
                eta=u.xi,
                beta=u.chi,
                a=cons.a,
                residual_norm=f_norm,
                symmetry=tag,
                ell=cons.ell,
                sigma0=p.sigma0,
                history=tuple(history),
            )
        if it == max_iter:
            break
        J, d_omega = ev.jacobian()
        cols = [J[np.ix_(idx, idx)], d_omega[idx, None]]
        if phase:
            cols.append(wv[idx, None])
        if mean_free:
            e0 = np.zeros(2 * n)
            e0[n] = 1.0
            cols.append(e0[idx, None])
        top = np.hstack(cols)
        extra = top.shape[1] - idx.size - 1
        rows = [np.concatenate((dI[idx], [0.0], np.zeros(extra)))]
        if phase:
            rows.append(np.concatenate((phase_row, np.zeros(top.shape[1] - idx.size))))
        if mean_free:
            r = np.zeros(top.shape[1])
            r[np.searchsorted(idx, n)] = 1.0
            rows.append(r)
        A = np.vstack([top] + rows)
        lu, piv, info = sla.lapack.dgetrf(A)
        if info > 0:
            raise NewtonError(f"singular augmented Jacobian at iteration {it}")
        rcond, _ = sla.lapack.dgecon(lu, np.max(np.sum(np.abs(A), axis=0)), norm="1")
        if rcond < MIN_RCOND:
            raise NewtonError(f"augmented Jacobian is numerically singular (rcond={rcond:.2e}) at iteration {it}")
        step = sla.lu_solve((lu, piv), R, check_finite=False)
        k = idx.size
        x[idx] -= step[:k]
        x[-1] -= step[k]
        j = k + 1
        if phase:
            mu[1] -= step[j]
            j += 1
        if mean_free:
            mu[0] -= step[j]
    raise NewtonError(f"Newton did not converge in {max_iter} iterations (residual {history[-1]:.3e})")


# branches ---------------------------------------------------------------

def seed_wave(ell_star: int, sigma0: float, a: float, grid: SolverGrid, c: int = 1) -> RotatingWave:
    """First-order seed along the kernel direction (cos ℓθ, −ω_* sin ℓθ), ℓ = cℓ*.

    The amplitude ε = √(a/(πω_*ℓ)) makes the quadratic part of I equal a.
    """
    ell = c * ell_star
    omega = bifurcation_frequency(ell, sigma0)
    N = grid.N
    if ell > N:
        raise ValueError("active mode exceeds the truncation order")
    eps = math.sqrt(a / (math.pi * omega * ell)) if a > 0 else 0.0
    eta = TrigSeries.mode(ell, N, "cos", eps)
    beta = TrigSeries.mode(ell, N, "sin", -omega * eps)
    return RotatingWave(omega, eta, beta, a, symmetry="none", ell=ell, sigma0=sigma0)


def _seed_direction(ell: int, omega: float, N: int) -> DropState:
    """Orbit tangent of the kernel seed, used as the fixed unfolding direction."""
    return DropState(TrigSeries.mode(ell, N, "sin", -ell), TrigSeries.mode(ell, N, "cos", -omega * ell))


def continue_branch(
    ell_star: int,
    sigma0: float,
    a_values,
    symmetry: str,
    grid: SolverGrid,
    c: int = 1,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    max_ratio: float = 2.0,
) -> Branch:
    """Continue the branch bifurcating from ω_*(cℓ*) through the requested a.

    Intermediate rungs are inserted so that consecutive solves differ by
    at most a factor ``max_ratio`` in a.  Each solve is warm started from the
    previous one, rescaled by the √a law.
    """
    a_values = [float(a) for a in a_values]
    if not a_values or any(a <= 0 for a in a_values):
        raise ValueError("a_values must be positive")
    if any(b <= a for a, b in zip(a_values, a_values[1:])):
        raise ValueError("a_values must be strictly increasing")
    if ell_star < 1 or (ell_star == 1 and c == 1):
        raise ValueError("ell_star = 1 without c-fold symmetry is the degenerate translation mode")
    p = PhysParams(sigma0)
    ell = c * ell_star
    branch = Branch(ell_star, sigma0, symmetry_tag(symmetry, c), c)
    tangent = _seed_direction(ell, bifurcation_frequency(ell, sigma0), grid.N)

    ladder: list[tuple[float, bool]] = []
    prev = a_values[0]
    for a in a_values:
        while a / prev > max_ratio * (1 + 1e-12):
            prev *= max_ratio
            ladder.append((prev, False))
        ladder.append((a, True))
        prev = a

    last: RotatingWave | None = None
    for a, keep in ladder:
        if last is None:
            guess = seed_wave(ell_star, sigma0, a, grid, c)
        else:
            r = math.sqrt(a / last.a)
            guess = replace(last, eta=(last.eta - last.eta.mean) * r + last.eta.mean * (a / last.a), beta=last.beta * r, a=a)
        cons = Constraints(a, ell, symmetry, c, tangent)
        try:
            wave = newton_solve(guess, cons, p, grid, tol, max_iter)
        except (NewtonError, ArithmeticError, RuntimeError) as exc:
            raise BranchError(f"continuation failed at a={a:.6g}: {exc}", branch) from exc
        last = wave
        if keep:
            branch.points.append(wave)
    return branch


def symmetry_defect(w: RotatingWave) -> float:
    """Largest coefficient outside the subspace named by the symmetry tag."""
    tag = w.symmetry
    c = int(tag[tag.index("(") + 1 : -1]) if "(" in tag else 1
    reversible = tag == "reversible" or tag.startswith("both")
    parts = []
    modes = np.arange(1, w.eta.N + 1)
    off = (modes % c) != 0
    for f in (w.eta, w.beta):
        parts.append(np.abs(f.cos[off]))
        parts.append(np.abs(f.sin[off]))
    if reversible:
        parts.append(np.abs(w.eta.sin))
        parts.append(np.abs(w.beta.cos))
        parts.append(np.array([abs(w.beta.mean)]))
    return float(max((np.max(v) for v in parts if v.size), default=0.0))


# phase alignment ----------------------------------------------------------

def _overlap_coefficients(u: DropState, ref: DropState) -> tuple[np.ndarray, np.ndarray, float]:
    """⟨T_α u, ref⟩ = c₀ + Σ_ℓ A_ℓ cos ℓα + B_ℓ sin ℓα."""
    A = np.zeros(u.N)
    B = np.zeros(u.N)
    c0 = 0.0
    for f, g in ((u.xi, ref.xi), (u.chi, ref.chi)):
        g = g.truncate(f.N)
        A += math.pi * (f.cos * g.cos + f.sin * g.sin)
        B += math.pi * (f.sin * g.cos - f.cos * g.sin)
        c0 += 2.0 * math.pi * f.mean * g.mean
    return A, B, c0


def align_phase(u: RotatingWave, ref: RotatingWave) -> tuple[float, RotatingWave]:
    """Translation α minimizing ‖T_α u − ref‖_{L²×L²}, and T_α u.

    The candidates are the ℓ maximizers of the mode-ℓ overlap, ℓ = ``ref.ell``;
    each is refined by Newton's method on the full overlap and the best
    is returned, with α in [0, 2π).
    """
    su, sr = u.state, ref.state
    n = max(su.N, sr.N)
    su, sr = su.truncate(n), sr.truncate(n)
    A, B, _ = _overlap_coefficients(su, sr)
    ell = ref.ell
    if math.hypot(A[ell - 1], B[ell - 1]) == 0.0:
        raise ValueError(f"mode {ell} overlap vanishes; the phase is undetermined")
    k = np.arange(1, n + 1, dtype=float)

    def c(alpha):
        return float(A @ np.cos(k * alpha) + B @ np.sin(k * alpha))

    def dc(alpha):
        return float(k * B @ np.cos(k * alpha) - k * A @ np.sin(k * alpha))

    def ddc(alpha):
        return float(-(k * k * A) @ np.cos(k * alpha) - (k * k * B) @ np.sin(k * alpha))

    base = math.atan2(B[ell - 1], A[ell - 1])
    best = None
    for j in range(ell):
        a0 = (base + 2.0 * math.pi * j) / ell
        try:
            sol = root_scalar(dc, x0=a0, fprime=ddc, method="newton", xtol=1e-15, maxiter=50)
            alpha = sol.root if sol.converged and abs(sol.root - a0) < math.pi / ell else a0
        except (RuntimeError, ZeroDivisionError):
            alpha = a0
        if best is None or c(alpha) > c(best):
            best = alpha
    alpha = float(best % (2.0 * math.pi))
    moved = translate_state(u.state, alpha)
    return alpha, replace(u, eta=moved.xi, beta=moved.chi)


def alignment_error(u: RotatingWave, ref: RotatingWave) -> float:
    """‖T_α u − ref‖_{L²×L²} after :func:`align_phase`."""
    _, v = align_phase(u, ref)
    n = max(v.eta.N, ref.eta.N)
    return (v.state.truncate(n) - ref.state.truncate(n)).norm()


# dynamics check -----------------------------------------------------------

def validate_rotation(
    w: RotatingWave,
    p: PhysParams,
    grid: SolverGrid,
    dt: float,
    T: float | None = None,
    record_every: int = 10,
) -> float:
    """Evolve (η, β) and compare against the rigid rotation T_{ωt}(η, β).

    Integrates over one period 2π/(ℓ|ω|) (or ``T`` when given, or 1 when ω = 0)
    and returns the largest ‖ξ − T_{ωt}η‖ + ‖χ − T_{ωt}β‖ over recorded times.
    """
    if T is None:
        T = 2.0 * math.pi / (w.ell * abs(w.omega)) if w.omega != 0 else 1.0
    u0 = w.state.truncate(grid.N)
    traj = simulate(u0, T, dt, p, grid, record_every=record_every)
    err = 0.0
    for t, u in zip(traj.times, traj.states):
        target = translate_state(u0, w.omega * t)
        err = max(err, l2_norm(u.xi - target.xi) + l2_norm(u.chi - target.chi))
    return err


def orbit_hamiltonian_spread(w: RotatingWave, p: PhysParams, grid: SolverGrid, alphas) -> float:
    """max − min of H over translates T_α(η, β)."""
    vals = [hamiltonian(translate_state(w.state.truncate(grid.N), a), p, grid) for a in alphas]
    return float(max(vals) - min(vals))


def variational_defect(w: RotatingWave, p: PhysParams, grid: SolverGrid) -> float:
    """‖F − (∇H − ω∇I)‖ computed through the dynamics module's gradients."""
    from .dynamics import grad_angular_momentum

    u = w.state.truncate(grid.N)
    gh = grad_hamiltonian(u, p, grid)
    gi = grad_angular_momentum(u, grid)
    f1, f2 = residual(w.omega, u.xi, u.chi, p, grid)
    return math.hypot(l2_norm(f1 - (gh.xi - gi.xi * w.omega)), l2_norm(f2 - (gh.chi - gi.chi * w.omega)))


def sign_variant_residuals(w: RotatingWave, p: PhysParams, grid: SolverGrid) -> tuple[float, float]:
    """‖F₀,₂‖ with the implemented σ₀ group and with that group's sign flipped.

    The implemented form follows the χ evolution equation.  The flipped
    form differs by 2σ₀(e^{−η}(η'/s)' − e^{−η}/s + 1), s = √(1+η'²); on a
    converged wave only the implemented form vanishes.
    """
    u = w.state.truncate(grid.N)
    _, f02 = residual_time_form(w.omega, u.xi, u.chi, p, grid)
    d = differentiate(u.xi)
    slope = nonlinear_map(d, lambda q: q / np.sqrt(1.0 + q * q), grid)
    group = nonlinear_map(
        [u.xi, d, differentiate(slope)], lambda x, q, ds: np.exp(-x) * (ds - 1.0 / np.sqrt(1.0 + q * q)) + 1.0, grid
    )
    return l2_norm(f02), l2_norm(f02 + group * (2.0 * p.sigma0))
