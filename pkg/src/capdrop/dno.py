"""Infinite-depth Dirichlet-Neumann operator on the periodic strip.

The harmonic extension of χ into {ρ < ξ(θ)} is sought as

    Φ̃(ρ, θ) = a₀ + Σ_{ℓ=1}^{N} e^{ℓρ} (a_ℓ cos ℓθ + b_ℓ sin ℓθ),

which is harmonic and has ∂_ρΦ̃ → 0 as ρ → −∞.  The coefficients are fixed
by collocating Φ̃(ξ(θ_j), θ_j) = χ(θ_j) on the uniform grid, and

    G(ξ)χ = ∂_ρΦ̃ − ξ' ∂_θΦ̃   at ρ = ξ(θ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .trig import SolverGrid, TrigSeries, differentiate, evaluate, from_samples, nonlinear_map, samples

__all__ = [
    "DnoError",
    "DnoOperator",
    "ShapeFields",
    "dno_flat",
    "dno",
    "dno_shape_derivative",
    "shape_fields",
    "harmonic_extension_value",
    "MAX_OSCILLATION_MODES",
    "MAX_CONDITION",
    "RESIDUAL_TOL",
]

# e^{ℓ·osc(ξ)} must stay below e^{30} for every extension mode
MAX_OSCILLATION_MODES = 30.0
MAX_CONDITION = 1e13
RESIDUAL_TOL = 1e-10


class DnoError(RuntimeError):
    """The collocation problem is ill-conditioned or failed to interpolate."""


@dataclass(frozen=True)
class ShapeFields:
    """The fields B and V entering the shape derivative of G."""

    b_field: TrigSeries
    v_field: TrigSeries


def dno_flat(chi: TrigSeries) -> TrigSeries:
    """G(0): multiply mode ℓ by ℓ."""
    ell = np.arange(1, chi.N + 1, dtype=float)
    return TrigSeries(0.0, ell * chi.cos, ell * chi.sin)


@lru_cache(maxsize=16)
def _trig_tables(N: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    arg = np.outer(SolverGrid(N, M).points(), np.arange(1, N + 1, dtype=float))
    c, s = np.cos(arg), np.sin(arg)
    c.flags.writeable = False
    s.flags.writeable = False
    return c, s


class DnoOperator:
    """G(ξ) for a fixed boundary ξ, factorized once and applied many times.

    The extension carries ``grid.extension_modes`` ≥ N modes and is
    collocated on ``grid.M + 2·pad`` points; inputs and outputs are truncated
    to N modes.  The extra modes keep the top retained modes of G(ξ)χ
    accurate, which time stepping needs for stability.

    Parameters
    ----------
    xi : TrigSeries
        Boundary elevation in log-radius units.
    grid : SolverGrid
        ``grid.N`` is the input/output truncation; least squares is used
        when ``grid.M > 2N+1``.
    check : bool
        Enforce the conditioning guard and interpolation residual check.
    """

    def __init__(self, xi: TrigSeries, grid: SolverGrid, check: bool = True):
        self.grid = grid
        self.xi = xi.truncate(grid.N)
        N = grid.N
        K = grid.extension_modes
        M = grid.M + 2 * (K - N)
        self._K, self._M = K, M
        xv = samples(self.xi, M)
        osc = float(xv.max() - xv.min())
        if check and osc * K > MAX_OSCILLATION_MODES:
            raise DnoError(
                f"boundary oscillation {osc:.3g} times {K} extension modes exceeds {MAX_OSCILLATION_MODES:g}"
            )
        ell = np.arange(1, K + 1, dtype=float)
        growth = np.exp(np.outer(xv, ell))
        self._cos, self._sin = _trig_tables(K, M)
        self._dxi = samples(differentiate(self.xi), M)
        A = np.empty((M, 2 * K + 1), order="F")
        A[:, 0] = 1.0
        self._gcos = np.multiply(growth, self._cos, out=A[:, 1 : K + 1])
        self._gsin = np.multiply(growth, self._sin, out=A[:, K + 1 :])
        self._A = A
        # column equilibration by the bound e^{ℓ·max ξ} of each column
        col = np.exp(-ell * float(xv.max()))
        self._scale = np.concatenate(([1.0], col, col))
        As = np.multiply(A, self._scale, order="F")
        self._square = M == 2 * K + 1
        if self._square:
            anorm = float(np.max(np.sum(np.abs(As), axis=0)))
            lu, piv, info = lapack.dgetrf(As, overwrite_a=1)
            if info > 0:
                raise DnoError("collocation matrix is singular")
            rcond, _ = lapack.dgecon(lu, anorm, norm="1")
            self.condition = math.inf if rcond == 0 else 1.0 / rcond
            self._lu = (lu, piv)
        else:
            self._lstsq = As
            self.condition = float(np.linalg.cond(As))
        if check and self.condition > MAX_CONDITION:
            raise DnoError(f"collocation condition number {self.condition:.3g} exceeds {MAX_CONDITION:g}")
        self._check = check

    # extension coefficients ------------------------------------------
    def _solve(self, rhs: np.ndarray) -> np.ndarray:
        if self._square:
            z = sla.lu_solve(self._lu, rhs, check_finite=False)
        else:
            z = np.linalg.lstsq(self._lstsq, rhs, rcond=None)[0]
        coef = z * (self._scale if z.ndim == 1 else self._scale[:, None])
        # a least-squares fit does not interpolate, so only the square system is checked
        if self._check and self._square:
            scale = max(1.0, float(np.max(np.abs(rhs))))
            res = float(np.max(np.abs(self._A @ coef - rhs)))
            if res > RESIDUAL_TOL * scale:
                raise DnoError(f"boundary interpolation residual {res:.3g} exceeds tolerance")
        return coef

    def extension_coefficients(self, chi: TrigSeries) -> np.ndarray:
        """Packed coefficients (a₀, a_ℓ, b_ℓ), ℓ ≤ ``grid.extension_modes``, of the harmonic extension."""
        return self._solve(samples(chi.truncate(self.grid.N), self._M))

    def _normal_derivative_samples(self, coef: np.ndarray) -> np.ndarray:
        K = self._K
        ell = np.arange(1, K + 1, dtype=float)
        a, b = coef[1 : K + 1] * ell, coef[K + 1 :] * ell
        d_rho = self._gcos @ a + self._gsin @ b
        d_theta = self._gcos @ b - self._gsin @ a
        return d_rho - self._dxi * d_theta

    def apply(self, chi: TrigSeries) -> TrigSeries:
        coef = self.extension_coefficients(chi)
        return from_samples(self._normal_derivative_samples(coef), self.grid.N)

    __call__ = apply

    def _output_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Samples of the N-mode packed basis on the collocation points, and the projection back."""
        N, K, M = self.grid.N, self._K, self._M
        basis = np.hstack((np.ones((M, 1)), self._cos[:, :N], self._sin[:, :N]))
        weights = np.concatenate(([1.0 / M], np.full(2 * N, 2.0 / M)))
        return basis, weights[:, None] * basis.T

    def _normal_derivative_matrix(self) -> np.ndarray:
        K = self._K
        ell = np.arange(1, K + 1, dtype=float)
        d = self._dxi[:, None]
        gc, gs = self._gcos, self._gsin
        return np.hstack((np.zeros((self._M, 1)), (gc + d * gs) * ell, (gs - d * gc) * ell))

    def matrix(self) -> np.ndarray:
        """Dense matrix of G(ξ) acting on packed N-mode coefficient vectors."""
        basis, proj = self._output_basis()
        return proj @ (self._normal_derivative_matrix() @ self._solve(basis))

    def shape_jacobian(self, chi: TrigSeries) -> np.ndarray:
        """Exact derivative of the discrete operator, ξ̂ ↦ d[G(ξ)χ][ξ̂], as a dense matrix.

        Differentiates the collocation system itself, so it agrees with
        finite differences of :meth:`apply` to rounding error; the
        continuous formula of :func:`dno_shape_derivative` agrees up to
        truncation error.
        """
        N, K = self.grid.N, self._K
        ell = np.arange(1, K + 1, dtype=float)
        c = self.extension_coefficients(chi)
        a, b = c[1 : K + 1], c[K + 1 :]
        gc, gs = self._gcos, self._gsin
        e1 = gc @ (ell * a) + gs @ (ell * b)  # ∂_ρΦ̃
        e2 = gc @ (ell * b) - gs @ (ell * a)  # ∂_θΦ̃
        e11 = gc @ (ell**2 * a) + gs @ (ell**2 * b)
        e12 = gc @ (ell**2 * b) - gs @ (ell**2 * a)
        basis, proj = self._output_basis()
        n_ell = ell[:N]
        dbasis = np.hstack((np.zeros((self._M, 1)), -self._sin[:, :N] * n_ell, self._cos[:, :N] * n_ell))
        dcoef = self._solve(e1[:, None] * basis)
        vals = (e11 - self._dxi * e12)[:, None] * basis - e2[:, None] * dbasis
        vals = vals - self._normal_derivative_matrix() @ dcoef
        return proj @ vals

    def extension_value(self, chi: TrigSeries, rho: float, theta: float) -> float:
        bound = evaluate(self.xi, theta)
        if rho > bound + 1e-12:
            raise ValueError(f"point (ρ={rho}, θ={theta}) lies outside the fluid region ρ ≤ ξ(θ)={bound:.6g}")
        coef = self.extension_coefficients(chi)
        K = self._K
        ell = np.arange(1, K + 1, dtype=float)
        e = np.exp(ell * rho)
        return float(coef[0] + e @ (coef[1 : K + 1] * np.cos(ell * theta) + coef[K + 1 :] * np.sin(ell * theta)))


def dno(xi: TrigSeries, chi: TrigSeries, grid: SolverGrid) -> TrigSeries:
    """G(ξ)χ by harmonic-extension collocation."""
    return DnoOperator(xi, grid).apply(chi)


def harmonic_extension_value(xi: TrigSeries, chi: TrigSeries, grid: SolverGrid, rho: float, theta: float) -> float:
    """Φ̃(ρ, θ) for a point inside the closure of the fluid region."""
    return DnoOperator(xi, grid).extension_value(chi, rho, theta)


def shape_fields(xi: TrigSeries, chi: TrigSeries, grid: SolverGrid, g_chi: TrigSeries | None = None) -> ShapeFields:
    xi, chi = xi.truncate(grid.N), chi.truncate(grid.N)
    if g_chi is None:
        g_chi = dno(xi, chi, grid)
    dxi, dchi = differentiate(xi), differentiate(chi)
    b = nonlinear_map([g_chi, dxi, dchi], lambda g, p, q: (g + p * q) / (1.0 + p * p), grid)
    v = nonlinear_map([dchi, b, dxi], lambda q, bb, p: q - bb * p, grid)
    return ShapeFields(b, v)


def dno_shape_derivative(xi: TrigSeries, chi: TrigSeries, xi_hat: TrigSeries, grid: SolverGrid) -> TrigSeries:
    """Directional derivative dG(ξ)[ξ̂]χ = −G(ξ)[B ξ̂] − (V ξ̂)'."""
    op = DnoOperator(xi, grid)
    fields = shape_fields(xi, chi, grid, op.apply(chi.truncate(grid.N)))
    xi_hat = xi_hat.truncate(grid.N)
    b_hat = nonlinear_map([fields.b_field, xi_hat], np.multiply, grid)
    v_hat = nonlinear_map([fields.v_field, xi_hat], np.multiply, grid)
    return -op.apply(b_hat) - differentiate(v_hat)
