"""Torus form of the capillary drop equations and their Hamiltonian structure.

All pointwise algebra happens on the dealiased grid of ``grid``; derivatives
of nonlinear quantities are taken after transforming back to coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dno import DnoOperator
from .geometry import S1State, s1_to_torus, torus_to_s1
from .state import DropState
from .trig import SolverGrid, TrigSeries, differentiate, from_samples, l2_norm, quadrature, samples

__all__ = [
    "PhysParams",
    "ConservedSet",
    "BoundaryFields",
    "rhs",
    "hamiltonian",
    "angular_momentum",
    "angular_momentum_alt",
    "mass",
    "conserved",
    "grad_hamiltonian",
    "grad_angular_momentum",
    "grad_mass",
    "poisson_bracket",
    "rhs_s1",
    "crosscheck",
]


@dataclass(frozen=True)
class PhysParams:
    sigma0: float = 1.0

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")


@dataclass(frozen=True)
class ConservedSet:
    H: float
    I: float
    M: float


class BoundaryFields:
    """Samples of ξ, ξ', χ', G(ξ)χ and derived quantities on the fine grid."""

    def __init__(self, u: DropState, grid: SolverGrid, op: DnoOperator | None = None):
        N = grid.N
        self.grid = grid
        self.xi = u.xi.truncate(N)
        self.chi = u.chi.truncate(N)
        self.op = op if op is not None else DnoOperator(self.xi, grid)
        self.g_chi = self.op.apply(self.chi)
        Mf = grid.fine_M
        self.Mf = Mf
        self.x = samples(self.xi, Mf)
        self.p = samples(differentiate(self.xi), Mf)
        self.q = samples(differentiate(self.chi), Mf)
        self.g = samples(self.g_chi, Mf)
        self.s = np.sqrt(1.0 + self.p**2)
        slope = from_samples(self.p / self.s, N)
        self.dslope = samples(differentiate(slope), Mf)
        self.ex = np.exp(self.x)
        self.e2x = self.ex**2

    @property
    def kinetic_flux(self) -> np.ndarray:
        """(G(ξ)χ + ξ'χ')/√(1+ξ'²)."""
        return (self.g + self.p * self.q) / self.s

    def to_series(self, values: np.ndarray) -> TrigSeries:
        return from_samples(values, self.grid.N)


def rhs(u: DropState, p: PhysParams, grid: SolverGrid, fields: BoundaryFields | None = None) -> DropState:
    """Time derivatives (∂_tξ, ∂_tχ) of the torus equations."""
    f = fields if fields is not None else BoundaryFields(u, grid)
    sig = p.sigma0
    emx2 = 1.0 / f.e2x
    dxi = emx2 * f.g
    dchi = emx2 * (0.5 * f.kinetic_flux**2 - 0.5 * f.q**2 + sig * f.ex * f.dslope) - sig * (1.0 / (f.ex * f.s) - 1.0)
    return DropState(f.to_series(dxi), f.to_series(dchi))


def hamiltonian(u: DropState, p: PhysParams, grid: SolverGrid, fields: BoundaryFields | None = None) -> float:
    """Kinetic energy + capillary length energy − volume term."""
    f = fields if fields is not None else BoundaryFields(u, grid)
    kinetic = 0.5 * quadrature(samples(f.chi, f.Mf) * f.g)
    return kinetic + p.sigma0 * quadrature(f.ex * f.s) - 0.5 * p.sigma0 * quadrature(f.e2x)


def angular_momentum(u: DropState, grid: SolverGrid) -> float:
    """I = −½∫ e^{2ξ} χ' dθ."""
    Mf = grid.fine_M
    e2x = np.exp(2.0 * samples(u.xi, Mf))
    return -0.5 * quadrature(e2x * samples(differentiate(u.chi), Mf))


def angular_momentum_alt(u: DropState, grid: SolverGrid) -> float:
    """The integrated-by-parts form ∫ e^{2ξ} ξ' χ dθ."""
    Mf = grid.fine_M
    e2x = np.exp(2.0 * samples(u.xi, Mf))
    return quadrature(e2x * samples(differentiate(u.xi), Mf) * samples(u.chi, Mf))


def mass(u: DropState, grid: SolverGrid) -> float:
    """M = ½∫ e^{2ξ} dθ (the enclosed area)."""
    return 0.5 * quadrature(np.exp(2.0 * samples(u.xi, grid.fine_M)))


def conserved(u: DropState, p: PhysParams, grid: SolverGrid) -> ConservedSet:
    return ConservedSet(hamiltonian(u, p, grid), angular_momentum(u, grid), mass(u, grid))


def grad_hamiltonian(u: DropState, p: PhysParams, grid: SolverGrid, fields: BoundaryFields | None = None) -> DropState:
    """L² gradient (∂_ξH, ∂_χH).

    The capillary part of ∂_ξH carries the conformal factors e^ξ and e^{2ξ};
    this is the form that reproduces ∂_tχ = −e^{−2ξ}∂_ξH.
    """
    f = fields if fields is not None else BoundaryFields(u, grid)
    sig = p.sigma0
    d_xi = -0.5 * f.kinetic_flux**2 + 0.5 * f.q**2 - sig * (f.ex * f.dslope - f.ex / f.s + f.e2x)
    return DropState(f.to_series(d_xi), f.g_chi)


def grad_angular_momentum(u: DropState, grid: SolverGrid) -> DropState:
    """(−e^{2ξ}χ', e^{2ξ}ξ')."""
    Mf = grid.fine_M
    e2x = np.exp(2.0 * samples(u.xi, Mf))
    a = from_samples(-e2x * samples(differentiate(u.chi), Mf), grid.N)
    b = from_samples(e2x * samples(differentiate(u.xi), Mf), grid.N)
    return DropState(a, b)


def grad_mass(u: DropState, grid: SolverGrid) -> DropState:
    """(e^{2ξ}, 0)."""
    e2x = np.exp(2.0 * samples(u.xi, grid.fine_M))
    return DropState(from_samples(e2x, grid.N), TrigSeries.zeros(grid.N))


def poisson_bracket(grad_a: DropState, grad_b: DropState, u: DropState, grid: SolverGrid) -> float:
    """{A, B} = ⟨e^{−2ξ}∂_ξA, ∂_χB⟩ − ⟨e^{−2ξ}∂_χA, ∂_ξB⟩."""
    Mf = grid.fine_M
    w = np.exp(-2.0 * samples(u.xi, Mf))
    s = lambda f: samples(f, Mf)  # noqa: E731
    return quadrature(w * s(grad_a.xi) * s(grad_b.chi)) - quadrature(w * s(grad_a.chi) * s(grad_b.xi))


# circle form -------------------------------------------------------------

def _polar_curvature(r: np.ndarray, dr: np.ndarray, ddr: np.ndarray) -> np.ndarray:
    return (r * r + 2.0 * dr * dr - r * ddr) / (r * r + dr * dr) ** 1.5


def rhs_s1(w: S1State, p: PhysParams, grid: SolverGrid) -> S1State:
    """Time derivatives (∂_th, ∂_tψ) of the equations written over the circle.

    Circle gradients become θ-derivatives; the physical Dirichlet-Neumann
    operator is G(h)ψ = G̃(ξ)χ / J with J = √((1+h)² + h'²) and ξ = log(1+h).
    The curvature is the polar-curve formula in ``h``.
    """
    N, Mf = grid.N, grid.fine_M
    h, psi = w.h.truncate(N), w.psi.truncate(N)
    xi = s1_to_torus(h, grid)
    g_tilde = samples(DnoOperator(xi, grid).apply(psi), Mf)
    r = 1.0 + samples(h, Mf)
    dh = samples(differentiate(h), Mf)
    ddh = samples(differentiate(h, 2), Mf)
    dpsi = samples(differentiate(psi), Mf)
    J = np.sqrt(r * r + dh * dh)
    G = g_tilde / J
    dt_h = J / r * G
    dt_psi = 0.5 * (G + dpsi * dh / (r * J)) ** 2 - dpsi**2 / (2.0 * r * r) - p.sigma0 * (_polar_curvature(r, dh, ddh) - 1.0)
    return S1State(from_samples(dt_h, N), from_samples(dt_psi, N))


def crosscheck(u: DropState, p: PhysParams, grid: SolverGrid) -> float:
    """L²×L² discrepancy between the torus RHS and the pulled-back circle RHS."""
    N, Mf = grid.N, grid.fine_M
    torus = rhs(u, p, grid)
    h = torus_to_s1(u.xi, grid)
    circle = rhs_s1(S1State(h, u.chi), p, grid)
    # ∂_th = e^ξ ∂_tξ
    dt_xi = from_samples(samples(circle.h, Mf) * np.exp(-samples(u.xi, Mf)), N)
    return math.hypot(l2_norm(dt_xi - torus.xi), l2_norm(circle.psi - torus.chi))
