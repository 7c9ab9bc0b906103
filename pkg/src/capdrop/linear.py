"""Linearization of the rotating-wave problem at the static circle.

At (η, β) = (0, 0) the residual linearizes to

    L_ω = [[−σ₀(1 + ∂²), ω∂], [−ω∂, G(0)]],

which is block diagonal over modes.  On the pair (η_ℓ,m, β_ℓ,−m), with m = +1
for (cos, sin) and m = −1 for (sin, cos), the block is
[[σ₀(ℓ²−1), ωmℓ], [ωmℓ, ℓ]] in this package's orientation, which is fixed
by agreement with a finite-difference Jacobian of the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .state import DropState
from .trig import SolverGrid, TrigSeries, l2_norm

__all__ = [
    "SpectralBlock",
    "KernelBasis",
    "block_matrix",
    "bifurcation_frequency",
    "c_fold_frequency",
    "singular_threshold",
    "kernel",
    "assemble_linearization",
]

# orientation of the off-diagonal coupling: −1 gives +ωmℓ, the sign a finite-difference Jacobian of the residual selects
OFFDIAG_SIGN = -1.0


@dataclass(frozen=True)
class SpectralBlock:
    """2×2 block of L_ω on the mode pair (η_{ℓ,m}, β_{ℓ,−m}); ℓ = 0 uses m = 0."""

    ell: int
    m: int
    omega: float
    sigma0: float
    entries: np.ndarray = field(repr=False)

    @property
    def det(self) -> float:
        if self.ell == 0:
            return float(np.linalg.det(self.entries))
        # closed form; exactly zero at the bifurcation frequency
        return self.ell * (self.sigma0 * (self.ell**2 - 1) - self.omega**2 * self.ell)


def block_matrix(ell: int, m: int, omega: float, sigma0: float) -> SpectralBlock:
    """The block L_{ℓ,m}(ω, σ₀).

    The ℓ = 0 block acts on (η mean, β mean) and equals diag(−σ₀, 0).
    """
    if ell < 0:
        raise ValueError("mode index must be non-negative")
    if ell == 0:
        return SpectralBlock(0, 0, omega, sigma0, np.array([[-sigma0, 0.0], [0.0, 0.0]]))
    if m not in (-1, 1):
        raise ValueError("parity index m must be +1 or -1")
    off = OFFDIAG_SIGN * (-omega * m * ell)
    e = np.array([[sigma0 * (ell * ell - 1.0), off], [off, float(ell)]])
    return SpectralBlock(ell, m, omega, sigma0, e)


def bifurcation_frequency(ell_star: int, sigma0: float) -> float:
    """ω_* = √(σ₀(ℓ*²−1)/ℓ*)."""
    if ell_star < 1:
        raise ValueError("ell_star must be at least 1")
    return math.sqrt(sigma0 * (ell_star * ell_star - 1.0) / ell_star)


def c_fold_frequency(c: int, ell_star: int, sigma0: float) -> float:
    """Bifurcation frequency of the c-fold problem, ω_* evaluated at cℓ*."""
    if c < 1:
        raise ValueError("c must be a positive integer")
    return bifurcation_frequency(c * ell_star, sigma0)


def singular_threshold(ell: int, sigma0: float) -> float:
    return 1e-10 * (1.0 + sigma0 * ell**3)


@dataclass
class KernelBasis:
    dimension: int
    generators: list[DropState]
    modes: list[int]


def kernel(omega: float, sigma0: float, ell_max: int, grid: SolverGrid) -> KernelBasis:
    """Kernel of L_ω among modes ℓ ≤ ℓmax, as L²-normalized generators.

    The constant-potential direction (0, 1) is always present.  Each singular
    mode ℓ contributes (cos ℓθ, −ω sin ℓθ) and (sin ℓθ, ω cos ℓθ) up to
    normalization.
    """
    N = grid.N
    if ell_max < 1:
        raise ValueError("ell_max must be at least 1")
    zero = TrigSeries.zeros(N)
    gens = [DropState(zero, TrigSeries.constant(1.0 / math.sqrt(2.0 * math.pi), N))]
    modes = [0]
    for ell in range(1, min(ell_max, N) + 1):
        blk = block_matrix(ell, 1, omega, sigma0)
        if abs(blk.det) > singular_threshold(ell, sigma0):
            continue
        # null vector of [[σ(ℓ²−1), ωℓ], [ωℓ, ℓ]] is (1, −ω)
        v1 = DropState(TrigSeries.mode(ell, N, "cos"), TrigSeries.mode(ell, N, "sin", -omega))
        vm1 = DropState(TrigSeries.mode(ell, N, "sin"), TrigSeries.mode(ell, N, "cos", omega))
        for v in (v1, vm1):
            gens.append(v * (1.0 / v.norm()))
            modes.append(ell)
    return KernelBasis(len(gens), gens, modes)


def assemble_linearization(omega: float, sigma0: float, grid: SolverGrid) -> np.ndarray:
    """Dense L_ω on packed (η, β) coefficient vectors.

    Rows are packed (F₁, F₂) coefficients, in the layout of
    ``DropState.vector``.
    """
    N = grid.N
    n = 2 * N + 1
    ell = np.arange(1, N + 1, dtype=float)
    # ∂ on packed coefficients: cos_ℓ ← ℓ sin_ℓ, sin_ℓ ← −ℓ cos_ℓ
    D = np.zeros((n, n))
    D[1 : N + 1, N + 1 :] = np.diag(ell)
    D[N + 1 :, 1 : N + 1] = -np.diag(ell)
    lap = np.diag(np.concatenate(([0.0], -(ell**2), -(ell**2))))
    g0 = np.diag(np.concatenate(([0.0], ell, ell)))
    L = np.zeros((2 * n, 2 * n))
    L[:n, :n] = -sigma0 * (np.eye(n) + lap)
    L[:n, n:] = omega * D
    L[n:, :n] = -omega * D
    L[n:, n:] = g0
    return L


def apply_linearization(L: np.ndarray, u: DropState) -> DropState:
    return DropState.from_vector(L @ u.vector)


def image_norm(omega: float, sigma0: float, grid: SolverGrid, v: DropState) -> float:
    """‖L_ω v‖ in L²×L²."""
    w = apply_linearization(assemble_linearization(omega, sigma0, grid), v.truncate(grid.N))
    return math.hypot(l2_norm(w.xi), l2_norm(w.chi))
