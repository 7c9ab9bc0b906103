"""Drop boundary geometry in strip coordinates.

The strip point (ρ, θ) maps to e^ρ (cos θ, sin θ); the boundary is the graph
ρ = ξ(θ) with ξ = log(1 + h), h the radial elevation over the unit circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trig import SolverGrid, TrigSeries, differentiate, evaluate, nonlinear_map, quadrature, samples

__all__ = [
    "S1State",
    "conformal_map",
    "s1_to_torus",
    "torus_to_s1",
    "curvature",
    "normal_vector",
    "tangent_vector",
    "enclosed_area",
    "arc_length",
]


@dataclass(frozen=True, eq=False)
class S1State:
    """Radial elevation ``h`` and boundary potential ``psi`` over the unit circle."""

    h: TrigSeries
    psi: TrigSeries

    def to_dict(self) -> dict:
        return {"h": self.h.to_dict(), "psi": self.psi.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "S1State":
        return cls(TrigSeries.from_dict(d["h"]), TrigSeries.from_dict(d["psi"]))


def conformal_map(rho, theta):
    """Strip point (ρ, θ) to the plane point e^ρ(cos θ, sin θ)."""
    r = np.exp(rho)
    return np.stack((r * np.cos(theta), r * np.sin(theta)), axis=-1)


def s1_to_torus(h: TrigSeries, grid: SolverGrid) -> TrigSeries:
    """ξ = log(1 + h); raises ValueError if 1 + h ≤ 0 at a sample."""
    if np.any(samples(h, grid.fine_M) <= -1.0):
        raise ValueError("1 + h must be positive on the whole circle")
    return nonlinear_map(h, np.log1p, grid)


def torus_to_s1(xi: TrigSeries, grid: SolverGrid) -> TrigSeries:
    return nonlinear_map(xi, np.expm1, grid)


def curvature(xi: TrigSeries, grid: SolverGrid) -> TrigSeries:
    """Curvature of the boundary, H = e^{−ξ}[s^{−1} − (ξ' s^{−1})'], s = √(1+ξ'²).

    Evaluated in divergence form, which avoids the cancellation in
    ξ'' − 1 − ξ'² at small amplitude.
    """
    xi = xi.truncate(grid.N)
    dxi = differentiate(xi)
    slope = nonlinear_map(dxi, lambda p: p / np.sqrt(1.0 + p * p), grid)
    dslope = differentiate(slope)
    return nonlinear_map(
        [xi, dxi, dslope], lambda x, p, ds: np.exp(-x) * (1.0 / np.sqrt(1.0 + p * p) - ds), grid
    )


def tangent_vector(xi: TrigSeries, theta):
    """γ_ξ'(θ) = e^ξ {ξ'(cos θ, sin θ) − (sin θ, −cos θ)}."""
    x = evaluate(xi, theta)
    p = evaluate(differentiate(xi), theta)
    c, s = np.cos(theta), np.sin(theta)
    return np.exp(x)[..., None] * np.stack((p * c - s, p * s + c), axis=-1)


def normal_vector(xi: TrigSeries, theta):
    """Outward unit normal (1+ξ'²)^{−1/2}[(cos θ, sin θ) + ξ'(sin θ, −cos θ)]."""
    theta = np.asarray(theta, dtype=float)
    p = np.asarray(evaluate(differentiate(xi), theta))
    c, s = np.cos(theta), np.sin(theta)
    scale = 1.0 / np.sqrt(1.0 + p * p)
    return np.stack((scale * (c + p * s), scale * (s - p * c)), axis=-1)


def enclosed_area(xi: TrigSeries, grid: SolverGrid) -> float:
    """½∫ e^{2ξ} dθ."""
    return 0.5 * quadrature(np.exp(2.0 * samples(xi, grid.fine_M)))


def arc_length(xi: TrigSeries, grid: SolverGrid) -> float:
    """∫ e^ξ √(1+ξ'²) dθ."""
    M = grid.fine_M
    x = samples(xi, M)
    p = samples(differentiate(xi), M)
    return quadrature(np.exp(x) * np.sqrt(1.0 + p * p))
