"""Real trigonometric series on the one-dimensional torus.

A :class:`TrigSeries` stores the raw coefficients of

    f(θ) = mean + Σ_{ℓ=1}^{N} cos[ℓ-1]·cos(ℓθ) + sin[ℓ-1]·sin(ℓθ).

Norms are computed in the L²-orthonormal basis φ_{0,0} = 1/√(2π),
φ_{ℓ,1} = cos(ℓθ)/√π, φ_{ℓ,-1} = sin(ℓθ)/√π.

Packed coefficient vectors (used by the Newton solvers) are laid out as
``[mean, cos_1..cos_N, sin_1..sin_N]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TrigSeries",
    "SolverGrid",
    "NonFiniteError",
    "samples",
    "from_samples",
    "evaluate",
    "differentiate",
    "nonlinear_map",
    "inner",
    "l2_norm",
    "orthonormal_coefficients",
    "sobolev_norm",
    "analytic_norm",
    "translate",
    "reflect",
    "c_fold_project",
    "quadrature",
]

TWO_PI = 2.0 * math.pi


class NonFiniteError(FloatingPointError):
    """A pointwise map produced inf or nan."""


@dataclass(frozen=True, eq=False)
class TrigSeries:
    mean: float
    cos: np.ndarray
    sin: np.ndarray

    def __post_init__(self):
        c = np.array(self.cos, dtype=float).reshape(-1)
        s = np.array(self.sin, dtype=float).reshape(-1)
        if c.shape != s.shape:
            raise ValueError("cos and sin coefficient arrays must have equal length")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "cos", c)
        object.__setattr__(self, "sin", s)

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, N: int) -> "TrigSeries":
        return cls(0.0, np.zeros(N), np.zeros(N))

    @classmethod
    def constant(cls, value: float, N: int) -> "TrigSeries":
        return cls(value, np.zeros(N), np.zeros(N))

    @classmethod
    def mode(cls, ell: int, N: int, kind: str = "cos", amplitude: float = 1.0) -> "TrigSeries":
        """Single Fourier mode ``amplitude·cos(ℓθ)`` (or sin)."""
        if ell == 0:
            return cls.constant(amplitude, N)
        c, s = np.zeros(N), np.zeros(N)
        if kind == "cos":
            c[ell - 1] = amplitude
        elif kind == "sin":
            s[ell - 1] = amplitude
        else:
            raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")
        return cls(0.0, c, s)

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "TrigSeries":
        v = np.asarray(v, dtype=float)
        N = (v.size - 1) // 2
        return cls(v[0], v[1 : N + 1], v[N + 1 :])

    @property
    def N(self) -> int:
        return self.cos.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate(([self.mean], self.cos, self.sin))

    def truncate(self, N: int) -> "TrigSeries":
        """Truncate or zero-pad to order ``N``."""
        if N <= self.N:
            return TrigSeries(self.mean, self.cos[:N], self.sin[:N])
        pad = np.zeros(N - self.N)
        return TrigSeries(self.mean, np.concatenate((self.cos, pad)), np.concatenate((self.sin, pad)))

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, TrigSeries):
            if other.N != self.N:
                n = max(self.N, other.N)
                return self.truncate(n), other.truncate(n)
            return self, other
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return TrigSeries(self.mean + other, self.cos, self.sin)
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return TrigSeries(a.mean + b.mean, a.cos + b.cos, a.sin + b.sin)

    __radd__ = __add__

    def __neg__(self):
        return TrigSeries(-self.mean, -self.cos, -self.sin)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if not isinstance(k, (int, float, np.floating)):
            return NotImplemented
        return TrigSeries(k * self.mean, k * self.cos, k * self.sin)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / k)

    def __call__(self, theta):
        return evaluate(self, theta)

    def __repr__(self):
        return f"TrigSeries(N={self.N}, mean={self.mean:.6g})"

    def allclose(self, other: "TrigSeries", atol: float = 0.0, rtol: float = 1e-12) -> bool:
        a, b = self._coerce(other)
        return bool(np.allclose(a.vector, b.vector, atol=atol, rtol=rtol))

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {"mean": self.mean, "cos": self.cos.tolist(), "sin": self.sin.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "TrigSeries":
        return cls(d["mean"], d["cos"], d["sin"])


@dataclass(frozen=True)
class SolverGrid:
    """Truncation order and collocation/dealiasing sizes.

    ``M`` defaults to ``2N+1``.  Nonlinear pointwise maps are evaluated on
    ``ceil(dealias·M)`` points.  The Dirichlet-Neumann solver uses
    ``dno_pad`` extra extension modes (default ``max(8, N//4)``).
    """

    N: int = 64
    M: int | None = None
    dealias: float = 2.0
    dno_pad: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.M is None:
            object.__setattr__(self, "M", 2 * self.N + 1)
        if self.M < 2 * self.N + 1:
            raise ValueError(f"M={self.M} must be at least 2N+1={2 * self.N + 1}")
        if self.dealias < 1:
            raise ValueError("dealias factor must be >= 1")
        if self.dno_pad is None:
            object.__setattr__(self, "dno_pad", max(8, self.N // 4))
        if self.dno_pad < 0:
            raise ValueError("dno_pad must be non-negative")

    @property
    def size(self) -> int:
        """Length of a packed coefficient vector."""
        return 2 * self.N + 1

    @property
    def extension_modes(self) -> int:
        return self.N + self.dno_pad

    @property
    def fine_M(self) -> int:
        return int(math.ceil(self.dealias * self.M))

    def points(self, M: int | None = None) -> np.ndarray:
        M = self.M if M is None else M
        return TWO_PI * np.arange(M) / M

    def with_dealias(self, factor: float) -> "SolverGrid":
        return SolverGrid(self.N, self.M, factor, self.dno_pad)


# transforms -------------------------------------------------------------

def samples(f: TrigSeries, M: int) -> np.ndarray:
    """Values of ``f`` on the uniform grid θ_j = 2πj/M."""
    N = f.N
    if M < 2 * N + 1:
        # modes above the grid Nyquist would alias; drop them
        f = f.truncate((M - 1) // 2)
        N = f.N
    spectrum = np.zeros(M // 2 + 1, dtype=complex)
    spectrum[0] = f.mean
    spectrum[1 : N + 1] = 0.5 * (f.cos - 1j * f.sin)
    return np.fft.irfft(spectrum * M, n=M)


def from_samples(values: np.ndarray, N: int) -> TrigSeries:
    """Discrete Fourier coefficients of grid samples, truncated to order ``N``."""
    values = np.asarray(values, dtype=float)
    M = values.size
    F = np.fft.rfft(values) / M
    K = min(N, (M - 1) // 2)
    c = np.zeros(N)
    s = np.zeros(N)
    c[:K] = 2.0 * F[1 : K + 1].real
    s[:K] = -2.0 * F[1 : K + 1].imag
    return TrigSeries(F[0].real, c, s)


def evaluate(f: TrigSeries, theta):
    theta = np.asarray(theta, dtype=float)
    ell = np.arange(1, f.N + 1)
    arg = np.multiply.outer(theta, ell)
    out = f.mean + np.cos(arg) @ f.cos + np.sin(arg) @ f.sin
    return out if out.ndim else float(out)


def differentiate(f: TrigSeries, order: int = 1) -> TrigSeries:
    ell = np.arange(1, f.N + 1, dtype=float)
    c, s = f.cos, f.sin
    for _ in range(order):
        c, s = ell * s, -ell * c
    return TrigSeries(0.0 if order else f.mean, c, s)


def nonlinear_map(
    fs: Sequence[TrigSeries] | TrigSeries,
    g: Callable[..., np.ndarray],
    grid: SolverGrid,
    factor: float | None = None,
) -> TrigSeries:
    """Apply a pointwise map ``g(*values)`` on the dealiased grid.

    The inputs are sampled on ``ceil(factor·M)`` points, ``g`` is applied
    to the sample arrays, and the result is transformed back and
    truncated to ``grid.N`` modes.

    Raises
    ------
    NonFiniteError
        If ``g`` produces a non-finite value.
    """
    if isinstance(fs, TrigSeries):
        fs = [fs]
    factor = grid.dealias if factor is None else factor
    Mf = int(math.ceil(factor * grid.M))
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(g(*[samples(f, Mf) for f in fs]), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("pointwise map produced a non-finite value")
    return from_samples(vals, grid.N)


def quadrature(values: np.ndarray) -> float:
    """∫_T¹ f dθ from uniform samples (exact for trig polynomials of degree < M)."""
    values = np.asarray(values, dtype=float)
    return TWO_PI * float(np.mean(values))


# inner products and norms ----------------------------------------------

def inner(f: TrigSeries, g: TrigSeries) -> float:
    """L²(T¹) inner product, exact for the truncated series."""
    n = min(f.N, g.N)
    return TWO_PI * f.mean * g.mean + math.pi * float(f.cos[:n] @ g.cos[:n] + f.sin[:n] @ g.sin[:n])


def l2_norm(f: TrigSeries) -> float:
    return math.sqrt(max(inner(f, f), 0.0))


def orthonormal_coefficients(f: TrigSeries) -> tuple[float, np.ndarray, np.ndarray]:
    """Coefficients (f_{0,0}, f_{ℓ,1}, f_{ℓ,-1}) in the orthonormal basis."""
    rp = math.sqrt(math.pi)
    return math.sqrt(TWO_PI) * f.mean, rp * f.cos, rp * f.sin


def sobolev_norm(f: TrigSeries, s: float) -> float:
    """H^s norm, Σ (1 + ℓ^{2s}) |f_{ℓ,m}|²."""
    return analytic_norm(f, 0.0, s)


def analytic_norm(f: TrigSeries, decay: float, s: float) -> float:
    """Analytic-class norm with exponential weight e^{2·decay·ℓ}.

    The constant mode carries weight 1 for every ``s`` (ℓ^{2s} is read as 0
    at ℓ = 0).  Diagnostic only; it does not certify membership in the
    analytic class.
    """
    f0, fc, fs = orthonormal_coefficients(f)
    ell = np.arange(1, f.N + 1, dtype=float)
    w = np.exp(2.0 * decay * ell) * (1.0 + ell ** (2.0 * s))
    total = f0**2 + float(w @ (fc**2 + fs**2))
    return math.sqrt(total)


# symmetry actions ------------------------------------------------------

def translate(f: TrigSeries, alpha: float) -> TrigSeries:
    """(T_α f)(θ) = f(θ + α), exact in coefficient space."""
    ell = np.arange(1, f.N + 1)
    ca, sa = np.cos(ell * alpha), np.sin(ell * alpha)
    return TrigSeries(f.mean, f.cos * ca + f.sin * sa, f.sin * ca - f.cos * sa)


def reflect(f: TrigSeries) -> TrigSeries:
    """(ι f)(θ) = f(−θ)."""
    return TrigSeries(f.mean, f.cos, -f.sin)


def c_fold_project(f: TrigSeries, c: int) -> TrigSeries:
    """Keep the mean and the modes whose index is a multiple of ``c``."""
    if c < 1:
        raise ValueError("c must be a positive integer")
    keep = (np.arange(1, f.N + 1) % c) == 0
    return TrigSeries(f.mean, np.where(keep, f.cos, 0.0), np.where(keep, f.sin, 0.0))
