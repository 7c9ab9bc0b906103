"""The drop state (ξ, χ) on the torus and its symmetry actions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import trig
from .trig import TrigSeries

__all__ = ["DropState", "translate", "reversibility", "c_fold_project", "in_reversible_subspace"]


@dataclass(frozen=True, eq=False)
class DropState:
    """Log-radius elevation ``xi`` and boundary velocity potential ``chi``."""

    xi: TrigSeries
    chi: TrigSeries

    def __post_init__(self):
        if self.xi.N != self.chi.N:
            n = max(self.xi.N, self.chi.N)
            object.__setattr__(self, "xi", self.xi.truncate(n))
            object.__setattr__(self, "chi", self.chi.truncate(n))

    @classmethod
    def zeros(cls, N: int) -> "DropState":
        return cls(TrigSeries.zeros(N), TrigSeries.zeros(N))

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "DropState":
        v = np.asarray(v, dtype=float)
        n = v.size // 2
        return cls(TrigSeries.from_vector(v[:n]), TrigSeries.from_vector(v[n:]))

    @property
    def N(self) -> int:
        return self.xi.N

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate((self.xi.vector, self.chi.vector))

    def truncate(self, N: int) -> "DropState":
        return DropState(self.xi.truncate(N), self.chi.truncate(N))

    def __add__(self, other: "DropState") -> "DropState":
        return DropState(self.xi + other.xi, self.chi + other.chi)

    def __sub__(self, other: "DropState") -> "DropState":
        return DropState(self.xi - other.xi, self.chi - other.chi)

    def __mul__(self, k: float) -> "DropState":
        return DropState(self.xi * k, self.chi * k)

    __rmul__ = __mul__

    def __neg__(self) -> "DropState":
        return DropState(-self.xi, -self.chi)

    def norm(self) -> float:
        """L²×L² norm."""
        return float(np.hypot(trig.l2_norm(self.xi), trig.l2_norm(self.chi)))

    def to_dict(self) -> dict:
        return {"xi": self.xi.to_dict(), "chi": self.chi.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "DropState":
        return cls(TrigSeries.from_dict(d["xi"]), TrigSeries.from_dict(d["chi"]))


def translate(u, alpha: float):
    """T_α on a series or a state."""
    if isinstance(u, DropState):
        return DropState(trig.translate(u.xi, alpha), trig.translate(u.chi, alpha))
    return trig.translate(u, alpha)


def reversibility(u: DropState) -> DropState:
    """R(ξ, χ)(θ) = (ξ(−θ), −χ(−θ))."""
    return DropState(trig.reflect(u.xi), -trig.reflect(u.chi))


def c_fold_project(u, c: int):
    if isinstance(u, DropState):
        return DropState(trig.c_fold_project(u.xi, c), trig.c_fold_project(u.chi, c))
    return trig.c_fold_project(u, c)


def in_reversible_subspace(u: DropState, atol: float = 1e-12) -> bool:
    """True when ξ is even and χ is odd to within ``atol``."""
    defect = max(np.max(np.abs(u.xi.sin), initial=0.0), np.max(np.abs(u.chi.cos), initial=0.0), abs(u.chi.mean))
    return defect <= atol
