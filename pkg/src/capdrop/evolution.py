"""Fixed-step time integration of the torus equations.

Classical RK4 with conservation monitoring.  The Poisson structure is
state dependent, so standard symplectic schemes do not apply directly;
drift of H, I and M is measured instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dno import MAX_OSCILLATION_MODES, DnoError
from .dynamics import ConservedSet, PhysParams, conserved, rhs
from .state import DropState
from .trig import SolverGrid, TrigSeries, samples, sobolev_norm

__all__ = [
    "Trajectory",
    "default_dt",
    "linear_frequency",
    "spectral_filter",
    "step_rk4",
    "simulate",
]


@dataclass
class Trajectory:
    """Recorded times, states and conserved quantities of one run."""

    times: list[float] = field(default_factory=list)
    states: list[DropState] = field(default_factory=list)
    monitors: list[ConservedSet] = field(default_factory=list)

    def append(self, t: float, u: DropState, m: ConservedSet) -> None:
        if self.times and not t > self.times[-1]:
            raise ValueError("trajectory times must be strictly increasing")
        if self.states and u.N != self.states[0].N:
            raise ValueError("trajectory states must share the truncation order")
        self.times.append(float(t))
        self.states.append(u)
        self.monitors.append(m)

    @property
    def final(self) -> DropState:
        return self.states[-1]

    def relative_drift(self) -> dict[str, float]:
        """max_t |Q(t) − Q(0)| / max(|Q(0)|, 1e-300) for Q in H, I, M."""
        out = {}
        for name in ("H", "I", "M"):
            vals = np.array([getattr(m, name) for m in self.monitors])
            ref = max(abs(vals[0]), 1e-300)
            out[name] = float(np.max(np.abs(vals - vals[0])) / ref)
        return out

    def to_rows(self, s: float = 1.0) -> list[tuple[float, ...]]:
        """Rows (t, H, I, M, ‖ξ‖_{H^s}, ‖χ‖_{H^s})."""
        return [
            (t, m.H, m.I, m.M, sobolev_norm(u.xi, s), sobolev_norm(u.chi, s))
            for t, u, m in zip(self.times, self.states, self.monitors)
        ]

    def to_dict(self) -> dict:
        return {
            "times": self.times,
            "states": [u.to_dict() for u in self.states],
            "monitors": [{"H": m.H, "I": m.I, "M": m.M} for m in self.monitors],
        }


def linear_frequency(ell: int, sigma0: float) -> float:
    """Oscillation frequency √(σ₀ℓ(ℓ²−1)) of mode ℓ about the circle."""
    return math.sqrt(sigma0 * ell * (ell * ell - 1.0))


def default_dt(p: PhysParams, grid: SolverGrid) -> float:
    """0.25/Ω_N, with Ω_N the fastest linear frequency at truncation N."""
    return 0.25 / linear_frequency(max(grid.N, 2), p.sigma0)


def spectral_filter(f: TrigSeries, order: int = 36) -> TrigSeries:
    """Exponential filter exp(−α(ℓ/N)^order), α chosen so mode N is damped to machine epsilon."""
    N = f.N
    alpha = -math.log(np.finfo(float).eps)
    w = np.exp(-alpha * (np.arange(1, N + 1) / N) ** order)
    return TrigSeries(f.mean, w * f.cos, w * f.sin)


def _guard(u: DropState, grid: SolverGrid) -> None:
    x = samples(u.xi, grid.M)
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(u.chi.vector)):
        raise FloatingPointError("state became non-finite")
    if float(x.max() - x.min()) * grid.N > MAX_OSCILLATION_MODES:
        raise DnoError("boundary left the well-conditioned regime mid-step")


def step_rk4(u: DropState, dt: float, p: PhysParams, grid: SolverGrid) -> DropState:
    """One classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    k1 = rhs(u, p, grid)
    s = u + k1 * (0.5 * dt)
    _guard(s, grid)
    k2 = rhs(s, p, grid)
    s = u + k2 * (0.5 * dt)
    _guard(s, grid)
    k3 = rhs(s, p, grid)
    s = u + k3 * dt
    _guard(s, grid)
    k4 = rhs(s, p, grid)
    out = u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
    _guard(out, grid)
    return out


def simulate(
    u0: DropState,
    T: float,
    dt: float | None,
    p: PhysParams,
    grid: SolverGrid,
    record_every: int = 1,
    filter_modes: bool = False,
) -> Trajectory:
    """Integrate from t = 0 to t = T with a fixed step.

    The step is shrunk slightly if needed so that an integer number of
    steps lands exactly on ``T``.  States and monitors are recorded at
    t = 0, every ``record_every`` steps, and at t = T.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if record_every < 1:
        raise ValueError("record_every must be at least 1")
    dt = default_dt(p, grid) if dt is None else float(dt)
    if not dt > 0:
        raise ValueError("dt must be positive")
    nsteps = max(int(math.ceil(T / dt - 1e-9)), 0) if T > 0 else 0
    h = T / nsteps if nsteps else dt
    u = u0.truncate(grid.N)
    traj = Trajectory()
    traj.append(0.0, u, conserved(u, p, grid))
    for k in range(1, nsteps + 1):
        u = step_rk4(u, h, p, grid)
        if filter_modes:
            u = DropState(spectral_filter(u.xi), spectral_filter(u.chi))
        if k % record_every == 0 or k == nsteps:
            traj.append(k * h, u, conserved(u, p, grid))
    return traj
