"""Pseudospectral tools for the two-dimensional pure-capillary drop.

The drop boundary is written r = e^{ξ(θ)} and the flow is described by
the pair (ξ, χ), with χ the boundary value of the velocity potential.
"""

from .dno import DnoError, DnoOperator, dno, dno_shape_derivative
from .dynamics import PhysParams, conserved, hamiltonian, rhs
from .evolution import Trajectory, simulate, step_rk4
from .geometry import S1State, s1_to_torus, torus_to_s1
from .linear import bifurcation_frequency, block_matrix, kernel
from .rotating import Branch, RotatingWave, align_phase, continue_branch, newton_solve, seed_wave
from .state import DropState
from .trig import SolverGrid, TrigSeries

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "DnoError",
    "DnoOperator",
    "DropState",
    "PhysParams",
    "RotatingWave",
    "S1State",
    "SolverGrid",
    "Trajectory",
    "TrigSeries",
    "align_phase",
    "bifurcation_frequency",
    "block_matrix",
    "conserved",
    "continue_branch",
    "dno",
    "dno_shape_derivative",
    "hamiltonian",
    "kernel",
    "newton_solve",
    "rhs",
    "s1_to_torus",
    "seed_wave",
    "simulate",
    "step_rk4",
    "torus_to_s1",
]
