"""How accurate is the Dirichlet-Neumann operator on a deformed boundary?

On the boundary r = e^{ξ(θ)} the harmonic function Re zⁿ has trace
χ = e^{nξ} cos nθ and a known normal derivative, so the collocation
operator can be compared against an exact answer while N grows.  Larger boundaries make the collocation
basis e^{ℓρ} badly scaled; past a condition number of 1e13 the operator
refuses to build rather than return inaccurate values.
"""

import numpy as np

from capdrop import DnoError, DnoOperator, SolverGrid, TrigSeries
from capdrop.trig import differentiate, from_samples, samples


def exact_pair(xi, n, grid):
    M = 8 * grid.M
    th = grid.points(M)
    x, dx = samples(xi, M), samples(differentiate(xi), M)
    e = np.exp(n * x)
    chi = from_samples(e * np.cos(n * th), grid.N)
    g = from_samples(n * e * (np.cos(n * th) + dx * np.sin(n * th)), grid.N)
    return chi, g


def main():
    print(f"{'N':>4} {'amplitude':>10} {'max error':>12} {'condition':>10}")
    for amp in (0.05, 0.15):
        for N in (16, 32, 64):
            grid = SolverGrid(N)
            xi = TrigSeries.mode(2, N, "cos", amp) + TrigSeries.mode(3, N, "sin", amp / 3)
            chi, g = exact_pair(xi, 3, grid)
            try:
                op = DnoOperator(xi, grid)
            except DnoError as exc:
                print(f"{N:>4} {amp:>10.2f}  refused: {exc}")
                continue
            err = np.abs((op.apply(chi) - g).vector).max()
            print(f"{N:>4} {amp:>10.2f} {err:>12.2e} {op.condition:>10.1e}")


if __name__ == "__main__":
    main()
