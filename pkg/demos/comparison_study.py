"""Order preservation u(0) <= v(0) => u(t) <= v(t) on R^1 versus H^1.

On R^1 the explicit scheme is monotone under the CFL bound and the ordering
is kept exactly.  On H^1 the diffusion matrix is degenerate and position
dependent, the compact mixed stencil has negative off-diagonal weights, and
a violation appears that does not go away under refinement: it grows on
coarse grids and levels off near 1e-3 (24^3 and 48^3 agree to 2%).

    python demos/comparison_study.py
"""

import time

import numpy as np

from carnot_heat import Grid, GridFunction, ProblemSpec, SolverConfig, compare, euclidean, heisenberg, solve_many

CFG = SolverConfig(output_stride=50)


def run(group, u0, v0, p, T):
    specs = [ProblemSpec(group, p, p + 0.5, p, 1.0, 1.0, T, f) for f in (u0, v0)]
    t0 = time.perf_counter()
    tu, tv = solve_many(specs, CFG)
    rep = compare(specs[1], CFG, tu, tv)
    return rep, time.perf_counter() - t0, tu.steps


def euclid_pair(n):
    grid = Grid.uniform([0], [1], n)
    x = grid.nodes[0]
    v0 = np.sin(np.pi * x) * (1 + 0.3 * np.sin(3 * np.pi * x))
    return GridFunction(grid, 0.5 * (1 + 0.9 * np.sin(5 * np.pi * x)) * v0), GridFunction(grid, v0)


def heis_pair(n):
    grid = Grid.uniform([0, 0, -1], [1, 1, 1], n)
    X = grid.nodes
    v0 = np.sin(np.pi * X[0]) * np.sin(np.pi * X[1]) * np.cos(np.pi * X[2] / 2)
    theta = 0.5 * (1 + 0.8 * np.sin(2 * np.pi * X[0] + 1) * np.cos(np.pi * X[2]))
    return GridFunction(grid, theta * v0), GridFunction(grid, v0)


def main():
    print(f"{'group':<12}{'p':>5}{'cells':>8}{'violation':>12}{'tolerance':>12}{'steps':>8}{'time':>8}")
    for p in (2.0, 3.0):
        for n in (64, 128):
            rep, dt, steps = run(euclidean(1), *euclid_pair(n), p, 0.25)
            print(f"{'euclidean:1':<12}{p:>5g}{n:>8}{rep.max_violation:>12.2e}{rep.tolerance:>12.1e}{steps:>8}{dt:>7.1f}s")
    for n in (8, 12, 16, 24):
        rep, dt, steps = run(heisenberg(1), *heis_pair(n), 2.5, 0.05)
        print(f"{'heisenberg:1':<12}{2.5:>5g}{n:>7}^3{rep.max_violation:>12.2e}{rep.tolerance:>12.1e}{steps:>8}{dt:>7.1f}s")


if __name__ == "__main__":
    main()
