"""``L(M(X))`` against ``Gamma(X)`` as the projection grid is refined.

The projection samples ``u`` on a uniform x-grid, while the lifted velocity is
piecewise linear on the nodes ``y(xi_i)``; the E-distance therefore falls only
like the x-grid spacing.
"""
import argparse

import numpy as np

from chlab.grid import Grid
from chlab.lagrangian import RelabelingFunction, compose, e_norm_distance, gamma
from chlab.reference import single_peakon
from chlab.transforms import lift, project


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--shift", type=float, default=0.3, help="amplitude of the relabeling bump")
    ap.add_argument("--x-cells", type=int, nargs="+", default=[512, 2048, 8192, 32768])
    args = ap.parse_args()

    X = lift(single_peakon(1.0, Grid.spanning(-15, 15, 600)))
    g = RelabelingFunction.from_callable(X.grid, lambda xi: xi + args.shift * np.tanh(xi) * np.exp(-0.1 * xi**2))
    Y = compose(X, g)
    G = gamma(Y)
    for m in args.x_cells:
        grid = Grid.spanning(G.y[0], G.y[-1], m)
        back = lift(project(G, grid=grid), grid=Y.grid)
        print(f"x-cells {m:6d}  E-distance {e_norm_distance(back, G):.3e}")


if __name__ == "__main__":
    main()
