"""Closed-form reference states and the mollifier limit at an atom.

The symmetric peakon-antipeakon pair with total energy ``E`` that collides at
time ``T`` is

    u(t, x) = p (exp(-|x + q|) - exp(-|x - q|)),
    exp(q) = cosh(sqrt(E) (T - t) / 2),   p = sqrt(E) / 2 * coth(sqrt(E) (T - t) / 2),

and at ``t = T`` all of its energy sits in an atom of mass ``E`` at the origin
while ``u = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from chlab.eulerian import EulerianState, mollify, mollify_parts
from chlab.grid import Grid
from chlab.measure import CumulativeMeasure
from chlab.mollifier import Phi_inverse


def peakon_antipeakon_breaking(alpha: float, grid: Grid) -> EulerianState:
    """``u = 0``, ``rho = 0``, ``mu = alpha delta_0``: the pair at the moment of collision."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return EulerianState(grid, np.zeros(grid.cells + 1), np.zeros(grid.cells), 0.0,
                         CumulativeMeasure.atom(grid, 0.0, alpha))


def single_peakon(c: float, grid: Grid) -> EulerianState:
    """``u = c exp(-|x|)`` sampled at the nodes, with ``mu = u_x^2 dx``."""
    return EulerianState.from_u(grid, c * np.exp(-np.abs(grid.nodes)))


def peakon_antipeakon(energy: float, collision_time: float, t: float, grid: Grid) -> EulerianState:
    """The symmetric pair at time ``t < collision_time``, sampled at the nodes."""
    if not energy > 0:
        raise ValueError("energy must be positive")
    if not t < collision_time:
        raise ValueError("t must precede the collision; use peakon_antipeakon_breaking at t = T")
    q, p = pair_position_amplitude(energy, collision_time, t)
    x = grid.nodes
    return EulerianState.from_u(grid, p * (np.exp(-np.abs(x + q)) - np.exp(-np.abs(x - q))))


def pair_position_amplitude(energy: float, collision_time: float, t: float) -> tuple[float, float]:
    s = 0.5 * np.sqrt(energy) * (collision_time - t)
    return float(np.log(np.cosh(s))), float(0.5 * np.sqrt(energy) / np.tanh(s))


def atom_characteristic(alpha: float, xi):
    """Characteristic of ``alpha delta_0``: ``xi`` left of 0, 0 on ``[0, alpha]``, ``xi - alpha`` after."""
    xi = np.asarray(xi, dtype=float)
    return np.where(xi < 0, xi, np.where(xi > alpha, xi - alpha, 0.0))


@dataclass(frozen=True)
class LimitRow:
    n: int
    gap: float      # n (y_n(xi) - y(xi)) with y_n from lift o mollify
    gap_hat: float  # the same with y_n from the unsplit mollified energy
    target: float


def mollifier_limit_rows(alpha: float, xi: float, n_list, grid: Grid | None = None,
                         max_dx: float | None = None) -> list[LimitRow]:
    """Scaled gaps ``n (y_n(xi) - y(xi))`` for the mollified atom state, both variants.

    ``y_n(xi)`` is the generalized inverse of ``x + F_n(x)`` evaluated exactly at
    ``xi``; this is the characteristic that ``lift`` samples at its nodes.
    """
    if not 0.0 < xi < alpha:
        raise ValueError(f"xi must lie strictly inside (0, alpha), got xi={xi}, alpha={alpha}")
    grid = Grid.spanning(-2.0, 2.0, 400) if grid is None else grid
    s = peakon_antipeakon_breaking(alpha, grid)
    y = float(atom_characteristic(alpha, xi))
    target = Phi_inverse(xi / alpha)
    rows = []
    for n in n_list:
        n = int(n)
        state = mollify(s, n, max_dx)
        parts = mollify_parts(s, n, max_dx)
        rows.append(LimitRow(
            n,
            n * (float(state.mu.sup_inverse(xi)) - y),
            n * (float(parts.mu_hat_measure.sup_inverse(xi)) - y),
            target,
        ))
    return rows


def mollifier_limit_check(alpha: float, xi: float, n_list, grid: Grid | None = None,
                          max_dx: float | None = None) -> list[tuple[int, float]]:
    """``[(n, n (y_n(xi) - y(xi)))]`` with ``y_n`` the characteristic of ``lift(mollify(s, n))``.

    The sequence tends to ``Phi_inverse(xi / alpha)``.
    """
    return [(r.n, r.gap) for r in mollifier_limit_rows(alpha, xi, n_list, grid, max_dx)]
