"""The lift ``L : D -> F0`` and the projection ``M : F0 -> D``.

``lift`` inverts ``x -> x + F(x)`` to get characteristics; ``project`` pushes
``h dxi`` and ``r_bar dxi`` forward along ``y``.  On a uniform x-grid the
push-forward of ``h`` carries slightly more mass per cell than ``u_x^2 +
rho_bar^2`` (Jensen); that surplus is singular at grid resolution and is
stored as atoms, so the compatibility condition holds exactly cell by cell.
"""
from __future__ import annotations

import numpy as np

from chlab.eulerian import EulerianState, validate
from chlab.grid import Grid
from chlab.lagrangian import LagrangianState, gamma, in_F0, repair_constraint, rounding_floor
from chlab.measure import CumulativeMeasure, plateau_atoms, pushforward_cumulative

PLATEAU_TOL = 1e-12
# surplus below this (relative to the total energy) is rounding, not an atom
SURPLUS_FLOOR = 1e-14


def default_xi_grid(s: EulerianState, min_refine: int = 4, max_refine: int = 64) -> Grid:
    """Uniform xi-grid on ``[x0, x_M + F(inf)]`` with ``min_refine`` cells per x-cell and per atom plateau.

    Atoms lighter than ``dx / max_refine`` do not refine the grid further.
    """
    g = s.grid
    widths = [g.dx]
    heavy = s.mu.atom_m[s.mu.atom_m >= min_refine * g.dx / max_refine]
    if heavy.size:
        widths.append(float(heavy.min()))
    dxi = min(widths) / min_refine
    return Grid.with_spacing(g.x0, g.x1 + s.mu.total_mass, dxi)


def lift(s: EulerianState, grid: Grid | None = None, cells: int | None = None, check: bool = True) -> LagrangianState:
    """``y = sup{y : mu((-inf, y)) + y < xi}``, ``h = 1 - y_xi``, ``U = u o y``, ``r = rho(y) y_xi``.

    ``grid`` fixes the xi-grid; ``cells`` only fixes its resolution on the
    default interval.
    """
    if check:
        problems = validate(s)
        if problems:
            raise ValueError("invalid Eulerian state: " + "; ".join(map(str, problems)))
    if grid is None:
        grid = default_xi_grid(s)
        if cells is not None:
            grid = Grid.spanning(grid.x0, grid.x1, cells)
    xi = grid.nodes
    y = s.mu.sup_inverse(xi)
    # rounding may push y_N a hair past the last node; u is continued by its boundary value
    U = s.u_at(np.clip(y, s.grid.x0, s.grid.x1))
    y_xi = np.diff(y) / grid.dx
    h = np.clip(1.0 - y_xi, 0.0, None)
    rho_cum = np.concatenate([[0.0], np.cumsum(s.rho_bar) * s.grid.dx])
    R = np.interp(y, s.grid.nodes, rho_cum)
    r_bar = np.diff(R) / grid.dx
    r_bar = repair_constraint(y_xi, h, np.diff(U) / grid.dx, r_bar, atol=rounding_floor(y, grid))
    return LagrangianState(grid, y, U, h, r_bar, s.k)


def _first_moment_cumulative(X: LagrangianState, x_nodes, live):
    # int_{y(xi) <= x} y(xi) h(xi) dxi over non-plateau cells, exact for linear y
    y, h, dxi = X.y, np.where(live, X.h, 0.0), X.grid.dx
    K = np.concatenate([[0.0], np.cumsum(h * dxi * 0.5 * (y[:-1] + y[1:]))])
    y_mono = np.maximum.accumulate(y)
    j = np.clip(np.searchsorted(y_mono, x_nodes, side="right") - 1, 0, X.grid.cells - 1)
    width = y_mono[j + 1] - y_mono[j]
    frac = np.where(width > 0, np.clip((x_nodes - y_mono[j]) / np.where(width > 0, width, 1.0), 0, 1), 0.0)
    # within cell j the preimage covers a fraction frac of the cell
    partial = h[j] * dxi * frac * (y_mono[j] + 0.5 * frac * width)
    out = K[j] + partial
    out = np.where(x_nodes < y_mono[0], 0.0, out)
    return np.where(x_nodes >= y_mono[-1], K[-1], out)


def project(X: LagrangianState, require_F0: bool = True, grid: Grid | None = None,
            plateau_tol: float = PLATEAU_TOL, u_tol: float = 1e-8) -> EulerianState:
    """``u(y(xi)) = U(xi)``, ``mu = y_#(h dxi)``, ``rho_bar dx = y_#(r_bar dxi)``, ``rho = k + rho_bar``.

    The default x-grid has ``X.grid.cells`` cells on ``[y_0, y_N]``.  With
    ``require_F0=False`` a state outside F0 is first mapped to its canonical
    representative.
    """
    if not in_F0(X):
        if require_F0:
            raise ValueError("state is not in F0 (y + H != id); pass require_F0=False to canonicalize")
        X = gamma(X)
    slope = X.y_xi
    flat = slope <= plateau_tol
    if np.any(flat):
        bad = np.abs(X.U_xi[flat])
        if bad.max() > u_tol:
            j = int(np.flatnonzero(flat)[np.argmax(bad)])
            raise ValueError(f"U varies on the plateau cell {j} (|U_xi| = {bad.max():.3e}): corrupt state")
    if grid is None:
        if not X.y[-1] > X.y[0]:
            raise ValueError("y has no extent; pass an explicit x-grid")
        grid = Grid.spanning(X.y[0], X.y[-1], X.grid.cells)
    x = grid.nodes
    dx = grid.dx

    y_mono = np.maximum.accumulate(X.y)
    xi_star = np.interp(x, y_mono, X.grid.nodes)
    u = np.where((x < y_mono[0]) | (x > y_mono[-1]), 0.0, X.U_at(xi_star))

    R = pushforward_cumulative(X.r_bar, X.grid, X.y, x, plateau_tol)
    rho_bar = np.diff(R) / dx
    rho_bar[0] += R[0] / dx

    live = ~flat
    cum = pushforward_cumulative(X.h, X.grid, X.y, x, plateau_tol)
    total_ac = pushforward_cumulative(X.h, X.grid, X.y, np.inf, plateau_tol)
    mass = np.diff(cum)
    mass[0] += cum[0]
    mass[-1] += total_ac - cum[-1]
    ux = np.diff(u) / dx
    density = ux**2 + rho_bar**2
    surplus = mass - density * dx

    ax, am = plateau_atoms(X.h, X.grid, X.y, plateau_tol)
    floor = SURPLUS_FLOOR * max(1.0, float(total_ac + am.sum()))
    cells = np.flatnonzero(surplus > floor)
    if cells.size:
        M1 = _first_moment_cumulative(X, x, live)
        m1 = M1[cells + 1] - M1[cells]
        centers = 0.5 * (x[cells] + x[cells + 1])
        pos = (m1 - density[cells] * dx * centers) / surplus[cells]
        pos = np.clip(pos, x[cells], x[cells + 1])
        # surplus next to a plateau belongs to that atom
        if ax.size:
            k = np.searchsorted(ax, pos)
            for i, c in enumerate(cells):
                for cand in (k[i] - 1, k[i]):
                    if 0 <= cand < ax.size and x[c] <= ax[cand] <= x[c + 1]:
                        pos[i] = ax[cand]
                        break
        ax = np.concatenate([ax, pos])
        am = np.concatenate([am, surplus[cells]])
    # atoms pushed outside the target grid are kept where they are; F counts them
    mu = CumulativeMeasure(grid, density, ax, am)
    return EulerianState(grid, u, rho_bar, X.k, mu)

