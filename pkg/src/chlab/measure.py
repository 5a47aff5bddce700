"""Finite positive measures on the line: atoms plus a piecewise-constant density.

The cumulative function ``F(x) = mu((-inf, x])`` is the central object.  Its
generalized inverse in the form ``y(xi) = sup{y : mu((-inf, y)) + y < xi}``
is what turns an energy measure into Lagrangian characteristics.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from chlab.grid import Grid

# atoms closer than this fraction of the cell width are merged
ATOM_MERGE_FRACTION = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def merge_atoms(positions, masses, min_sep: float):
    """Sort atoms, merge those closer than ``min_sep`` and drop non-positive masses."""
    positions = np.asarray(positions, dtype=float).reshape(-1)
    masses = np.asarray(masses, dtype=float).reshape(-1)
    if positions.size == 0:
        return np.empty(0), np.empty(0)
    order = np.argsort(positions, kind="stable")
    positions, masses = positions[order], masses[order]
    out_x, out_m = [positions[0]], [masses[0]]
    for x, m in zip(positions[1:], masses[1:]):
        if x - out_x[-1] <= min_sep:
            out_m[-1] += m
        else:
            out_x.append(x)
            out_m.append(m)
    out_x, out_m = np.array(out_x), np.array(out_m)
    keep = out_m > 0
    return out_x[keep], out_m[keep]


@dataclass(frozen=True)
class CumulativeMeasure:
    """Atoms ``(atom_x, atom_m)`` plus density ``density[j]`` on cell ``j`` of ``grid``.

    The density is zero outside the grid.  Instances are immutable.
    """

    grid: Grid
    density: np.ndarray
    atom_x: np.ndarray = field(default_factory=lambda: np.empty(0))
    atom_m: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        density = _frozen(self.density)
        if density.shape != (self.grid.cells,):
            raise ValueError(f"density has shape {density.shape}, grid has {self.grid.cells} cells")
        if np.any(density < 0) or not np.all(np.isfinite(density)):
            raise ValueError("density must be finite and nonnegative")
        ax, am = merge_atoms(self.atom_x, self.atom_m, ATOM_MERGE_FRACTION * self.grid.dx)
        if np.any(~np.isfinite(ax)) or np.any(~np.isfinite(am)):
            raise ValueError("atoms must be finite")
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "atom_x", _frozen(ax))
        object.__setattr__(self, "atom_m", _frozen(am))
        cum = np.concatenate([[0.0], np.cumsum(density * self.grid.dx)])
        object.__setattr__(self, "_ac_nodes", _frozen(cum))
        object.__setattr__(self, "_atom_cum", _frozen(np.concatenate([[0.0], np.cumsum(am)])))

    @classmethod
    def zero(cls, grid: Grid) -> "CumulativeMeasure":
        return cls(grid, np.zeros(grid.cells))

    @classmethod
    def atom(cls, grid: Grid, x: float, mass: float) -> "CumulativeMeasure":
        return cls(grid, np.zeros(grid.cells), [x], [mass])

    @property
    def atom_mass(self) -> float:
        return float(self._atom_cum[-1])

    @property
    def ac_mass(self) -> float:
        return float(self._ac_nodes[-1])

    @property
    def total_mass(self) -> float:
        return self.atom_mass + self.ac_mass

    def ac_cumulative(self, x) -> np.ndarray:
        """``mu_ac((-inf, x])``; exact for the piecewise-constant density."""
        x = np.asarray(x, dtype=float)
        g = self.grid
        s = np.clip((x - g.x0) / g.dx, 0.0, g.cells)
        j = np.minimum(np.floor(s).astype(np.int64), g.cells - 1)
        frac = s - j
        return self._ac_nodes[j] + frac * (self._ac_nodes[j + 1] - self._ac_nodes[j])

    def eval_F(self, x):
        """``F(x) = mu((-inf, x])``, right-continuous."""
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.atom_x, x, side="right")
        out = self._atom_cum[k] + self.ac_cumulative(x)
        return out if out.ndim else float(out)

    def eval_F_left(self, x):
        """``F(x-) = mu((-inf, x))``."""
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.atom_x, x, side="left")
        out = self._atom_cum[k] + self.ac_cumulative(x)
        return out if out.ndim else float(out)

    def cell_masses(self, grid: Grid | None = None) -> np.ndarray:
        """Mass in each half-open cell ``(x_i, x_{i+1}]`` of ``grid`` (default: own grid)."""
        grid = self.grid if grid is None else grid
        return np.diff(self.eval_F(grid.nodes))

    def _breakpoints(self):
        # union of grid nodes and atoms, with G(p-) and G(p) and the slope of G after p
        p = np.union1d(self.grid.nodes, self.atom_x)
        g_right = p + self.eval_F(p)
        g_left = p + self.eval_F_left(p)
        mid = 0.5 * (p[:-1] + p[1:])
        cell = np.floor((mid - self.grid.x0) / self.grid.dx).astype(np.int64)
        inside = (cell >= 0) & (cell < self.grid.cells)
        dens = np.where(inside, self.density[np.clip(cell, 0, self.grid.cells - 1)], 0.0)
        slope = np.concatenate([1.0 + dens, [1.0]])
        return p, g_left, g_right, slope

    def sup_inverse(self, xi):
        """``y(xi) = sup{y : F(y-) + y < xi}``.

        ``G(x) = x + F(x)`` is piecewise linear between grid nodes and atoms,
        so the inverse is evaluated exactly segment by segment.  On the plateau
        ``[x + F(x-), x + F(x)]`` of an atom at ``x`` the result is exactly ``x``.
        """
        xi = np.asarray(xi, dtype=float)
        p, g_left, g_right, slope = self._breakpoints()
        k = np.searchsorted(g_left, xi, side="right") - 1
        kc = np.clip(k, 0, p.size - 1)
        on_plateau = (k >= 0) & (xi <= g_right[kc])
        after = p[kc] + (xi - g_right[kc]) / slope[kc]
        before = p[0] + (xi - g_left[0])
        y = np.where(k < 0, before, np.where(on_plateau, p[kc], after))
        # rounding in the segment formula must not cross the next breakpoint
        nxt = p[np.minimum(kc + 1, p.size - 1)]
        y = np.where((k >= 0) & (k < p.size - 1) & ~on_plateau, np.minimum(y, nxt), y)
        return y if y.ndim else float(y)

    def to_json(self) -> dict:
        return {
            "atoms": [[float(x), float(m)] for x, m in zip(self.atom_x, self.atom_m)],
            "grid": self.grid.to_json(),
            "density": [float(d) for d in self.density],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CumulativeMeasure":
        grid = Grid.from_json(obj["grid"])
        atoms = np.asarray(obj.get("atoms", []), dtype=float).reshape(-1, 2)
        return cls(grid, obj["density"], atoms[:, 0], atoms[:, 1])


def pushforward_cumulative(values, xi_grid: Grid, y, x, plateau_tol: float = 1e-12):
    """Cumulative push-forward of the non-plateau part of ``values(xi) dxi`` along ``y``.

    Returns ``int_{xi : y(xi) <= x} values dxi`` restricted to cells with
    ``y_xi > plateau_tol``, evaluated at the points ``x``.
    """
    values = np.asarray(values, dtype=float)
    y = np.asarray(y, dtype=float)
    slope = np.diff(y) / xi_grid.dx
    live = slope > plateau_tol
    cum = np.concatenate([[0.0], np.cumsum(np.where(live, values, 0.0) * xi_grid.dx)])
    # y may be flat on plateau cells; the cumulative is constant there, so the
    # choice of preimage does not matter
    y_mono = np.maximum.accumulate(y)
    return np.interp(x, y_mono, cum, left=0.0, right=cum[-1])


def plateau_atoms(values, xi_grid: Grid, y, plateau_tol: float = 1e-12):
    """Atoms produced by cells on which ``y`` is (numerically) constant."""
    values = np.asarray(values, dtype=float)
    y = np.asarray(y, dtype=float)
    slope = np.diff(y) / xi_grid.dx
    flat = (slope <= plateau_tol) & (values != 0)
    return 0.5 * (y[:-1] + y[1:])[flat], values[flat] * xi_grid.dx


def pushforward(h, xi_grid: Grid, y, grid: Grid | None = None, plateau_tol: float = 1e-12) -> CumulativeMeasure:
    """Push-forward ``y_#(h dxi)`` of a per-cell density ``h`` along nodal ``y``.

    Cells where ``y`` is constant become atoms at the plateau value; the
    remaining mass is spread uniformly over ``[y_j, y_{j+1}]`` and binned
    conservatively onto ``grid`` (default: ``xi_grid.cells`` cells spanning
    ``[y_0, y_N]``, widened when ``y`` is constant).
    """
    h = np.asarray(h, dtype=float)
    y = np.asarray(y, dtype=float)
    if h.shape != (xi_grid.cells,) or y.shape != (xi_grid.cells + 1,):
        raise ValueError("h must be per-cell and y nodal on xi_grid")
    if np.any(h < 0):
        raise ValueError(f"pushforward of negative density (min h = {h.min():.3e})")
    if np.any(np.diff(y) < -plateau_tol * xi_grid.dx):
        raise ValueError("y must be nondecreasing")
    if grid is None:
        lo, hi = y[0], y[-1]
        if hi - lo <= plateau_tol * (xi_grid.x1 - xi_grid.x0):
            # everything collapses to a point; any window around it will do
            half = 0.5 * (xi_grid.x1 - xi_grid.x0)
            lo, hi = lo - half, hi + half
        grid = Grid.spanning(lo, hi, xi_grid.cells)
    ax, am = plateau_atoms(h, xi_grid, y, plateau_tol)
    cum = pushforward_cumulative(h, xi_grid, y, grid.nodes, plateau_tol)
    density = np.maximum(np.diff(cum), 0.0) / grid.dx
    # ac mass outside the target grid is folded into the edge cells
    density[0] += cum[0] / grid.dx
    total = pushforward_cumulative(h, xi_grid, y, np.inf, plateau_tol)
    density[-1] += (total - cum[-1]) / grid.dx
    return CumulativeMeasure(grid, density, ax, am)
