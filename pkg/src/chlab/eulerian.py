"""Eulerian states ``(u, rho = k + rho_bar, mu)`` and their Friedrichs mollification."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from chlab import mollifier
from chlab.grid import Grid
from chlab.measure import CumulativeMeasure


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int
    magnitude: float

    def __str__(self):
        return f"{self.kind} at {self.index}: {self.magnitude:.3e}"


@dataclass(frozen=True)
class Tolerances:
    compat_atol: float = 1e-10
    compat_rtol: float = 1e-9
    decay: float = 1e-6


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EulerianState:
    """Nodal ``u`` (piecewise linear), per-cell ``rho_bar``, constant ``k``, energy measure ``mu``.

    ``mu`` lives on the same grid; its density is compared cell by cell with
    ``u_x**2 + rho_bar**2``.
    """

    grid: Grid
    u: np.ndarray
    rho_bar: np.ndarray
    k: float
    mu: CumulativeMeasure

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "rho_bar", _frozen(self.rho_bar))
        object.__setattr__(self, "k", float(self.k))
        if self.u.shape != (self.grid.cells + 1,):
            raise ValueError("u must have one value per grid node")
        if self.rho_bar.shape != (self.grid.cells,):
            raise ValueError("rho_bar must have one value per grid cell")
        if not self.mu.grid.same_as(self.grid):
            raise ValueError("mu must be defined on the state's grid")

    @classmethod
    def from_u(cls, grid: Grid, u, rho_bar=None, k: float = 0.0, atoms=()) -> "EulerianState":
        """State whose ac energy is exactly ``u_x**2 + rho_bar**2``, plus optional atoms ``[(x, m), ...]``."""
        u = np.asarray(u, dtype=float)
        rho_bar = np.zeros(grid.cells) if rho_bar is None else np.asarray(rho_bar, dtype=float)
        ux = np.diff(u) / grid.dx
        atoms = np.asarray(atoms, dtype=float).reshape(-1, 2)
        mu = CumulativeMeasure(grid, ux**2 + rho_bar**2, atoms[:, 0], atoms[:, 1])
        return cls(grid, u, rho_bar, k, mu)

    @classmethod
    def zero(cls, grid: Grid) -> "EulerianState":
        return cls.from_u(grid, np.zeros(grid.cells + 1))

    @property
    def u_x(self) -> np.ndarray:
        return np.diff(self.u) / self.grid.dx

    def u_at(self, x):
        """Piecewise-linear ``u``, extended by zero outside the grid."""
        return np.interp(x, self.grid.nodes, self.u, left=0.0, right=0.0)

    def to_json(self) -> dict:
        return {
            "grid": self.grid.to_json(),
            "u": [float(v) for v in self.u],
            "rho_bar": [float(v) for v in self.rho_bar],
            "k": self.k,
            "mu": self.mu.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EulerianState":
        grid = Grid.from_json(obj["grid"])
        return cls(grid, obj["u"], obj["rho_bar"], float(obj["k"]), CumulativeMeasure.from_json(obj["mu"]))


def validate(s: EulerianState, tol: Tolerances = Tolerances()) -> list[Violation]:
    """Check ``mu_ac = (u_x^2 + rho_bar^2) dx`` per cell and decay of ``u`` at the boundary."""
    out = []
    expected = s.u_x**2 + s.rho_bar**2
    defect = np.abs(s.mu.density - expected)
    bad = defect > tol.compat_atol + tol.compat_rtol * expected
    if np.any(bad):
        j = int(np.argmax(np.where(bad, defect, -1.0)))
        out.append(Violation("compatibility", j, float(defect[j])))
    for idx in (0, s.grid.cells):
        if abs(s.u[idx]) > tol.decay:
            out.append(Violation("decay", idx, abs(float(s.u[idx]))))
    if not np.all(np.isfinite(s.u)) or not np.all(np.isfinite(s.rho_bar)):
        out.append(Violation("non-finite", -1, float("nan")))
    return out


# --- exact norms of the piecewise representations -------------------------

def pl_l2_sq(dx, a, b):
    """``int`` of the square of the linear interpolant between ``a`` and ``b`` over cells of width ``dx``."""
    return np.sum(dx * (a * a + a * b + b * b) / 3.0)


def union_nodes(*grids: Grid) -> np.ndarray:
    return np.unique(np.concatenate([g.nodes for g in grids]))


def u_distance(s1: EulerianState, s2: EulerianState) -> tuple[float, float, float]:
    """``(L2, Linf, H1-seminorm)`` distance of the two piecewise-linear velocities, computed exactly."""
    x = union_nodes(s1.grid, s2.grid)
    d = s1.u_at(x) - s2.u_at(x)
    dx = np.diff(x)
    l2 = float(np.sqrt(pl_l2_sq(dx, d[:-1], d[1:])))
    linf = float(np.max(np.abs(d)))
    slope = np.diff(d) / dx
    semi = float(np.sqrt(np.sum(slope**2 * dx)))
    return l2, linf, semi


def h1_norm(s: EulerianState) -> float:
    u = s.u
    return float(np.sqrt(pl_l2_sq(s.grid.dx, u[:-1], u[1:]) + np.sum(s.u_x**2) * s.grid.dx))


def h1_distance(s1: EulerianState, s2: EulerianState) -> float:
    l2, _, semi = u_distance(s1, s2)
    return float(np.sqrt(l2**2 + semi**2))


# --- mollification ----------------------------------------------------------

@dataclass(frozen=True)
class MollifiedParts:
    """Intermediate quantities of ``mollify`` on the output grid.

    ``mu_hat`` is the cell average of ``int n phi(n(x-y)) dmu(y)`` and
    ``rho_hat`` the cell value of ``rho_n``; ``variance = mu_hat - u_{n,x}^2``
    must be nonnegative.
    """

    grid: Grid
    u_n: np.ndarray
    mu_hat: np.ndarray
    variance: np.ndarray
    rho_hat: np.ndarray
    mu_hat_measure: CumulativeMeasure = field(repr=False)


def _local_pairs(nodes: np.ndarray, centers: np.ndarray, radius: float):
    # all (node index, center index) pairs with |node - center| < radius
    lo = np.searchsorted(nodes, centers - radius, side="right")
    hi = np.searchsorted(nodes, centers + radius, side="left")
    counts = np.maximum(hi - lo, 0)
    which = np.repeat(np.arange(centers.size), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(lo, counts) + offsets, which


def _add_local(out, nodes, centers, weights, n, kernel):
    idx, which = _local_pairs(nodes, centers, 1.0 / n)
    if idx.size:
        np.add.at(out, idx, weights[which] * kernel(nodes[idx] - centers[which], n))


def _step_correction(s, n):
    return mollifier.smoothed_step(s, n) - (np.asarray(s) >= 0)


def mollify_parts(s: EulerianState, n: int, max_dx: float | None = None, tol: float = 1e-12) -> MollifiedParts:
    if n < 1:
        raise ValueError(f"mollification scale must be a positive integer, got {n}")
    if s.k != 0.0 or np.any(s.rho_bar != 0.0):
        raise ValueError("mollify is defined for data with rho = 0")
    problems = validate(s)
    if problems:
        raise ValueError("invalid Eulerian input: " + "; ".join(map(str, problems)))
    g = s.grid
    target = min(g.dx, 1.0 / (8 * n)) if max_dx is None else min(max_dx, 1.0 / (8 * n))
    out_grid = Grid.with_spacing(g.x0 - 1.0 / n, g.x1 + 1.0 / n, target)
    x = out_grid.nodes

    # u is continued by its boundary values (a jump to zero would carry
    # slope energy that mu does not have); then it is a sum of ramps
    slopes = np.concatenate([[0.0], s.u_x, [0.0]])
    kinks = g.nodes
    u_n = np.interp(x, g.nodes, s.u)
    _add_local(u_n, x, kinks, np.diff(slopes), n, mollifier.ramp_correction)

    # F = atom steps + ramps of the density jumps
    F_hat = s.mu.eval_F(x)
    dens = np.concatenate([[0.0], s.mu.density, [0.0]])
    _add_local(F_hat, x, kinks, np.diff(dens), n, mollifier.ramp_correction)
    _add_local(F_hat, x, s.mu.atom_x, s.mu.atom_m, n, _step_correction)

    dxo = out_grid.dx
    mu_hat = np.diff(F_hat) / dxo
    slope_n = np.diff(u_n) / dxo
    variance = mu_hat - slope_n**2
    worst = float(variance.min(initial=0.0))
    if worst < -tol * (1.0 + float(mu_hat.max(initial=0.0))):
        raise ArithmeticError(f"mollified energy below squared slope by {-worst:.3e}")
    variance = np.maximum(variance, 0.0)
    rho_hat = np.sqrt(1.0 / n**2 + variance)
    mu_hat_measure = CumulativeMeasure(out_grid, np.maximum(mu_hat, 0.0))
    return MollifiedParts(out_grid, u_n, mu_hat, variance, rho_hat, mu_hat_measure)


def mollify(s: EulerianState, n: int, max_dx: float | None = None) -> EulerianState:
    """Smooth ``(u, 0, mu)`` into ``(u_n, 1/n + rho_bar_n, mu_n)`` with ``mu_n`` absolutely continuous.

    ``u_n = phi_n * u`` and ``rho_n^2 = 1/n^2 + phi_n * mu - (u_{n,x})^2``, per output
    cell; the output grid is widened by ``1/n`` on both sides and has spacing
    at most ``min(dx, 1/(8n))`` (or ``max_dx`` if smaller).  Outside its grid
    ``u`` is continued by its boundary values.
    """
    parts = mollify_parts(s, n, max_dx)
    # rho_bar = rho_n - 1/n without cancellation
    rho_bar = parts.variance / (parts.rho_hat + 1.0 / n)
    return EulerianState.from_u(parts.grid, parts.u_n, rho_bar, k=1.0 / n)
