"""Lagrangian states ``X = (y, U, h, r)``, relabelings, the canonical section and the E-norm.

``y`` and ``U`` are nodal and piecewise linear on a uniform xi-grid; ``h`` and
``r_bar`` are constant per cell, and ``r = r_bar + k y_xi``.  With this split
the constraint ``y_xi h = U_xi^2 + r_bar^2`` is a per-cell algebraic identity.
Outside the grid ``U = h = r_bar = 0`` and ``y - id`` is continued by its
boundary values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from chlab.eulerian import Violation, pl_l2_sq
from chlab.grid import Grid

CONSTRAINT_RTOL = 1e-10
F0_RTOL = 1e-10


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LagrangianState:
    grid: Grid
    y: np.ndarray
    U: np.ndarray
    h: np.ndarray
    r_bar: np.ndarray
    k: float = 0.0

    def __post_init__(self):
        for name in ("y", "U", "h", "r_bar"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "k", float(self.k))
        n = self.grid.cells
        if self.y.shape != (n + 1,) or self.U.shape != (n + 1,):
            raise ValueError("y and U must be nodal")
        if self.h.shape != (n,) or self.r_bar.shape != (n,):
            raise ValueError("h and r_bar must be per cell")

    @classmethod
    def identity(cls, grid: Grid, k: float = 0.0) -> "LagrangianState":
        n = grid.cells
        return cls(grid, grid.nodes, np.zeros(n + 1), np.zeros(n), np.zeros(n), k)

    @property
    def y_xi(self) -> np.ndarray:
        return np.diff(self.y) / self.grid.dx

    @property
    def U_xi(self) -> np.ndarray:
        return np.diff(self.U) / self.grid.dx

    @property
    def zeta(self) -> np.ndarray:
        return self.y - self.grid.nodes

    @property
    def H(self) -> np.ndarray:
        """Nodal ``H(xi) = int_{-inf}^xi h``."""
        return np.concatenate([[0.0], np.cumsum(self.h) * self.grid.dx])

    @property
    def r(self) -> np.ndarray:
        return self.r_bar + self.k * self.y_xi

    def constraint_residual(self) -> np.ndarray:
        return self.y_xi * self.h - self.U_xi**2 - self.r_bar**2

    def replace(self, **changes) -> "LagrangianState":
        fields = dict(grid=self.grid, y=self.y, U=self.U, h=self.h, r_bar=self.r_bar, k=self.k)
        fields.update(changes)
        return LagrangianState(**fields)

    # evaluation off the nodes, with the outside-grid continuation
    def y_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        nodes = self.grid.nodes
        inner = np.interp(xi, nodes, self.y)
        return np.where(xi < nodes[0], xi + self.zeta[0], np.where(xi > nodes[-1], xi + self.zeta[-1], inner))

    def U_at(self, xi):
        return np.interp(xi, self.grid.nodes, self.U, left=0.0, right=0.0)

    def H_at(self, xi):
        return np.interp(xi, self.grid.nodes, self.H)

    def R_at(self, xi):
        cum = np.concatenate([[0.0], np.cumsum(self.r_bar) * self.grid.dx])
        return np.interp(xi, self.grid.nodes, cum)

    def to_json(self) -> dict:
        return {
            "grid": self.grid.to_json(),
            "y": [float(v) for v in self.y],
            "U": [float(v) for v in self.U],
            "h": [float(v) for v in self.h],
            "r_bar": [float(v) for v in self.r_bar],
            "k": self.k,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LagrangianState":
        return cls(Grid.from_json(obj["grid"]), obj["y"], obj["U"], obj["h"], obj["r_bar"], float(obj["k"]))


@dataclass(frozen=True)
class RelabelingFunction:
    """Strictly increasing piecewise-linear ``g`` given by nodal values on ``grid``.

    Outside the grid ``g - id`` is continued by its boundary values.
    """

    grid: Grid
    g: np.ndarray

    def __post_init__(self):
        g = _frozen(self.g)
        if g.shape != (self.grid.cells + 1,):
            raise ValueError("g must be nodal")
        if not np.all(np.diff(g) > 0):
            raise ValueError("relabeling function must be strictly increasing")
        object.__setattr__(self, "g", g)

    @classmethod
    def identity(cls, grid: Grid) -> "RelabelingFunction":
        return cls(grid, grid.nodes)

    @classmethod
    def from_callable(cls, grid: Grid, f) -> "RelabelingFunction":
        return cls(grid, f(grid.nodes))

    @property
    def g_xi(self) -> np.ndarray:
        return np.diff(self.g) / self.grid.dx

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        nodes = self.grid.nodes
        inner = np.interp(xi, nodes, self.g)
        return np.where(xi < nodes[0], xi + self.g[0] - nodes[0],
                        np.where(xi > nodes[-1], xi + self.g[-1] - nodes[-1], inner))

    def inverse_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        nodes = self.grid.nodes
        inner = np.interp(xi, self.g, nodes)
        return np.where(xi < self.g[0], xi - self.g[0] + nodes[0],
                        np.where(xi > self.g[-1], xi - self.g[-1] + nodes[-1], inner))

    def inverse(self) -> "RelabelingFunction":
        """Nodal samples of ``g^{-1}`` on the same grid (exact at the nodes)."""
        return RelabelingFunction(self.grid, self.inverse_at(self.grid.nodes))


def kappa_of(g: RelabelingFunction) -> float:
    """``||g - id||_{W^{1,inf}} + ||g^{-1} - id||_{W^{1,inf}}`` from the nodal data.

    For piecewise-linear ``g`` the sup of ``|g - id|`` is attained at nodes and
    equals that of ``|g^{-1} - id|``; the inverse has slope ``1/g_xi`` per cell.
    """
    d = g.g - g.grid.nodes
    # slopes of g - id from differences of d, so g = id gives exactly 0
    dslope = np.diff(d) / g.grid.dx
    inv_dslope = -dslope / g.g_xi
    return 2.0 * float(np.max(np.abs(d))) + float(np.max(np.abs(dslope))) + float(np.max(np.abs(inv_dslope)))


def validate_F(X: LagrangianState, decay_tol: float = 1e-6) -> list[Violation]:
    """Worst cell per violated condition of the set F."""
    out = []

    def worst(kind, bad, magnitude):
        if np.any(bad):
            j = int(np.argmax(np.where(bad, magnitude, -np.inf)))
            out.append(Violation(kind, j, float(magnitude[j])))

    yx, h = X.y_xi, X.h
    fields = (X.y, X.U, X.h, X.r_bar)
    if not all(np.all(np.isfinite(f)) for f in fields):
        out.append(Violation("non-finite", -1, float("nan")))
        return out
    worst("y_xi >= 0", yx < 0, -yx)
    worst("h >= 0", h < 0, -h)
    worst("y_xi + h > 0", ~(yx + h > 0), -(yx + h))
    res = np.abs(X.constraint_residual())
    scale = np.maximum.reduce([np.ones_like(h), np.abs(yx * h), X.U_xi**2, X.r_bar**2])
    worst("y_xi h = U_xi^2 + r_bar^2", res > CONSTRAINT_RTOL * scale, res)
    for idx in (0, X.grid.cells):
        if abs(X.U[idx]) > decay_tol:
            out.append(Violation("U decays", idx, abs(float(X.U[idx]))))
    return out


def in_F0(X: LagrangianState) -> bool:
    """``y + H = id`` at every node."""
    xi = X.grid.nodes
    return bool(np.all(np.abs(X.y + X.H - xi) <= F0_RTOL * (1.0 + np.abs(xi))))


def rounding_floor(y, grid: Grid) -> float:
    """Size of the rounding noise in ``y_xi h`` for nodal ``y`` on ``grid``.

    ``y_xi`` is a difference quotient, so its absolute error is about
    ``eps * max|y| / dxi``; residuals below a small multiple of that are noise.
    """
    scale = max(float(np.max(np.abs(y))), abs(grid.x0), abs(grid.x1), 1.0)
    return 32.0 * np.finfo(float).eps * scale / grid.dx


def repair_constraint(y_xi, h, U_xi, r_bar, rtol: float = 0.5 * CONSTRAINT_RTOL, atol: float = 0.0) -> np.ndarray:
    """Return ``r_bar`` adjusted so that ``y_xi h = U_xi^2 + r_bar^2`` holds exactly.

    Averaging cells of a valid state can only create a surplus
    ``y_xi h - U_xi^2 - r_bar^2 >= 0`` (Cauchy-Schwarz); it is moved into
    ``|r_bar|`` keeping the sign of ``r_bar``.  Cells whose residual is below
    ``max(rtol * scale, atol)`` (the scale used by ``validate_F``) are left
    alone, so rounding noise is not amplified by the square root.
    """
    target = y_xi * h - U_xi**2
    scale = np.maximum.reduce([np.ones_like(target), np.abs(y_xi * h), U_xi**2, r_bar**2])
    off = np.abs(target - r_bar**2) > np.maximum(rtol * scale, atol)
    fixed = np.where(r_bar < 0, -1.0, 1.0) * np.sqrt(np.maximum(target, 0.0))
    return np.where(off, fixed, r_bar)


def compose(X: LagrangianState, g: RelabelingFunction) -> LagrangianState:
    """``X o g = (y o g, U o g, (h o g) g_xi, (r o g) g_xi)`` on the same grid.

    ``y`` and ``U`` are evaluated at ``g(xi_i)``; ``h`` and ``r_bar`` are remapped
    conservatively through the cumulative integrals, so ``int h`` is preserved.
    """
    if not g.grid.same_as(X.grid):
        raise ValueError("relabeling and state live on different grids")
    if not np.all(np.diff(g.g) > 0):
        raise ValueError("relabeling function must be strictly increasing")
    gi = g.g
    dxi = X.grid.dx
    y = X.y_at(gi)
    U = X.U_at(gi)
    h = np.diff(X.H_at(gi)) / dxi
    # r_bar itself transforms like h; its k-part k*y_xi transforms with y automatically
    r_bar = np.diff(X.R_at(gi)) / dxi
    h = np.maximum(h, 0.0)
    r_bar = repair_constraint(np.diff(y) / dxi, h, np.diff(U) / dxi, r_bar, atol=rounding_floor(y, X.grid))
    return X.replace(y=y, U=U, h=h, r_bar=r_bar)


def gamma(X: LagrangianState) -> LagrangianState:
    """Canonical representative ``X o (y + H)^{-1}`` of the relabeling class of ``X``."""
    g = RelabelingFunction(X.grid, X.y + X.H)
    ginv = g.inverse_at(X.grid.nodes)
    dxi = X.grid.dx
    y = X.y_at(ginv)
    U = X.U_at(ginv)
    # y + H = id at the nodes; take h from that identity so F0 holds to rounding
    h = np.maximum(1.0 - np.diff(y) / dxi, 0.0)
    r_bar = np.diff(X.R_at(ginv)) / dxi
    r_bar = repair_constraint(np.diff(y) / dxi, h, np.diff(U) / dxi, r_bar, atol=rounding_floor(y, X.grid))
    return X.replace(y=y, U=U, h=h, r_bar=r_bar)


def e_norm_distance(X1: LagrangianState, X2: LagrangianState) -> float:
    """``||zeta||_inf + ||zeta_xi||_2 + ||U||_{H1} + ||h||_2 + ||r_bar||_2 + |k|`` of the difference."""
    if not X1.grid.same_as(X2.grid):
        raise ValueError("E-norm distance needs states on the same grid")
    dxi = X1.grid.dx
    dz = X1.zeta - X2.zeta
    dU = X1.U - X2.U
    zeta_part = float(np.max(np.abs(dz))) + float(np.sqrt(np.sum(np.diff(dz) ** 2) / dxi))
    U_part = float(np.sqrt(pl_l2_sq(dxi, dU[:-1], dU[1:]) + np.sum(np.diff(dU) ** 2) / dxi))
    h_part = float(np.sqrt(np.sum((X1.h - X2.h) ** 2) * dxi))
    r_part = float(np.sqrt(np.sum((X1.r_bar - X2.r_bar) ** 2) * dxi))
    return zeta_part + U_part + h_part + r_part + abs(X1.k - X2.k)


def energy_sigma(X: LagrangianState) -> float:
    """``int (U^2 y_xi + h) dxi``, integrated exactly cell by cell."""
    U0, U1 = X.U[:-1], X.U[1:]
    u2 = (U0 * U0 + U0 * U1 + U1 * U1) / 3.0
    return float(np.sum(np.diff(X.y) * u2) + np.sum(X.h) * X.grid.dx)
