"""Distances between Eulerian states in the sense of convergence in D, and the E-norm.

Weak convergence of ``u_x`` and ``rho_bar`` is measured by pairing against a
fixed finite family of bumps ``psi(x) = phi((x - c) / w)``.  Both fields are
piecewise constant, so every pairing is a finite sum of exact bump integrals.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from chlab import mollifier
from chlab.eulerian import EulerianState, u_distance
from chlab.lagrangian import LagrangianState, e_norm_distance

# int phi^2 over (-1, 1), from 200-point Gauss-Legendre (the integrand is smooth and flat at +-1)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(200)
PHI_SQUARED_INTEGRAL = float(np.sum(_GL_W * np.asarray(mollifier.phi(_GL_X)) ** 2))

# relative distance below which a probe counts as sitting on an atom
ATOM_PROBE_RTOL = 1e-12


@dataclass(frozen=True)
class TestFamily:
    """Bumps ``phi((x - c) / w)`` for every centre ``c`` and width ``w``.

    ``default_for`` places 4 centres at 1/5 .. 4/5 of the interval and uses
    widths of 1/4, 1/8, 1/16 and 1/32 of its length.
    """

    __test__ = False  # not a pytest class

    centers: tuple[float, ...]
    widths: tuple[float, ...]

    @classmethod
    def default_for(cls, a: float, b: float) -> "TestFamily":
        L = b - a
        return cls(tuple(a + L * f for f in (0.2, 0.4, 0.6, 0.8)), tuple(L / d for d in (4, 8, 16, 32)))

    def pairings(self, nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
        """``int f psi / ||psi||_2`` for the piecewise-constant ``f`` (``values`` per cell of ``nodes``)."""
        out = []
        for c in self.centers:
            for w in self.widths:
                t = (nodes - c) / w
                cell_int = w * mollifier.interval_integrals(t[:-1], t[1:])
                out.append(float(np.dot(values, cell_int)) / np.sqrt(w * PHI_SQUARED_INTEGRAL))
        return np.array(out)

    def to_json(self) -> dict:
        return {"centers": list(self.centers), "widths": list(self.widths)}


@dataclass
class ConvergenceReport:
    u_l2_err: float
    u_linf_err: float
    weak_ux_err: float
    weak_rhobar_err: float
    k_err: float
    grad_ratio_err: float
    rho_ratio_err: float
    F_pointwise_errs: list[tuple[float, float]] = field(default_factory=list)
    F_total_err: float = 0.0

    def fields(self) -> dict[str, float]:
        """Scalar summary: every field, with the pointwise F errors reduced to their max."""
        out = {k: v for k, v in asdict(self).items() if k != "F_pointwise_errs"}
        out["F_pointwise_max"] = max((e for _, e in self.F_pointwise_errs), default=0.0)
        return out

    def to_json(self) -> dict:
        d = asdict(self)
        d["F_pointwise_errs"] = [[float(x), float(e)] for x, e in self.F_pointwise_errs]
        return d


def _on_union(s: EulerianState, x: np.ndarray, cell_values: np.ndarray) -> np.ndarray:
    # per-cell values of s resampled onto the union cells (zero outside s.grid)
    mid = 0.5 * (x[:-1] + x[1:])
    j = np.floor((mid - s.grid.x0) / s.grid.dx).astype(np.int64)
    inside = (j >= 0) & (j < s.grid.cells)
    return np.where(inside, cell_values[np.clip(j, 0, s.grid.cells - 1)], 0.0)


def _ratio_integrals(s: EulerianState) -> tuple[float, float]:
    ux2, r2 = s.u_x**2, s.rho_bar**2
    denom = 1.0 + ux2 + r2
    return float(np.sum(ux2 / denom) * s.grid.dx), float(np.sum(r2 / denom) * s.grid.dx)


def _at_atom(x: float, *measures) -> bool:
    for mu in measures:
        if mu.atom_x.size and np.min(np.abs(mu.atom_x - x)) <= ATOM_PROBE_RTOL * max(1.0, abs(x)):
            return True
    return False


def auto_probes(s1: EulerianState, s2: EulerianState) -> list[float]:
    """Grid quartiles of ``s1`` and midpoints between consecutive atoms of ``s1``, minus points on atoms.

    Only the reference's atoms are used: a projected candidate may carry many
    tiny grid-scale atoms that would swamp the probe list.
    """
    g = s1.grid
    cands = [g.x0 + f * (g.x1 - g.x0) for f in (0.25, 0.5, 0.75)]
    atoms = np.asarray(s1.mu.atom_x)
    cands += list(0.5 * (atoms[:-1] + atoms[1:]))
    return sorted(float(x) for x in set(cands) if not _at_atom(x, s1.mu, s2.mu))


def compare_eulerian(s1: EulerianState, s2: EulerianState, probes=None,
                     family: TestFamily | None = None) -> ConvergenceReport:
    """Convergence-in-D defects of ``s2`` relative to ``s1``.

    The states may live on different grids; comparisons are made on the union
    of the nodes.  ``probes`` must be continuity points of both cumulative
    functions; ``None`` selects ``auto_probes``.
    """
    probes = auto_probes(s1, s2) if probes is None else [float(p) for p in probes]
    for p in probes:
        if _at_atom(p, s1.mu, s2.mu):
            raise ValueError(f"probe x={p} sits on an atom; F is not continuous there")
    family = TestFamily.default_for(s1.grid.x0, s1.grid.x1) if family is None else family

    l2, linf, _ = u_distance(s1, s2)
    x = np.union1d(s1.grid.nodes, s2.grid.nodes)
    # u_x: recompute on the union grid from the interpolants, so it is exact for both
    dux = np.diff(s1.u_at(x) - s2.u_at(x)) / np.diff(x)
    drho = _on_union(s1, x, s1.rho_bar) - _on_union(s2, x, s2.rho_bar)
    g1, r1 = _ratio_integrals(s1)
    g2, r2 = _ratio_integrals(s2)
    F1 = np.atleast_1d(s1.mu.eval_F(np.array(probes)))
    F2 = np.atleast_1d(s2.mu.eval_F(np.array(probes)))
    return ConvergenceReport(
        u_l2_err=l2,
        u_linf_err=linf,
        weak_ux_err=float(np.max(np.abs(family.pairings(x, dux)))),
        weak_rhobar_err=float(np.max(np.abs(family.pairings(x, drho)))),
        k_err=abs(s1.k - s2.k),
        grad_ratio_err=abs(g1 - g2),
        rho_ratio_err=abs(r1 - r2),
        F_pointwise_errs=[(p, float(abs(a - b))) for p, a, b in zip(probes, F1, F2)],
        F_total_err=abs(s1.mu.total_mass - s2.mu.total_mass),
    )


def compare_lagrangian(X1: LagrangianState, X2: LagrangianState) -> float:
    """E-norm distance; the two states must share a grid."""
    return e_norm_distance(X1, X2)
