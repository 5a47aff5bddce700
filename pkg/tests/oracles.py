"""Slow, independent reference implementations used only by the tests."""
from __future__ import annotations

import mpmath
import numpy as np

from chlab.dynamics import source
from chlab.lagrangian import LagrangianState

_GX, _GW = np.polynomial.legendre.leggauss(6)


def _gauss(a, b):
    # nodes and weights of the 6-point rule on each [a_i, b_i]
    a, b = np.asarray(a, float), np.asarray(b, float)
    half = 0.5 * (b - a)
    return 0.5 * (a + b)[..., None] + half[..., None] * _GX, half[..., None] * _GW


def brute_force_PQ(X: LagrangianState, chunk: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """O(N^2) quadrature of the P and Q integrals for the piecewise state.

    ``y`` is linear and ``w`` constant on each cell.  ``Q`` is evaluated at the
    nodes; ``P`` is averaged over each cell with a Gauss rule in ``xi``, and
    the cell containing ``xi`` is split at ``xi`` so every integrand is smooth.
    """
    grid = X.grid
    nodes, y, w = grid.nodes, X.y, source(X)
    n = grid.cells
    eta, eta_w = _gauss(nodes[:-1], nodes[1:])          # (n, 6)
    y_eta = np.interp(eta, nodes, y)
    flat_eta, flat_wt = eta.ravel(), (eta_w * w[:, None]).ravel()
    flat_y = y_eta.ravel()
    owner = np.repeat(np.arange(n), _GX.size)

    Q = np.empty(n + 1)
    for i0 in range(0, n + 1, chunk):
        xi = nodes[i0:i0 + chunk]
        yx = y[i0:i0 + chunk]
        kern = np.exp(-np.abs(yx[:, None] - flat_y[None, :])) * np.sign(xi[:, None] - flat_eta[None, :])
        Q[i0:i0 + chunk] = -0.25 * kern @ flat_wt

    xq, xw = _gauss(nodes[:-1], nodes[1:])               # xi points inside each cell
    P = np.empty(n)
    for j0 in range(0, n, max(1, chunk // _GX.size)):
        cells = np.arange(j0, min(n, j0 + max(1, chunk // _GX.size)))
        xi = xq[cells].ravel()
        yx = np.interp(xi, nodes, y)
        kern = np.exp(-np.abs(yx[:, None] - flat_y[None, :]))
        # drop the own cell, then add it back split at xi
        own = np.repeat(cells, _GX.size)
        kern[owner[None, :] == own[:, None]] = 0.0
        vals = kern @ flat_wt
        lo, hi = nodes[own], nodes[own + 1]
        for a, b in ((lo, xi), (xi, hi)):
            pts, wts = _gauss(a, b)
            ypts = np.interp(pts, nodes, y)
            vals += (np.exp(-np.abs(yx[:, None] - ypts)) * wts).sum(axis=1) * w[own]
        vals = 0.25 * vals
        P[cells] = (vals.reshape(cells.size, _GX.size) * xw[cells]).sum(axis=1) / grid.dx
    return P + 0.5 * X.k**2, Q


def bisection_sup_inverse(mu, xi: float, iters: int = 200) -> float:
    """``sup{y : F(y-) + y < xi}`` by bisection on the left-continuous ``y + F(y-)``."""
    lo = min(mu.grid.x0, xi) - mu.total_mass - 1.0
    hi = max(mu.grid.x1, xi) + 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid + mu.eval_F_left(mid) < xi:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def mp_phi_normalization(dps: int = 30):
    with mpmath.workdps(dps):
        return 1 / mpmath.quad(lambda x: mpmath.exp(-1 / (1 - x * x)), [-1, 0, 1])


def mp_Phi(t: float, dps: int = 30):
    with mpmath.workdps(dps):
        c = mp_phi_normalization(dps)
        return c * mpmath.quad(lambda x: mpmath.exp(-1 / (1 - x * x)), [-1, t])


def mp_Phi_inverse(p: float, dps: int = 30) -> float:
    """Bisection on the mpmath distribution function."""
    lo, hi = mpmath.mpf(-1), mpmath.mpf(1)
    with mpmath.workdps(dps):
        for _ in range(60):
            mid = (lo + hi) / 2
            if mp_Phi(mid, dps) < p:
                lo = mid
            else:
                hi = mid
    return float((lo + hi) / 2)
