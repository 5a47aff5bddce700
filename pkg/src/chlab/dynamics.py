"""The semilinear Lagrangian system and a fixed-step RK4 integrator.

    y_t = U,  U_t = -Q,  h_t = 2 (U^2 + k^2/2 - P) U_xi,  r_bar_t = -k U_xi,  k_t = 0

with ``P = 1/4 int exp(-|y(xi)-y(eta)|) w deta + k^2/2``,
``Q = -1/4 int sign(xi-eta) exp(-|y(xi)-y(eta)|) w deta`` and
``w = 2 U^2 y_xi + 2 k r_bar + h``.

Discretization: ``w`` is constant per cell with the exact cell mean of ``U^2``;
``Q`` is the exact integral at the nodes and ``P`` the exact cell average, for
piecewise-linear ``y``.  These satisfy, cell by cell,

    Q_{j+1} - Q_j = dxi * (-w_j / 2 + y_xi_j (P_j - k^2/2)),

which is exactly what makes ``y_xi h - U_xi^2 - r_bar^2`` a first integral of
the semi-discrete system.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from chlab.lagrangian import LagrangianState, energy_sigma

log = logging.getLogger(__name__)

if "CH_LAB_THREADS" in os.environ:
    # the kernels are sequential; the cap only matters for numba-internal pools
    numba.set_num_threads(max(1, min(int(os.environ["CH_LAB_THREADS"]), numba.config.NUMBA_NUM_THREADS)))


@numba.njit(cache=True)
def _e1(d):
    # (1 - exp(-d)) / d
    if abs(d) < 1e-4:
        return 1.0 - d / 2.0 + d * d / 6.0 - d * d * d / 24.0
    return -math.expm1(-d) / d


@numba.njit(cache=True)
def _e2(d):
    # (d - 1 + exp(-d)) / d^2
    if abs(d) < 1e-2:
        return 0.5 - d / 6.0 + d * d / 24.0 - d ** 3 / 120.0 + d ** 4 / 720.0 - d ** 5 / 5040.0 + d ** 6 / 40320.0
    return (math.expm1(-d) + d) / (d * d)


@numba.njit(cache=True)
def _sweeps(y, w, dxi):
    n = w.size
    A = np.zeros(n + 1)
    B = np.zeros(n + 1)
    decay = np.empty(n)
    e1 = np.empty(n)
    for j in range(n):
        d = y[j + 1] - y[j]
        decay[j] = math.exp(-d)
        e1[j] = _e1(d)
    for j in range(n):
        A[j + 1] = decay[j] * A[j] + w[j] * dxi * e1[j]
    for j in range(n - 1, -1, -1):
        B[j] = decay[j] * B[j + 1] + w[j] * dxi * e1[j]
    return A, B, e1


@numba.njit(cache=True)
def _pq(y, w, dxi, k):
    A, B, e1 = _sweeps(y, w, dxi)
    n = w.size
    P = np.empty(n)
    for j in range(n):
        d = y[j + 1] - y[j]
        P[j] = 0.25 * ((A[j] + B[j + 1]) * e1[j] + 2.0 * w[j] * dxi * _e2(d)) + 0.5 * k * k
    Q = 0.25 * (B - A)
    return P, Q


def source(X: LagrangianState) -> np.ndarray:
    """Per-cell ``w = 2 <U^2> y_xi + 2 k r_bar + h`` with the exact cell mean ``<U^2>``."""
    return 2.0 * _mean_sq(X.U) * X.y_xi + 2.0 * X.k * X.r_bar + X.h


def _mean_sq(U):
    U0, U1 = U[:-1], U[1:]
    return (U0 * U0 + U0 * U1 + U1 * U1) / 3.0


def compute_PQ(X: LagrangianState) -> tuple[np.ndarray, np.ndarray]:
    """Cell averages of ``P`` and nodal values of ``Q`` in O(N).

    Two sweeps accumulate ``A_i = int_{eta<xi_i} exp(-(y_i - y(eta))) w`` and
    the mirrored ``B_i``; every exponential has a nonpositive argument.
    """
    return _pq(np.ascontiguousarray(X.y), np.ascontiguousarray(source(X)), X.grid.dx, X.k)


def compute_P(X: LagrangianState) -> np.ndarray:
    return compute_PQ(X)[0]


def compute_Q(X: LagrangianState) -> np.ndarray:
    return compute_PQ(X)[1]


@dataclass(frozen=True)
class Derivative:
    y: np.ndarray
    U: np.ndarray
    h: np.ndarray
    r_bar: np.ndarray
    k: float = 0.0

    @property
    def zeta(self) -> np.ndarray:
        return self.y


def rhs(X: LagrangianState) -> Derivative:
    P, Q = compute_PQ(X)
    Ux = X.U_xi
    return Derivative(
        y=np.array(X.U),
        U=-Q,
        h=2.0 * (_mean_sq(X.U) + 0.5 * X.k**2 - P) * Ux,
        r_bar=-X.k * Ux,
        k=0.0,
    )


def sigma_rate(X: LagrangianState, d: Derivative | None = None) -> float:
    """``d/dt`` of ``energy_sigma`` along ``rhs`` by the chain rule."""
    d = rhs(X) if d is None else d
    U0, U1 = X.U[:-1], X.U[1:]
    dy = np.diff(X.y)
    dU0, dU1 = d.U[:-1], d.U[1:]
    dmean = ((2 * U0 + U1) * dU0 + (U0 + 2 * U1) * dU1) / 3.0
    return float(np.sum(np.diff(d.y) * _mean_sq(X.U) + dy * dmean) + np.sum(d.h) * X.grid.dx)


# --- time stepping -----------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    snapshot_stride: int = 1
    invariant_tolerance: float = 1e-8

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least dt")
        if int(self.snapshot_stride) < 1:
            raise ValueError("snapshot_stride must be a positive integer")
        if not self.invariant_tolerance > 0:
            raise ValueError("invariant_tolerance must be positive")

    def to_json(self) -> dict:
        return {"dt": self.dt, "t_end": self.t_end, "snapshot_stride": int(self.snapshot_stride),
                "invariant_tolerance": self.invariant_tolerance}


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[LagrangianState] = field(default_factory=list)
    sigma_log: list[float] = field(default_factory=list)
    invariant_residual_log: list[float] = field(default_factory=list)
    # per-step diagnostics, including steps between snapshots
    step_times: list[float] = field(default_factory=list)
    step_min_y_xi: list[float] = field(default_factory=list)
    status: str = "ok"
    message: str = ""

    @property
    def final(self) -> LagrangianState:
        return self.states[-1]

    def record(self, t: float, X: LagrangianState) -> None:
        self.times.append(float(t))
        self.states.append(X)
        self.sigma_log.append(energy_sigma(X))
        self.invariant_residual_log.append(max_residual(X))


def max_residual(X: LagrangianState) -> float:
    res = X.constraint_residual()
    return float(np.max(np.abs(res))) if res.size else 0.0


def _pack(X: LagrangianState) -> np.ndarray:
    return np.concatenate([X.y, X.U, X.h, X.r_bar])


def _unpack(v: np.ndarray, X: LagrangianState) -> LagrangianState:
    n = X.grid.cells
    return LagrangianState(X.grid, v[: n + 1], v[n + 1: 2 * n + 2], v[2 * n + 2: 3 * n + 2], v[3 * n + 2:], X.k)


def _f(v: np.ndarray, X: LagrangianState) -> np.ndarray:
    # same as rhs, on the packed vector, without building frozen arrays
    n = X.grid.cells
    dxi = X.grid.dx
    y, U, h, r = v[: n + 1], v[n + 1: 2 * n + 2], v[2 * n + 2: 3 * n + 2], v[3 * n + 2:]
    y_xi = np.diff(y) / dxi
    U_xi = np.diff(U) / dxi
    m = _mean_sq(U)
    w = 2.0 * m * y_xi + 2.0 * X.k * r + h
    P, Q = _pq(y, w, dxi, X.k)
    return np.concatenate([U, -Q, 2.0 * (m + 0.5 * X.k**2 - P) * U_xi, -X.k * U_xi])


def rk4_step(v: np.ndarray, dt: float, X: LagrangianState) -> np.ndarray:
    k1 = _f(v, X)
    k2 = _f(v + 0.5 * dt * k1, X)
    k3 = _f(v + 0.5 * dt * k2, X)
    k4 = _f(v + dt * k3, X)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve(X0: LagrangianState, cfg: SolverConfig, enforce_dt_cap: bool = True) -> Trajectory:
    """Classical RK4 with fixed step; snapshots every ``cfg.snapshot_stride`` steps and at ``t_end``.

    On a non-finite value or an invariant residual above
    ``cfg.invariant_tolerance`` the partial trajectory is returned with
    ``status`` set and a message naming the time and cell.
    """
    if enforce_dt_cap and cfg.dt > X0.grid.dx:
        raise ValueError(f"dt = {cfg.dt} exceeds the grid spacing {X0.grid.dx}")
    steps = max(1, int(math.ceil(cfg.t_end / cfg.dt - 1e-9)))
    dt = cfg.t_end / steps
    traj = Trajectory()
    traj.record(0.0, X0)
    traj.step_times.append(0.0)
    traj.step_min_y_xi.append(float(X0.y_xi.min()))
    n = X0.grid.cells
    v = _pack(X0)
    for step in range(1, steps + 1):
        t = step * dt
        v = rk4_step(v, dt, X0)
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            traj.status = "nan"
            traj.message = f"non-finite value at t={t:.6g}, entry {bad} of the packed state"
            log.error(traj.message)
            return traj
        y_xi = np.diff(v[: n + 1]) / X0.grid.dx
        traj.step_times.append(t)
        traj.step_min_y_xi.append(float(y_xi.min()))
        U_xi = np.diff(v[n + 1: 2 * n + 2]) / X0.grid.dx
        res = np.abs(y_xi * v[2 * n + 2: 3 * n + 2] - U_xi**2 - v[3 * n + 2:] ** 2)
        worst = float(res.max())
        if worst > cfg.invariant_tolerance:
            X = _unpack(v, X0)
            traj.record(t, X)
            traj.status = "tolerance"
            traj.message = (f"invariant residual {worst:.3e} > {cfg.invariant_tolerance:.1e} "
                            f"at t={t:.6g}, cell {int(res.argmax())}")
            log.warning(traj.message)
            return traj
        if step % cfg.snapshot_stride == 0 or step == steps:
            traj.record(t, _unpack(v, X0))
    return traj
