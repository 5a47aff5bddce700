"""The standard bump ``phi(x) = c exp(-1/(1-x^2))`` on (-1, 1) and its primitives.

``Phi`` is the distribution function of ``phi`` and ``Psi(t) = int_{-1}^t z phi(z) dz``
is its first moment; together they give closed forms for mollified ramps and
steps, which is all that piecewise-linear data needs.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

# 1 / int_{-1}^{1} exp(-1/(1-x^2)) dx, evaluated with 30-digit quadrature
PHI_NORMALIZATION = 2.2522836210435810105

_GL_X, _GL_W = np.polynomial.legendre.leggauss(96)


def _bump(z):
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    zi = z[inside]
    out[inside] = np.exp(-1.0 / (1.0 - zi * zi))
    return out


def phi(x):
    """Normalized bump; zero outside (-1, 1)."""
    out = PHI_NORMALIZATION * _bump(x)
    return out if out.ndim else float(out)


def phi_prime(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    d = np.where(inside, 1.0 - x * x, 1.0)
    out = np.where(inside, -2.0 * x / (d * d), 0.0) * PHI_NORMALIZATION * _bump(x)
    return out if out.ndim else float(out)


def _left_integrals(t):
    # int_{-1}^{t} phi and int_{-1}^{t} z phi for t in [-1, 0]
    t = np.asarray(t, dtype=float)
    half = 0.5 * (t + 1.0)
    z = -1.0 + half[..., None] * (_GL_X + 1.0)
    f = PHI_NORMALIZATION * _bump(z) * _GL_W
    return half * f.sum(axis=-1), half * (f * z).sum(axis=-1)


def Phi(x):
    """``Phi(x) = int_{-inf}^x phi``; uses the symmetry ``Phi(x) = 1 - Phi(-x)``."""
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    out = np.where(x > 0, 1.0, 0.0)
    inside = np.abs(x) < 1.0
    if np.any(inside):
        xi = x[inside]
        p, _ = _left_integrals(-np.abs(xi))
        out[inside] = np.where(xi <= 0, p, 1.0 - p)
    return out if out.ndim else float(out)


def Psi(x):
    """``Psi(x) = int_{-inf}^x z phi(z) dz``; even, vanishing for ``|x| >= 1``."""
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    if np.any(inside):
        _, out[inside] = _left_integrals(-np.abs(x[inside]))
    return out if out.ndim else float(out)


_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def interval_integrals(a, b):
    """``int_a^b phi`` for many intervals at once.

    Intervals of length at most 1e-2 use an 8-point Gauss-Legendre rule,
    which is exact to rounding there and much cheaper than ``Phi``; longer
    ones fall back to differences of ``Phi``.
    """
    a = np.clip(np.asarray(a, dtype=float), -1.0, 1.0)
    b = np.clip(np.asarray(b, dtype=float), -1.0, 1.0)
    out = np.zeros(np.broadcast(a, b).shape)
    live = b > a
    if np.any(live):
        lo, hi = a[live], b[live]
        half = 0.5 * (hi - lo)
        z = 0.5 * (hi + lo)[:, None] + half[:, None] * _GL8_X
        out[live] = half * (PHI_NORMALIZATION * _bump(z) * _GL8_W).sum(axis=1)
    long = live & (b - a > 1e-2)
    if np.any(long):
        out[long] = Phi(b[long]) - Phi(a[long])
    return out


def Phi_inverse(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"Phi_inverse needs p in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    return brentq(lambda t: Phi(t) - p, -1.0, 1.0, xtol=1e-15, rtol=1e-15, maxiter=200)


def smoothed_step(s, n: float):
    """``(n phi(n .)) * H`` at ``s``: the mollified Heaviside step."""
    return Phi(n * np.asarray(s, dtype=float))


def ramp_correction(s, n: float):
    """``(n phi(n .)) * s_+  -  s_+``, supported in ``|s| < 1/n``."""
    s = np.asarray(s, dtype=float)
    t = n * s
    out = s * Phi(t) - Psi(t) / n - np.maximum(s, 0.0)
    return np.where(np.abs(t) < 1.0, out, 0.0)
