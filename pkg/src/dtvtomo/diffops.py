"""Finite differences, TV / DTV functionals and their dual projections.

Gradient fields are arrays of shape ``(2, M, M)``: component 0 is the forward
difference along axis 0 (rows), component 1 along axis 1 (columns).  The last
row of component 0 and the last column of component 1 are zero (replicate
boundary).

The DTV weight at main direction ``theta`` and width ``a`` maps a gradient
vector ``g`` to ``(g . e, a * g . e_perp)`` with ``e = (cos theta, sin theta)``
and ``e_perp = (-sin theta, cos theta)``.  Texture running along ``e`` has its
gradient along ``e_perp``, which is damped by ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParamError

__all__ = [
    "DtvParams",
    "gradient",
    "divergence",
    "tv",
    "dtv",
    "dtv_matrix",
    "weighted_gradient",
    "weighted_gradient_adjoint",
    "project_ball",
    "prox_dtv_dual",
    "GRADIENT_NORM",
]

# ||grad||_2 <= sqrt(8) for the forward-difference operator in 2-D
GRADIENT_NORM = math.sqrt(8.0)


@dataclass(frozen=True)
class DtvParams:
    """Main direction (degrees, reduced mod 360) and anisotropy width ``a`` in (0, 1]."""

    theta_deg: float
    a: float = 0.15

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0):
            raise ParamError(f"DTV width a must lie in (0, 1], got {self.a}")
        object.__setattr__(self, "theta_deg", float(self.theta_deg) % 360.0)
        object.__setattr__(self, "a", float(self.a))

    def rotated(self, degrees):
        return DtvParams(self.theta_deg + degrees, self.a)


def gradient(x):
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros((2,) + x.shape)
    g[0, :-1, :] = x[1:, :] - x[:-1, :]
    g[1, :, :-1] = x[:, 1:] - x[:, :-1]
    return g


def divergence(p):
    """Discrete divergence, the negative adjoint of :func:`gradient`."""
    p = np.asarray(p, dtype=np.float64)
    p0, p1 = p[0], p[1]
    d = np.zeros(p.shape[1:])
    d[:-1, :] += p0[:-1, :]
    d[1:, :] -= p0[:-1, :]
    d[:, :-1] += p1[:, :-1]
    d[:, 1:] -= p1[:, :-1]
    return d


def tv(x):
    """Isotropic total variation ``sum_ij |grad x_ij|_2``."""
    g = gradient(x)
    return float(np.sqrt(g[0] ** 2 + g[1] ** 2).sum())


def dtv_matrix(params):
    """2x2 per-pixel weight ``diag(1, a) @ R``."""
    th = math.radians(params.theta_deg)
    c, s = math.cos(th), math.sin(th)
    return np.array([[c, s], [-params.a * s, params.a * c]])


def weighted_gradient(x, params):
    """Per-pixel ``W @ grad x`` for the DTV weight ``W``."""
    return np.einsum("kl,l...->k...", dtv_matrix(params), gradient(x))


def weighted_gradient_adjoint(h, params):
    return -divergence(np.einsum("lk,l...->k...", dtv_matrix(params), h))


def dtv(x, params):
    """Directional total variation of ``x``."""
    h = weighted_gradient(x, params)
    return float(np.sqrt(h[0] ** 2 + h[1] ** 2).sum())


def project_ball(q, radius):
    """Per-pixel projection of a ``(2, ...)`` field onto ``{|q|_2 <= radius}``."""
    norm = np.sqrt(q[0] ** 2 + q[1] ** 2)
    scale = np.maximum(norm / radius, 1.0)
    return q / scale


def prox_dtv_dual(field, params, weight):
    """Project a dual field onto ``{q : |W^{-T} q|_2 <= weight}`` pixelwise.

    The field is mapped to the DTV frame with ``W^{-T}``, projected onto the
    Euclidean ball and mapped back with ``W^T``.  This is the projection in
    the metric induced by ``W``; for ``a = 1`` it is the ordinary ball
    projection.  The solvers avoid it by putting ``W`` into the linear
    operator (see :func:`weighted_gradient`) and projecting onto the plain
    ball.
    """
    if not weight > 0:
        raise ParamError("weight must be positive")
    w = dtv_matrix(params)
    z = np.einsum("kl,l...->k...", np.linalg.inv(w).T, field)
    z = project_ball(z, weight)
    return np.einsum("kl,l...->k...", w.T, z)
