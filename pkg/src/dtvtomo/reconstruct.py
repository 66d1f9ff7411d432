"""Variational reconstruction of a single image with TV or DTV regularisation.

Solves ``min_x 1/2 |A x - b|^2 + lam * R(x) + l1 * |x|_1`` (optionally with
``x >= 0``) by :func:`dtvtomo.solver.pdhg_solve`.  ``R`` is TV or DTV.

Internally every operator block is rescaled to norm ``BLOCK_SCALE`` (data
block ``c A / |A|``, regulariser block ``c W grad / sqrt(8)``) and the
fidelity and dual-ball radius are rescaled to keep the problem identical.
With equal primal and dual steps this balances the primal and dual updates;
unscaled blocks stall for thousands of iterations.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .diffops import (GRADIENT_NORM, DtvParams, project_ball, weighted_gradient,
                      weighted_gradient_adjoint)
from .errors import ParamError
from .geometry import Projector, Sinogram, power_norm
from .solver import SaddleProblem, SolveConfig, pdhg_solve

__all__ = ["reconstruct", "regularized_problem", "projector_norm", "TV_PARAMS"]

# a = 1 turns DTV into TV (the weight is then a rotation)
TV_PARAMS = DtvParams(0.0, 1.0)

NORM_ITERS = 50
NORM_MARGIN = 1.01
BLOCK_SCALE = 14.0


@lru_cache(maxsize=32)
def projector_norm(geom):
    """Cached power-iteration estimate of ``|A|`` for a geometry."""
    proj = Projector(geom)
    m = geom.image_size
    x0 = np.random.default_rng(0).standard_normal((m, m))
    return power_norm(lambda x: [proj.forward(x)], lambda y: proj.adjoint(y[0]), x0, NORM_ITERS)


def _stacked_norm(ops, adjs, shape):
    x0 = np.random.default_rng(1).standard_normal(shape)
    return NORM_MARGIN * power_norm(
        lambda x: [op(x) for op in ops],
        lambda ys: sum(adj(y) for adj, y in zip(adjs, ys)),
        x0, NORM_ITERS)


def _dtv_value(h):
    return float(np.sqrt(h[0] ** 2 + h[1] ** 2).sum())


def regularized_problem(sin, lam, params=TV_PARAMS, l1=0.0, nonneg=False, x0=None):
    """Build the :class:`SaddleProblem` for one regularised reconstruction.

    ``lam = 0`` drops the gradient block (plain least squares).
    """
    if lam < 0 or l1 < 0:
        raise ParamError("regularisation weights must be nonnegative")
    geom = sin.geometry
    m = geom.image_size
    proj = Projector(geom)
    b = sin.data
    la = projector_norm(geom)
    sa = BLOCK_SCALE / la
    sr = BLOCK_SCALE / GRADIENT_NORM
    b_s = sa * b

    ops = [lambda x: sa * proj.forward(x)]
    adjs = [lambda y: sa * proj.adjoint(y)]
    if lam > 0:
        ops.append(lambda x: sr * weighted_gradient(x, params))
        adjs.append(lambda h: sr * weighted_gradient_adjoint(h, params))
    radius = lam / sr

    def forward(x):
        return [op(x) for op in ops]

    def adjoint(ys):
        out = adjs[0](ys[0])
        for adj, y in zip(adjs[1:], ys[1:]):
            out = out + adj(y)
        return out

    def prox_dual(ys, sigma):
        # data term F(z) = |z/sa - b|^2 / 2 = |z - b_s|^2 / (2 sa^2)
        out = [(ys[0] - sigma * b_s) / (1.0 + sigma * sa * sa)]
        if lam > 0:
            out.append(project_ball(ys[1], radius))
        return out

    def prox_primal(x, tau):
        if l1 > 0:
            x = np.sign(x) * np.maximum(np.abs(x) - tau * l1, 0.0)
        if nonneg:
            x = np.maximum(x, 0.0)
        return x

    def objective(x):
        r = proj.forward(x) - b
        f = 0.5 * float(np.vdot(r, r))
        if lam > 0:
            f += lam * _dtv_value(weighted_gradient(x, params))
        if l1 > 0:
            f += l1 * float(np.abs(x).sum())
        return f

    norm = _stacked_norm(ops, adjs, (m, m))
    start = np.zeros((m, m)) if x0 is None else np.asarray(x0, dtype=np.float64)
    return SaddleProblem(forward=forward, adjoint=adjoint, prox_primal=prox_primal,
                         prox_dual=prox_dual, objective=objective, norm=norm, x0=start)


def reconstruct(sin, reg="tv", lam=1.0, params=None, l1=0.0, nonneg=False,
                cfg=None, x0=None):
    """TV- or DTV-regularised least-squares reconstruction.

    Parameters
    ----------
    sin : Sinogram
    reg : {"tv", "dtv", "none"}
    lam : float
        Regularisation weight.
    params : DtvParams
        Required for ``reg="dtv"``.
    l1 : float
        Weight of an additional ``|x|_1`` term.
    nonneg : bool
        Constrain ``x >= 0``.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    if not isinstance(sin, Sinogram):
        raise TypeError("reconstruct expects a Sinogram")
    if reg == "tv":
        params = TV_PARAMS
    elif reg == "dtv":
        if params is None:
            raise ParamError("DTV reconstruction needs DtvParams")
    elif reg == "none":
        lam, params = 0.0, TV_PARAMS
    else:
        raise ParamError(f"unknown regulariser {reg!r}")
    problem = regularized_problem(sin, lam, params, l1=l1, nonneg=nonneg, x0=x0)
    return pdhg_solve(problem, cfg or SolveConfig())
