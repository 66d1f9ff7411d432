"""First-order primal-dual (Chambolle-Pock) solver.

Problems are posed as ``min_x G(x) + F(Kx)`` where ``K`` maps the primal
array to a list of dual blocks.  The caller supplies ``K``, ``K^T``, the
proximal map of ``tau * G``, the proximal map of ``sigma * F^*`` and an
objective evaluator; the solver owns the iteration and the stopping rule.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DivergenceError, ParamError

__all__ = ["SolveConfig", "SolveReport", "SaddleProblem", "pdhg_solve"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveConfig:
    """Stopping rule and relaxation for :func:`pdhg_solve`.

    The objective is evaluated every ``check_every`` iterations and the run
    stops once ``|F_k - F_{k-check}| / max(|F_k|, eps) <= tol``.
    """

    tol: float = 1e-5
    max_iters: int = 5000
    check_every: int = 10
    theta_relax: float = 1.0
    step_safety: float = 0.99

    def __post_init__(self):
        if not self.tol > 0:
            raise ParamError("tol must be positive")
        if self.max_iters < 1 or self.check_every < 1:
            raise ParamError("max_iters and check_every must be >= 1")
        if not 0.0 <= self.theta_relax <= 1.0:
            raise ParamError("theta_relax must lie in [0, 1]")
        if not 0.0 < self.step_safety < 1.0:
            raise ParamError("step_safety must lie in (0, 1)")


@dataclass
class SolveReport:
    iterations: int
    objective: float
    rel_change: float
    converged: bool
    objective_trace: list = field(default_factory=list)


@dataclass
class SaddleProblem:
    """Everything :func:`pdhg_solve` needs about ``min_x G(x) + F(Kx)``.

    ``norm`` must bound ``||K||``; the step sizes are ``safety / norm``.
    """

    forward: Callable[[np.ndarray], Sequence[np.ndarray]]
    adjoint: Callable[[Sequence[np.ndarray]], np.ndarray]
    prox_primal: Callable[[np.ndarray, float], np.ndarray]
    prox_dual: Callable[[Sequence[np.ndarray], float], list]
    objective: Callable[[np.ndarray], float]
    norm: float
    x0: np.ndarray


_EPS = 1e-30


def pdhg_solve(problem, cfg=None, x0=None, callback=None):
    """Run the primal-dual iteration until the relative objective change is below ``cfg.tol``.

    Parameters
    ----------
    problem : SaddleProblem
    cfg : SolveConfig, optional
    x0 : ndarray, optional
        Overrides ``problem.x0`` as the starting point.  Dual variables always
        start at zero.
    callback : callable, optional
        Called as ``callback(k, x)`` at every objective check.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    cfg = cfg or SolveConfig()
    if not problem.norm > 0:
        raise ParamError("operator norm must be positive")
    tau = sigma = cfg.step_safety / problem.norm

    x = np.array(problem.x0 if x0 is None else x0, dtype=np.float64)
    x_bar = x.copy()
    y = [np.zeros_like(b) for b in problem.forward(x)]

    f_prev = problem.objective(x)
    if not math.isfinite(f_prev):
        raise DivergenceError(0, f_prev)
    trace = [f_prev]
    rel = math.inf
    converged = False
    k = 0
    while k < cfg.max_iters:
        kx = problem.forward(x_bar)
        y = problem.prox_dual([yi + sigma * ki for yi, ki in zip(y, kx)], sigma)
        x_new = problem.prox_primal(x - tau * problem.adjoint(y), tau)
        x_bar = x_new + cfg.theta_relax * (x_new - x)
        x = x_new
        k += 1
        if k % cfg.check_every == 0 or k == cfg.max_iters:
            f = problem.objective(x)
            if not math.isfinite(f):
                raise DivergenceError(k, f)
            trace.append(f)
            rel = abs(f - f_prev) / max(abs(f), _EPS)
            f_prev = f
            if callback is not None:
                callback(k, x)
            if rel <= cfg.tol:
                converged = True
                break
    log.debug("pdhg: %d iterations, objective %.6g, rel change %.3g", k, f_prev, rel)
    return x, SolveReport(iterations=k, objective=f_prev, rel_change=rel,
                          converged=converged, objective_trace=trace)
