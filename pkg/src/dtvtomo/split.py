"""Sinogram splitting: separate reconstructions from two angle ranges.

The ``K + 1`` angles centred on the main direction see the edges running
along that direction (the fibres); the remaining angles see everything else
(the cracks).  Each part is reconstructed on its own, either by FBP or by a
component-specific variational problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffops import DtvParams
from .errors import ParamError
from .fbp import FbpConfig, fbp_reconstruct
from .reconstruct import reconstruct
from .solver import SolveConfig

__all__ = [
    "SplitSpec",
    "SplitParams",
    "SplitResult",
    "split_indices",
    "split_sinogram",
    "split_fbp",
    "split_variational",
]


@dataclass(frozen=True)
class SplitSpec:
    """Angle index ``main_index`` of the main direction and even range width ``K``."""

    main_index: int
    K: int = 10

    def __post_init__(self):
        if self.K < 2 or self.K % 2:
            raise ParamError(f"K must be even and >= 2, got {self.K}")


@dataclass(frozen=True)
class SplitParams:
    """Weights for the variational split.

    ``lam_u`` weighs DTV on the fibre part, ``lam_v`` TV on the crack part
    and ``beta`` the crack sparsity term (must be > 0).
    """

    lam_u: float
    lam_v: float
    beta: float
    dtv: DtvParams

    def __post_init__(self):
        if not (self.lam_u > 0 and self.lam_v > 0):
            raise ParamError("lam_u and lam_v must be positive")
        if not self.beta > 0:
            raise ParamError("beta must be positive")


@dataclass
class SplitResult:
    u: np.ndarray
    v: np.ndarray
    reports: dict = field(default_factory=dict)


def split_indices(n_angles, spec):
    """Angle indices of the main window and of its complement, both ascending.

    The window ``main_index - K/2 ... main_index + K/2`` wraps around modulo
    ``n_angles`` (directions are only defined modulo 180 degrees).
    """
    if not 0 <= spec.main_index < n_angles:
        raise ParamError(f"main_index {spec.main_index} outside [0, {n_angles})")
    if spec.K + 1 >= n_angles:
        raise ParamError(
            f"K + 1 = {spec.K + 1} leaves no angles for the second part (n_angles={n_angles})")
    half = spec.K // 2
    window = (spec.main_index + np.arange(-half, half + 1)) % n_angles
    inside = np.zeros(n_angles, dtype=bool)
    inside[window] = True
    return np.flatnonzero(inside), np.flatnonzero(~inside)


def split_sinogram(sin, spec):
    """Partition the sinogram columns into the main window and the rest."""
    idx1, idx2 = split_indices(sin.geometry.n_angles, spec)
    return sin.subset(idx1), sin.subset(idx2)


def split_fbp(sin, spec, cfg=None):
    """Limited-angle FBP of both parts; ``u + v`` equals the full FBP."""
    s1, s2 = split_sinogram(sin, spec)
    cfg = cfg or FbpConfig()
    return SplitResult(u=fbp_reconstruct(s1, cfg), v=fbp_reconstruct(s2, cfg),
                       reports={"method": "fbp", "angles_u": s1.geometry.n_angles,
                                "angles_v": s2.geometry.n_angles})


def split_variational(sin, spec, params, cfg=None):
    """Regularised reconstruction of both parts.

    ``u = argmin_{u>=0} 1/2 |A1 u - b1|^2 + lam_u DTV(u)`` and
    ``v = argmin_{v>=0} 1/2 |A2 v - b2|^2 + lam_v TV(v) + beta |v|_1``.
    """
    s1, s2 = split_sinogram(sin, spec)
    cfg = cfg or SolveConfig()
    u, rep_u = reconstruct(s1, "dtv", params.lam_u, params.dtv, nonneg=True, cfg=cfg)
    v, rep_v = reconstruct(s2, "tv", params.lam_v, l1=params.beta, nonneg=True, cfg=cfg)
    return SplitResult(u=u, v=v, reports={"u": rep_u, "v": rep_v})
