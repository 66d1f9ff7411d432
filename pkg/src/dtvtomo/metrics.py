"""Reconstruction quality measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffops import gradient
from .errors import DimensionError

__all__ = ["MetricRow", "psnr", "format_params", "mask_mean_ratio", "masked_energy",
           "edge_energy_ratio", "grow_mask"]


@dataclass
class MetricRow:
    method: str
    params: str
    psnr_db: float
    iterations: int = 0
    wall_seconds: float = 0.0


def format_params(**kw):
    """Canonical ``key=value`` list, keys sorted, separated by ``;``."""
    return ";".join(f"{k}={kw[k]}" for k in sorted(kw))


def psnr(x, ref):
    """Peak signal-to-noise ratio in dB with the peak taken as ``max(ref)``.

    Returns ``math.inf`` for identical images.
    """
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if x.shape != ref.shape:
        raise DimensionError(f"psnr: shape {x.shape} != {ref.shape}")
    mse = float(np.mean((x - ref) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(float(ref.max()) ** 2 / mse)


def mask_mean_ratio(img, mask, region=None):
    """``mean(|img|)`` inside ``mask`` divided by the mean over ``region & ~mask``.

    ``region`` defaults to the whole image.
    """
    a = np.abs(np.asarray(img, dtype=np.float64))
    mask = np.asarray(mask, dtype=bool)
    rest = ~mask if region is None else (np.asarray(region, dtype=bool) & ~mask)
    return float(a[mask].mean() / a[rest].mean())


def masked_energy(img, mask):
    """Sum of squares of ``img`` inside ``mask``."""
    a = np.asarray(img, dtype=np.float64)[np.asarray(mask, dtype=bool)]
    return float(np.dot(a, a))


def grow_mask(mask, pixels=1):
    """Dilate a boolean mask by ``pixels`` steps of the 4-neighbourhood."""
    out = np.asarray(mask, dtype=bool).copy()
    for _ in range(pixels):
        grown = out.copy()
        grown[1:] |= out[:-1]
        grown[:-1] |= out[1:]
        grown[:, 1:] |= out[:, :-1]
        grown[:, :-1] |= out[:, 1:]
        out = grown
    return out


def edge_energy_ratio(img, mask, region=None, grow=1):
    """Mean squared gradient magnitude near ``mask`` over the mean elsewhere.

    "Near" is ``mask`` grown by ``grow`` pixels so that the mask edges are
    included; "elsewhere" is the rest of ``region`` (whole image by default).
    """
    g = gradient(img)
    e = g[0] ** 2 + g[1] ** 2
    near = grow_mask(mask, grow)
    region = np.ones(e.shape, dtype=bool) if region is None else np.asarray(region, dtype=bool)
    return float(e[near & region].mean() / e[region & ~near].mean())
