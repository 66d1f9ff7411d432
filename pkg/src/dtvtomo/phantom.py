"""Synthetic fibre / fibre-crack phantoms and sinogram noise.

Angles follow the convention of :mod:`dtvtomo.geometry`: a direction ``phi``
is the unit vector ``(cos phi, sin phi)`` in (row, column) coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParamError
from .geometry import Sinogram

__all__ = [
    "PhantomSpec",
    "NoiseSpec",
    "make_phantom",
    "crack_mask",
    "support_mask",
    "add_noise",
    "disk_phantom",
    "disk_sinogram",
]

KINDS = ("fibre", "fibre-crack")
FIBRE_LEVELS = (0.5, 1.0)
STRIPE_WIDTH_RANGE = (4.0, 16.0)


@dataclass(frozen=True)
class PhantomSpec:
    """Recipe for a procedural phantom; the same spec always gives the same image.

    ``n_stripes=None`` draws stripe widths in [4, 16] px until the disk is
    covered; an explicit count draws that many widths and rescales them to
    span the diameter.
    """

    size: int = 256
    kind: str = "fibre"
    main_angle_deg: float = 20.0
    n_stripes: int | None = None
    crack_count: int = 12
    crack_width_px: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise ParamError("size must be positive")
        if self.kind not in KINDS:
            raise ParamError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.main_angle_deg < 180.0:
            raise ParamError("main_angle_deg must lie in [0, 180)")
        if self.n_stripes is not None and self.n_stripes < 1:
            raise ParamError("n_stripes must be positive")
        if self.crack_count < 0:
            raise ParamError("crack_count must be nonnegative")
        if not self.crack_width_px > 0:
            raise ParamError("crack_width_px must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    level: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if not self.level >= 0:
            raise ParamError("noise level must be nonnegative")


def _centered_coords(m):
    c = 0.5 * (m - 1)
    i, j = np.mgrid[:m, :m].astype(np.float64)
    return i - c, j - c


def support_mask(m, margin=1.0):
    """Pixels strictly inside the inscribed circle shrunk by ``margin`` pixels."""
    di, dj = _centered_coords(m)
    return di ** 2 + dj ** 2 < (0.5 * m - margin) ** 2


def _stripe_profile(m, n_stripes, rng):
    half = 0.5 * m
    if n_stripes is None:
        widths = []
        total = 0.0
        while total < m:
            w = rng.uniform(*STRIPE_WIDTH_RANGE)
            widths.append(w)
            total += w
        widths = np.array(widths)
    else:
        widths = rng.uniform(*STRIPE_WIDTH_RANGE, size=n_stripes)
        widths *= m / widths.sum()
    edges = -half + np.cumsum(widths)[:-1]
    first = int(rng.integers(2))
    levels = np.array([FIBRE_LEVELS[(first + k) % 2] for k in range(widths.size)])
    return edges, levels


def _crack_rects(spec):
    m = spec.size
    ring = 0.25 * m
    for k in range(spec.crack_count):
        psi = 2.0 * math.pi * k / spec.crack_count
        yield ring * math.cos(psi), ring * math.sin(psi), psi


def crack_mask(spec):
    """Boolean mask of the crack rectangles (empty for ``kind='fibre'``)."""
    m = spec.size
    mask = np.zeros((m, m), dtype=bool)
    if spec.kind != "fibre-crack":
        return mask
    di, dj = _centered_coords(m)
    half_len = 0.125 * m
    half_w = 0.5 * spec.crack_width_px
    for ci, cj, psi in _crack_rects(spec):
        along = (di - ci) * math.cos(psi) + (dj - cj) * math.sin(psi)
        across = -(di - ci) * math.sin(psi) + (dj - cj) * math.cos(psi)
        mask |= (np.abs(along) <= half_len) & (np.abs(across) <= half_w)
    return mask & support_mask(m)


def make_phantom(spec):
    """Piecewise-constant phantom with stripes along ``spec.main_angle_deg``.

    Stripes alternate between 0.5 and 1.0; cracks (``kind='fibre-crack'``)
    are zero-valued bars of length ``M/4`` centred on a ring of radius
    ``M/4`` and oriented along their polar angle.  Everything outside the
    inscribed circle is zero.
    """
    m = spec.size
    rng = np.random.default_rng(spec.seed)
    edges, levels = _stripe_profile(m, spec.n_stripes, rng)
    phi = math.radians(spec.main_angle_deg)
    di, dj = _centered_coords(m)
    # coordinate across the stripes: constant along (cos phi, sin phi)
    w = -di * math.sin(phi) + dj * math.cos(phi)
    img = levels[np.searchsorted(edges, w)]
    img[crack_mask(spec)] = 0.0
    img[~support_mask(m)] = 0.0
    return img


def add_noise(sin, noise):
    """Return ``b + e`` with Gaussian ``e`` rescaled so ``|e| = level * |b|``.

    A zero sinogram (or ``level == 0``) is returned unchanged.
    """
    b = sin.data
    nb = np.linalg.norm(b)
    if noise.level == 0 or nb == 0:
        return sin.with_data(b.copy())
    e = np.random.default_rng(noise.seed).standard_normal(b.shape)
    e *= noise.level * nb / np.linalg.norm(e)
    return sin.with_data(b + e)


def disk_phantom(m, radius, value=1.0):
    di, dj = _centered_coords(m)
    return np.where(di ** 2 + dj ** 2 <= radius ** 2, float(value), 0.0)


def disk_sinogram(geom, radius, value=1.0):
    """Exact line integrals of a centred disk (chord length ``2 sqrt(r^2 - s^2)``)."""
    s = geom.bin_centers
    col = 2.0 * value * np.sqrt(np.clip(radius ** 2 - s ** 2, 0.0, None))
    return Sinogram(geom, np.repeat(col[:, None], geom.n_angles, axis=1))
