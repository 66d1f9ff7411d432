"""Parallel-beam geometry and the matched Joseph projector pair.

Coordinate convention
---------------------
Images are ``(M, M)`` float arrays indexed ``img[i, j]`` (row, column).  The
pixel ``(i, j)`` has its centre at ``p = (i - c, j - c)`` with
``c = (M - 1) / 2``.  At projection angle ``theta`` the rays travel along
``d = (cos theta, sin theta)`` in these (row, column) coordinates and the
detector axis is ``n = (-sin theta, cos theta)``.  At 0 degrees the rays run
down the columns, so the projection is ``img.sum(axis=0)`` up to the
interpolation weights.

A texture whose stripes run along ``d(phi)`` therefore has its edges tangent
to the rays at angle ``phi``; the same angle is the main direction used by
the DTV functionals in :mod:`dtvtomo.diffops`.

Sinogram data are stored as ``(n_bins, n_angles)`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numba import njit

from .errors import DimensionError, ParamError

__all__ = [
    "Geometry",
    "Sinogram",
    "Projector",
    "parallel_geometry",
    "forward_project",
    "back_project",
    "operator_norm_estimate",
    "power_norm",
    "wedge_widths",
]


def wedge_widths(angles_deg):
    """Angular width (degrees) owned by each angle on the 180 degree circle.

    Each angle owns half the gap to its neighbours, with wrap-around, so the
    widths always sum to 180.
    """
    a = np.asarray(angles_deg, dtype=np.float64)
    if a.size == 0:
        return a.copy()
    gaps = np.diff(np.append(a, a[0] + 180.0))
    return 0.5 * (gaps + np.roll(gaps, 1))


@dataclass(frozen=True)
class Geometry:
    """Parallel-beam acquisition geometry.

    Parameters
    ----------
    n_bins : int
        Number of detector bins.
    angles : tuple of float
        Strictly increasing projection angles in degrees, inside [0, 180).
    image_size : int
        Side length ``M`` of the reconstruction grid.
    det_spacing : float
        Detector bin width in pixel units.
    wedges : tuple of float, optional
        Angular width in degrees carried by each angle (used as the FBP
        quadrature weight).  Computed from ``angles`` when omitted; subsets
        created with :meth:`subset` inherit the parent's widths so that
        limited-angle reconstructions add up to the full one.
    """

    n_bins: int
    angles: tuple
    image_size: int
    det_spacing: float = 1.0
    wedges: tuple = field(default=None)

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        object.__setattr__(self, "angles", angles)
        if int(self.n_bins) < 1:
            raise ParamError("n_bins must be >= 1")
        if int(self.image_size) < 1:
            raise ParamError("image_size must be >= 1")
        if not self.det_spacing > 0:
            raise ParamError("det_spacing must be positive")
        a = np.asarray(angles)
        if a.size and (np.any(a < 0.0) or np.any(a >= 180.0)):
            raise ParamError("angles must lie in [0, 180)")
        if a.size > 1 and np.any(np.diff(a) <= 0):
            raise ParamError("angles must be strictly increasing")
        if self.wedges is None:
            object.__setattr__(self, "wedges", tuple(wedge_widths(a).tolist()))
        else:
            w = tuple(float(x) for x in self.wedges)
            if len(w) != len(angles):
                raise DimensionError("one wedge width per angle required")
            object.__setattr__(self, "wedges", w)
        object.__setattr__(self, "n_bins", int(self.n_bins))
        object.__setattr__(self, "image_size", int(self.image_size))
        object.__setattr__(self, "det_spacing", float(self.det_spacing))

    @property
    def n_angles(self):
        return len(self.angles)

    @property
    def shape(self):
        """Sinogram array shape ``(n_bins, n_angles)``."""
        return (self.n_bins, self.n_angles)

    @cached_property
    def angles_rad(self):
        return np.deg2rad(np.asarray(self.angles, dtype=np.float64))

    @cached_property
    def bin_centers(self):
        t = np.arange(self.n_bins, dtype=np.float64)
        return (t - 0.5 * (self.n_bins - 1)) * self.det_spacing

    def subset(self, indices):
        """Geometry restricted to the given angle indices (kept in ascending order)."""
        idx = np.unique(np.asarray(indices, dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= self.n_angles):
            raise ParamError("angle index out of range")
        return Geometry(
            n_bins=self.n_bins,
            angles=tuple(self.angles[k] for k in idx),
            image_size=self.image_size,
            det_spacing=self.det_spacing,
            wedges=tuple(self.wedges[k] for k in idx),
        )


def parallel_geometry(image_size, n_angles=None, n_bins=None, det_spacing=1.0):
    """Equispaced angles on [0, 180) with ``n_bins`` centred detector bins.

    Defaults: ``n_bins = image_size`` and ``n_angles = image_size``.
    """
    n_bins = image_size if n_bins is None else n_bins
    n_angles = image_size if n_angles is None else n_angles
    if n_angles < 1:
        raise ParamError("n_angles must be >= 1")
    angles = np.arange(n_angles) * (180.0 / n_angles)
    return Geometry(n_bins=n_bins, angles=tuple(angles), image_size=image_size,
                    det_spacing=det_spacing)


@dataclass(frozen=True, eq=False)
class Sinogram:
    """Measured line integrals on a :class:`Geometry`.

    ``data[t, k]`` is the value at detector bin ``t`` and angle index ``k``.
    """

    geometry: Geometry
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.shape != self.geometry.shape:
            raise DimensionError(
                f"sinogram data shape {data.shape} != geometry shape {self.geometry.shape}")
        if not np.all(np.isfinite(data)):
            raise ParamError("sinogram contains non-finite values")
        object.__setattr__(self, "data", data)

    def with_data(self, data):
        return Sinogram(self.geometry, data)

    def subset(self, indices):
        idx = np.unique(np.asarray(indices, dtype=np.int64))
        return Sinogram(self.geometry.subset(idx), self.data[:, idx])


# -- Joseph kernels ----------------------------------------------------------
#
# Every ray is sampled once per row (or per column, for steep rays) and the
# sample is linearly interpolated between the two neighbouring pixels.  Steep
# rays are handled on the transposed image so that both cases read rows.
# The back projector visits exactly the same (ray, pixel, weight) triples.


def _ray_tables(geom):
    th = geom.angles_rad
    ct, st = np.cos(th), np.sin(th)
    use_t = np.abs(st) > np.abs(ct)
    # |drive| >= 1/sqrt(2), never zero
    drive = np.where(use_t, st, ct)
    other = np.where(use_t, ct, st)
    a = np.where(use_t, -1.0, 1.0) / drive
    b = other / drive
    w = 1.0 / np.abs(drive)
    return a, b, w, use_t


@njit(cache=True)
def _joseph_forward(img, img_t, coef_a, coef_b, weight, use_t, s, out):
    m = img.shape[0]
    c = 0.5 * (m - 1)
    n_bins = s.shape[0]
    for k in range(coef_a.shape[0]):
        src = img_t if use_t[k] else img
        a = coef_a[k]
        w = weight[k]
        for r in range(m):
            base = (r - c) * coef_b[k] + c
            for t in range(n_bins):
                cf = a * s[t] + base
                if cf <= -1.0 or cf >= m:
                    continue
                c0 = int(math.floor(cf))
                f = cf - c0
                v = 0.0
                if c0 >= 0:
                    v += (1.0 - f) * src[r, c0]
                if c0 + 1 < m:
                    v += f * src[r, c0 + 1]
                out[k, t] += w * v


@njit(cache=True)
def _joseph_backward(sino, coef_a, coef_b, weight, use_t, s, acc, acc_t):
    m = acc.shape[0]
    c = 0.5 * (m - 1)
    n_bins = s.shape[0]
    for k in range(coef_a.shape[0]):
        dst = acc_t if use_t[k] else acc
        a = coef_a[k]
        w = weight[k]
        for r in range(m):
            base = (r - c) * coef_b[k] + c
            for t in range(n_bins):
                cf = a * s[t] + base
                if cf <= -1.0 or cf >= m:
                    continue
                c0 = int(math.floor(cf))
                f = cf - c0
                y = w * sino[k, t]
                if c0 >= 0:
                    dst[r, c0] += (1.0 - f) * y
                if c0 + 1 < m:
                    dst[r, c0 + 1] += f * y


def _check_image(img, geom):
    img = np.asarray(img, dtype=np.float64)
    m = geom.image_size
    if img.shape != (m, m):
        raise DimensionError(f"image shape {img.shape} != ({m}, {m})")
    return img


def forward_project(img, geom):
    """Apply the system matrix ``A``: image -> :class:`Sinogram`."""
    img = _check_image(img, geom)
    a, b, w, use_t = _ray_tables(geom)
    out = np.zeros((geom.n_angles, geom.n_bins))
    _joseph_forward(np.ascontiguousarray(img), np.ascontiguousarray(img.T),
                    a, b, w, use_t, geom.bin_centers, out)
    return Sinogram(geom, out.T)


def back_project(sin, geom=None):
    """Apply ``A^T``: :class:`Sinogram` (or raw array plus geometry) -> image."""
    if isinstance(sin, Sinogram):
        if geom is not None and geom != sin.geometry:
            raise DimensionError("sinogram geometry does not match the given geometry")
        geom, data = sin.geometry, sin.data
    else:
        if geom is None:
            raise DimensionError("a raw sinogram array needs a geometry")
        data = np.asarray(sin, dtype=np.float64)
        if data.shape != geom.shape:
            raise DimensionError(f"sinogram shape {data.shape} != {geom.shape}")
    m = geom.image_size
    a, b, w, use_t = _ray_tables(geom)
    acc = np.zeros((m, m))
    acc_t = np.zeros((m, m))
    _joseph_backward(np.ascontiguousarray(data.T), a, b, w, use_t, geom.bin_centers, acc, acc_t)
    return acc + acc_t.T


class Projector:
    """Array-level ``A`` / ``A^T`` for one geometry (used inside solvers)."""

    def __init__(self, geom):
        self.geometry = geom
        self._tables = _ray_tables(geom)
        self._s = geom.bin_centers

    def forward(self, img):
        m = self.geometry.image_size
        if img.shape != (m, m):
            raise DimensionError(f"image shape {img.shape} != ({m}, {m})")
        a, b, w, use_t = self._tables
        out = np.zeros((self.geometry.n_angles, self.geometry.n_bins))
        _joseph_forward(np.ascontiguousarray(img), np.ascontiguousarray(img.T),
                        a, b, w, use_t, self._s, out)
        return out.T

    def adjoint(self, data):
        m = self.geometry.image_size
        a, b, w, use_t = self._tables
        acc = np.zeros((m, m))
        acc_t = np.zeros((m, m))
        _joseph_backward(np.ascontiguousarray(data.T), a, b, w, use_t, self._s, acc, acc_t)
        return acc + acc_t.T


def power_norm(op, adj, x0, iters=100):
    """Power-iteration estimate of the spectral norm of a linear map.

    ``op`` maps a primal array to a list of arrays; ``adj`` is its adjoint.
    The returned value is ``|op(x_k)|`` for the normalised iterate ``x_k``,
    which is nondecreasing in ``iters``.
    """
    if iters < 1:
        raise ParamError("iters must be >= 1")
    x = np.asarray(x0, dtype=np.float64)
    x = x / np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = op(x)
        est = math.sqrt(sum(float(np.vdot(b, b)) for b in y))
        x = adj(y)
        nx = np.linalg.norm(x)
        if nx == 0:
            return 0.0
        x = x / nx
    y = op(x)
    return max(est, math.sqrt(sum(float(np.vdot(b, b)) for b in y)))


def operator_norm_estimate(geom, iters=50, gradient_weight=None, seed=0, x0=None):
    """Estimate ``||A||_2`` by power iteration.

    With ``gradient_weight=c`` the stacked operator ``[A; c * grad]`` is
    estimated instead.  ``x0`` overrides the seeded random start vector.
    """
    from .diffops import gradient, divergence

    proj = Projector(geom)
    m = geom.image_size
    if x0 is None:
        x0 = np.random.default_rng(seed).standard_normal((m, m))
    if gradient_weight is None:
        return power_norm(lambda x: [proj.forward(x)], lambda y: proj.adjoint(y[0]), x0, iters)
    c = float(gradient_weight)
    return power_norm(
        lambda x: [proj.forward(x), c * gradient(x)],
        lambda y: proj.adjoint(y[0]) - c * divergence(y[1]),
        x0, iters)
