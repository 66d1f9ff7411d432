"""Binary image / sinogram files, metric CSV tables and PGM previews.

Layouts (all little-endian):

``TIM1`` image
    ``b"TIM1"``, ``u32 M``, ``M*M float32`` row-major.
``TSG1`` sinogram
    ``b"TSG1"``, ``u32 n_bins``, ``u32 n_angles``, ``f64 det_spacing``,
    ``n_angles f64`` angles in degrees, then ``n_bins*n_angles float32``
    values angle-major (all bins of angle 0 first).

Values are stored as float32; a round trip reproduces ``data.astype(float32)``
bit for bit.
"""

from __future__ import annotations

import csv
import math
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .geometry import Geometry, Sinogram
from .metrics import MetricRow

__all__ = [
    "write_image", "read_image", "write_sinogram", "read_sinogram",
    "write_metrics", "read_metrics", "write_pgm", "MAX_DIM",
]

IMAGE_MAGIC = b"TIM1"
SINO_MAGIC = b"TSG1"
MAX_DIM = 1 << 16
_F32 = np.dtype("<f4")
_F64 = np.dtype("<f8")


def write_image(path, img):
    img = np.asarray(img)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise FormatError(f"TIM1 stores square images, got shape {img.shape}")
    with open(path, "wb") as fh:
        fh.write(IMAGE_MAGIC)
        fh.write(struct.pack("<I", img.shape[0]))
        fh.write(np.ascontiguousarray(img, dtype=_F32).tobytes())


def _read_exact(fh, n, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated file while reading {what}")
    return buf


def read_image(path):
    """Read a TIM1 file into a float64 ``(M, M)`` array."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != IMAGE_MAGIC:
            raise FormatError(f"{path}: not a TIM1 image")
        (m,) = struct.unpack("<I", _read_exact(fh, 4, "size"))
        if not 0 < m <= MAX_DIM:
            raise FormatError(f"{path}: image size {m} out of range")
        data = np.frombuffer(_read_exact(fh, 4 * m * m, "pixels"), dtype=_F32)
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after image payload")
    return data.reshape(m, m).astype(np.float64)


def write_sinogram(path, sin):
    geom = sin.geometry
    with open(path, "wb") as fh:
        fh.write(SINO_MAGIC)
        fh.write(struct.pack("<IId", geom.n_bins, geom.n_angles, geom.det_spacing))
        fh.write(np.asarray(geom.angles, dtype=_F64).tobytes())
        fh.write(np.ascontiguousarray(sin.data.T, dtype=_F32).tobytes())


def read_sinogram(path, image_size=None):
    """Read a TSG1 file.  ``image_size`` defaults to the number of bins."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != SINO_MAGIC:
            raise FormatError(f"{path}: not a TSG1 sinogram")
        n_bins, n_angles, spacing = struct.unpack("<IId", _read_exact(fh, 16, "header"))
        if not (0 < n_bins <= MAX_DIM and 0 < n_angles <= MAX_DIM):
            raise FormatError(f"{path}: dimensions {n_bins}x{n_angles} out of range")
        if not (math.isfinite(spacing) and spacing > 0):
            raise FormatError(f"{path}: bad detector spacing {spacing}")
        angles = np.frombuffer(_read_exact(fh, 8 * n_angles, "angles"), dtype=_F64)
        data = np.frombuffer(_read_exact(fh, 4 * n_bins * n_angles, "values"), dtype=_F32)
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after sinogram payload")
    try:
        geom = Geometry(n_bins=n_bins, angles=tuple(angles.tolist()),
                        image_size=n_bins if image_size is None else image_size,
                        det_spacing=spacing)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return Sinogram(geom, data.reshape(n_angles, n_bins).T.astype(np.float64))


METRIC_FIELDS = ("method", "params", "psnr_db", "iterations", "wall_seconds")


def _fmt_psnr(v):
    return "inf" if math.isinf(v) else repr(float(v))


def write_metrics(path, rows, append=False):
    """Write :class:`MetricRow` objects as CSV (header only when creating the file)."""
    path = Path(path)
    new = not (append and path.exists() and path.stat().st_size > 0)
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(METRIC_FIELDS)
        for r in rows:
            w.writerow([r.method, r.params, _fmt_psnr(r.psnr_db), int(r.iterations),
                        f"{r.wall_seconds:.3f}"])


def read_metrics(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != METRIC_FIELDS:
            raise FormatError(f"{path}: unexpected metrics header {reader.fieldnames}")
        return [MetricRow(r["method"], r["params"], float(r["psnr_db"]),
                          int(r["iterations"]), float(r["wall_seconds"])) for r in reader]


def write_pgm(path, img):
    """8-bit binary PGM, linearly mapped from the image's [min, max]."""
    img = np.asarray(img, dtype=np.float64)
    lo, hi = float(img.min()), float(img.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    pix = np.clip(np.rint((img - lo) * scale), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(pix.tobytes())
