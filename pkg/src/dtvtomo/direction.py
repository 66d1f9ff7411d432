"""Main-direction estimation straight from sinogram data.

Each projection column is Fourier transformed along the detector and the
magnitudes are summed.  Projections taken along the texture direction are
the most oscillatory, so their summed magnitude peaks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataError

__all__ = ["DirectionEstimate", "direction_scores", "estimate_direction"]


@dataclass(frozen=True)
class DirectionEstimate:
    theta_deg: float
    scores: np.ndarray
    argmax_index: int


def direction_scores(data, include_dc=False):
    """Summed DFT magnitude of every column of a ``(n_bins, n_angles)`` array."""
    mag = np.abs(np.fft.fft(np.asarray(data, dtype=np.float64), axis=0))
    if not include_dc:
        mag = mag[1:]
    return mag.sum(axis=0)


def estimate_direction(sin, include_dc=False):
    """Return the measured angle with the largest summed Fourier magnitude.

    The DC term is left out by default: it is the total mass of the
    projection, which is the same for every angle.  Ties go to the lowest
    angle index.
    """
    geom = sin.geometry
    if geom.n_angles < 1 or geom.n_bins < 2:
        raise EmptyDataError("direction estimation needs >= 1 angle and >= 2 bins")
    scores = direction_scores(sin.data, include_dc=include_dc)
    m = int(np.argmax(scores))
    return DirectionEstimate(theta_deg=geom.angles[m], scores=scores, argmax_index=m)
