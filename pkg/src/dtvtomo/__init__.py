"""Directional-TV tomography: parallel-beam projection, FBP, TV/DTV
reconstruction by PDHG, main-direction estimation from sinograms, and two
fibre/crack decomposition methods (sinogram splitting, DTV-decomposition).
"""

from .decompose import DecompParams, alpha_sweep, decompose, validate_alpha
from .diffops import DtvParams, divergence, dtv, gradient, prox_dtv_dual, tv
from .direction import DirectionEstimate, estimate_direction
from .errors import (DimensionError, DivergenceError, DtvTomoError, EmptyDataError,
                     FormatError, ParamError)
from .fbp import FbpConfig, fbp_reconstruct
from .fileio import (read_image, read_metrics, read_sinogram, write_image,
                     write_metrics, write_pgm, write_sinogram)
from .geometry import (Geometry, Projector, Sinogram, back_project, forward_project,
                       operator_norm_estimate, parallel_geometry)
from .metrics import MetricRow, edge_energy_ratio, grow_mask, mask_mean_ratio, psnr
from .phantom import NoiseSpec, PhantomSpec, add_noise, crack_mask, make_phantom
from .reconstruct import reconstruct
from .solver import SolveConfig, SolveReport, pdhg_solve
from .split import SplitParams, SplitSpec, split_fbp, split_sinogram, split_variational

__version__ = "0.1.0"

__all__ = [
    "DecompParams", "alpha_sweep", "decompose", "validate_alpha",
    "DtvParams", "divergence", "dtv", "gradient", "prox_dtv_dual", "tv",
    "DirectionEstimate", "estimate_direction",
    "DimensionError", "DivergenceError", "DtvTomoError", "EmptyDataError",
    "FormatError", "ParamError",
    "FbpConfig", "fbp_reconstruct",
    "read_image", "read_metrics", "read_sinogram", "write_image", "write_metrics",
    "write_pgm", "write_sinogram",
    "Geometry", "Projector", "Sinogram", "back_project", "forward_project",
    "operator_norm_estimate", "parallel_geometry",
    "MetricRow", "edge_energy_ratio", "grow_mask", "mask_mean_ratio", "psnr",
    "NoiseSpec", "PhantomSpec", "add_noise", "crack_mask", "make_phantom",
    "reconstruct",
    "SolveConfig", "SolveReport", "pdhg_solve",
    "SplitParams", "SplitSpec", "split_fbp", "split_sinogram", "split_variational",
]
