"""Desk-scale experiment protocols shared by the CLI sweeps, demos and
acceptance tests.

All experiments start from a :class:`Scenario`: a procedural phantom, its
parallel-beam sinogram and seeded relative noise.  Regularisation weights
are in pixel units (unit pixels, unit detector bins, squared fidelity); see
``DEFAULT_*`` below for values tuned on the 256 / 171-angle scenario.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace

import numpy as np

from .decompose import DecompParams, decompose
from .diffops import DtvParams
from .direction import estimate_direction
from .errors import ParamError
from .fbp import FbpConfig, fbp_reconstruct
from .geometry import forward_project, parallel_geometry
from .metrics import edge_energy_ratio, mask_mean_ratio, psnr
from .phantom import NoiseSpec, PhantomSpec, add_noise, crack_mask, make_phantom, support_mask
from .reconstruct import reconstruct
from .solver import SolveConfig
from .split import SplitParams, SplitSpec, split_fbp, split_variational

__all__ = [
    "Scenario", "ScenarioData", "make_scenario", "noise_sweep", "noise_table",
    "crack_fraction", "k_sweep", "lambda_search", "method_comparison", "write_table",
    "decomposition_run", "EDGE_MARGIN", "DEFAULT_TV_GRID", "DEFAULT_DTV_GRID", "DEFAULT_SPLIT_PARAMS",
    "DEFAULT_DECOMP_PARAMS", "NOISE_LEVELS",
]

# pixels trimmed off the support so the disk rim does not count as an edge
EDGE_MARGIN = 4.0
NOISE_LEVELS = (0.0, 0.01, 0.03, 0.05, 0.10, 0.20, 0.30, 0.40)
DEFAULT_TV_GRID = (3.0, 10.0, 30.0)
DEFAULT_DTV_GRID = (3.0, 10.0, 30.0)
DEFAULT_SPLIT_PARAMS = dict(lam_u=10.0, lam_v=10.0, beta=0.1)
DEFAULT_DECOMP_PARAMS = dict(lam=3.0, beta=0.1)


@dataclass(frozen=True)
class Scenario:
    """Phantom + geometry + noise recipe (256 px, 171 angles, 1 % noise by default)."""

    size: int = 256
    n_angles: int = 171
    kind: str = "fibre-crack"
    angle_deg: float = 20.0
    noise: float = 0.01
    phantom_seed: int = 0
    noise_seed: int = 1

    @property
    def phantom_spec(self):
        return PhantomSpec(size=self.size, kind=self.kind, main_angle_deg=self.angle_deg,
                           seed=self.phantom_seed)


@dataclass(frozen=True)
class ScenarioData:
    scenario: Scenario
    truth: np.ndarray
    clean: object
    noisy: object
    crack: np.ndarray
    fibre_only: np.ndarray


def make_scenario(sc=None):
    """Build phantom, clean and noisy sinograms, crack mask and the crack-free phantom."""
    sc = sc or Scenario()
    spec = sc.phantom_spec
    truth = make_phantom(spec)
    geom = parallel_geometry(sc.size, sc.n_angles)
    clean = forward_project(truth, geom)
    noisy = add_noise(clean, NoiseSpec(sc.noise, sc.noise_seed))
    fibre_only = make_phantom(replace(spec, kind="fibre"))
    return ScenarioData(sc, truth, clean, noisy, crack_mask(spec), fibre_only)


def noise_sweep(levels=NOISE_LEVELS, seeds=range(20), size=256, n_angles=171,
                angle_deg=20.0, phantom_seed=0):
    """Direction estimates on the fibre phantom over noise levels and noise seeds.

    One row per ``(eta, seed)`` with the estimate, its error and whether it
    lies within one angular grid step of the true angle.
    """
    truth = make_phantom(PhantomSpec(size=size, kind="fibre", main_angle_deg=angle_deg,
                                     seed=phantom_seed))
    clean = forward_project(truth, parallel_geometry(size, n_angles))
    step = 180.0 / n_angles
    rows = []
    for eta in levels:
        for seed in seeds:
            est = estimate_direction(add_noise(clean, NoiseSpec(eta, seed)))
            err = abs((est.theta_deg - angle_deg + 90.0) % 180.0 - 90.0)
            rows.append({"eta": eta, "seed": seed, "theta_hat": est.theta_deg,
                         "error_deg": err, "within_step": err <= step + 1e-9})
    return rows


def noise_table(rows):
    """Collapse :func:`noise_sweep` rows into one line per noise level."""
    out = []
    for eta in sorted({r["eta"] for r in rows}):
        sel = [r for r in rows if r["eta"] == eta]
        est = np.array([r["theta_hat"] for r in sel])
        out.append({"eta": eta, "runs": len(sel),
                    "hits": sum(r["within_step"] for r in sel),
                    "theta_median": float(np.median(est)),
                    "theta_seed0": sel[0]["theta_hat"]})
    return out


def crack_fraction(img, fibre_only, crack):
    """Share of the crack dent present in ``img``.

    Inside the crack mask the crack-free phantom holds fibre intensity and
    the true object holds zero; 0 means ``img`` shows no crack there, 1
    means it shows the full crack.
    """
    ref = fibre_only[crack]
    return float((ref - img[crack]).mean() / ref.mean())


def k_sweep(data, Ks=(2, 10, 40), method="variational", params=None, theta_deg=None,
            a=0.15, cfg=None, fbp_cfg=None):
    """Sinogram splitting for several range widths ``K``.

    Reports, per ``K``, the crack capture ratio of ``v`` (mean ``|v|`` in the
    crack mask over the mean elsewhere in the support), the crack-edge ratio
    of ``v`` (see :func:`~dtvtomo.metrics.edge_energy_ratio`, rim excluded),
    the crack fraction carried by ``u`` and solver iterations.
    """
    sin = data.noisy
    if theta_deg is None:
        est = estimate_direction(sin)
        main_index = est.argmax_index
    else:
        main_index = int(np.argmin(np.abs(np.array(sin.geometry.angles) - theta_deg)))
    theta = sin.geometry.angles[main_index]
    support = support_mask(data.scenario.size)
    interior = support_mask(data.scenario.size, margin=EDGE_MARGIN)
    rows = []
    for K in Ks:
        spec = SplitSpec(main_index=main_index, K=int(K))
        t0 = time.perf_counter()
        if method == "fbp":
            res = split_fbp(sin, spec, fbp_cfg)
            its = 0
        elif method == "variational":
            sp = SplitParams(dtv=DtvParams(theta, a), **(params or DEFAULT_SPLIT_PARAMS))
            res = split_variational(sin, spec, sp, cfg)
            its = res.reports["u"].iterations + res.reports["v"].iterations
        else:
            raise ParamError(f"unknown split method {method!r}")
        rows.append({
            "K": int(K), "method": method, "theta_deg": theta,
            "crack_capture_v": mask_mean_ratio(res.v, data.crack, support),
            "crack_edges_v": edge_energy_ratio(res.v, data.crack, interior),
            "crack_fraction_u": crack_fraction(res.u, data.fibre_only, data.crack),
            "iterations": its, "wall_seconds": time.perf_counter() - t0,
        })
    return rows


def lambda_search(sin, truth, reg, lams, params=None, cfg=None, nonneg=False):
    """Reconstruct for each ``lam`` and keep the PSNR-best.

    ``lams`` are visited in descending order and each solve is warm-started
    from the previous solution.  Returns ``(best_row, best_image, rows)``.
    """
    rows, best, best_x, x_prev = [], None, None, None
    for lam in sorted(lams, reverse=True):
        t0 = time.perf_counter()
        x, rep = reconstruct(sin, reg, lam, params, nonneg=nonneg, cfg=cfg, x0=x_prev)
        row = {"method": reg, "lam": lam, "psnr": psnr(x, truth),
               "iterations": rep.iterations, "converged": rep.converged,
               "wall_seconds": time.perf_counter() - t0}
        rows.append(row)
        if best is None or row["psnr"] > best["psnr"]:
            best, best_x = row, x
        x_prev = x
    return best, best_x, rows


def method_comparison(sin, truth, tv_grid=DEFAULT_TV_GRID, dtv_grid=DEFAULT_DTV_GRID,
                      theta_deg=None, a=0.15, cfg=None, fbp_cfg=None):
    """FBP against PSNR-tuned TV and DTV on one sinogram.

    Returns ``(summary, all_rows)`` where ``summary`` maps method name to its
    best row.
    """
    if theta_deg is None:
        theta_deg = estimate_direction(sin).theta_deg
    t0 = time.perf_counter()
    x_fbp = fbp_reconstruct(sin, fbp_cfg or FbpConfig())
    fbp_row = {"method": "fbp", "lam": 0.0, "psnr": psnr(x_fbp, truth), "iterations": 0,
               "converged": True, "wall_seconds": time.perf_counter() - t0}
    tv_best, _, tv_rows = lambda_search(sin, truth, "tv", tv_grid, cfg=cfg)
    dtv_best, _, dtv_rows = lambda_search(sin, truth, "dtv", dtv_grid,
                                          DtvParams(theta_deg, a), cfg=cfg)
    summary = {"fbp": fbp_row, "tv": tv_best, "dtv": dtv_best}
    return summary, [fbp_row] + tv_rows + dtv_rows


def decomposition_run(data, p, cfg=None, init=None):
    """:func:`decompose` on a scenario with the standard scores attached."""
    t0 = time.perf_counter()
    u, v, rep = decompose(data.noisy, p, cfg, init)
    support = support_mask(data.scenario.size)
    interior = support_mask(data.scenario.size, margin=EDGE_MARGIN)
    return u, v, {
        "lam": p.lam, "alpha": p.alpha, "beta": p.beta,
        "psnr": psnr(u + v, data.truth),
        "crack_capture_v": mask_mean_ratio(v, data.crack, support),
        "crack_edges_v": edge_energy_ratio(v, data.crack, interior),
        "crack_fraction_u": crack_fraction(u, data.fibre_only, data.crack),
        "iterations": rep.iterations, "converged": rep.converged,
        "wall_seconds": time.perf_counter() - t0,
    }


def write_table(path, rows, fields=None):
    """Write dict rows as CSV (LF line endings), columns in ``fields`` order."""
    rows = list(rows)
    fields = list(fields or (rows[0].keys() if rows else ()))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)
