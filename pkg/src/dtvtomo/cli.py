"""Command-line front end.

Every subcommand accepts ``--config FILE`` (flat ``key=value`` lines, keys are
the long option names with ``-`` or ``_``) and explicit flags override it.
Each run writes a manifest of the resolved parameters in the same
``key=value`` format, so ``--config run.manifest`` replays the run.

Exit codes: 0 success, 2 usage / parameter error, 3 file format or I/O
error, 4 numerical failure (solver divergence).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .decompose import SWEEP_BETA, DecompParams, alpha_sweep, decompose
from .diffops import DtvParams
from .direction import estimate_direction
from .errors import (DimensionError, DivergenceError, EmptyDataError, FormatError,
                     ParamError)
from .experiments import (DEFAULT_SPLIT_PARAMS, NOISE_LEVELS, Scenario, k_sweep,
                          make_scenario, noise_sweep, noise_table, write_table)
from .fbp import FbpConfig, fbp_reconstruct
from .fileio import (read_image, read_sinogram, write_image, write_metrics, write_pgm,
                     write_sinogram)
from .geometry import forward_project, parallel_geometry
from .metrics import MetricRow, format_params, psnr
from .phantom import NoiseSpec, PhantomSpec, add_noise, crack_mask, make_phantom
from .reconstruct import reconstruct
from .solver import SolveConfig
from .split import SplitParams, SplitSpec, split_fbp, split_variational

log = logging.getLogger("dtvtomo")

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_NUMERIC = 0, 2, 3, 4

# manifest / config keys that are not parameters
_SKIP_KEYS = {"config", "func", "verbose", "manifest", "command"}


class UsageError(Exception):
    pass


def read_config(path):
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def write_manifest(path, command, args):
    keys = sorted(k for k in vars(args) if k not in _SKIP_KEYS)
    lines = [f"command={command}", f"version={__version__}"]
    lines += [f"{k}={_fmt(getattr(args, k))}" for k in keys]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    if v is None:
        return ""
    return str(v)


def _floats(text):
    return [float(s) for s in str(text).split(",") if s.strip()]


def _ints(text):
    return [int(s) for s in str(text).split(",") if s.strip()]


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + n.replace("_", "-") for n in missing))


# ---------------------------------------------------------------- options

def _add_common(p, output=True):
    p.add_argument("--config", help="key=value file with defaults for any option")
    p.add_argument("--manifest", help="manifest path (default: <output>.manifest)")
    if output:
        p.add_argument("-o", "--output", help="output path")


def _add_input(p):
    p.add_argument("-i", "--input", help="input file")


def _add_solver(p):
    g = p.add_argument_group("solver")
    g.add_argument("--tol", type=float, default=1e-5, help="relative objective change (1e-5)")
    g.add_argument("--max-iters", type=int, default=5000)
    g.add_argument("--check-every", type=int, default=10)


def _add_metrics(p):
    g = p.add_argument_group("metrics")
    g.add_argument("--truth", help="ground-truth TIM1 image for PSNR")
    g.add_argument("--metrics", help="append a metrics row to this CSV")
    g.add_argument("--no-timing", type=_bool, nargs="?", const=True, default=False,
                   help="record wall_seconds as 0 so repeated runs give identical files")
    g.add_argument("--pgm", type=_bool, nargs="?", const=True, default=False,
                   help="also write 8-bit PGM previews")


def _add_scenario(p):
    g = p.add_argument_group("scenario")
    g.add_argument("--size", type=int, default=256)
    g.add_argument("--nangles", type=int, default=171)
    g.add_argument("--kind", choices=("fibre", "fibre-crack"), default="fibre-crack")
    g.add_argument("--angle", type=float, default=20.0, help="true main direction (deg)")
    g.add_argument("--noise", type=float, default=0.01, help="relative noise level")
    g.add_argument("--seed", type=int, default=0, help="phantom seed")
    g.add_argument("--noise-seed", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dtvtomo",
        description="Directional-TV tomography: phantoms, projection, FBP, TV/DTV "
                    "reconstruction and fibre/crack decomposition.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("phantom", help="generate a fibre / fibre-crack phantom (TIM1)")
    _add_common(p)
    p.add_argument("--kind", choices=("fibre", "fibre-crack"), default="fibre")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--angle", type=float, default=20.0, help="stripe direction in degrees")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-stripes", type=int, default=None)
    p.add_argument("--crack-count", type=int, default=12)
    p.add_argument("--crack-width", type=float, default=3.0)
    p.add_argument("--pgm", type=_bool, nargs="?", const=True, default=False)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("project", help="parallel-beam forward projection (TIM1 -> TSG1)")
    _add_common(p)
    _add_input(p)
    p.add_argument("--bins", type=int, default=None, help="detector bins (default: image size)")
    p.add_argument("--nangles", type=int, default=None, help="angles on [0,180) (default: size)")
    p.add_argument("--det-spacing", type=float, default=1.0)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("noise", help="add relative Gaussian noise to a sinogram")
    _add_common(p)
    _add_input(p)
    p.add_argument("--level", type=float, default=0.01, help="|e| / |b|")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("estimate-direction", help="main direction from sinogram data")
    _add_common(p, output=False)
    _add_input(p)
    p.add_argument("--scores", help="write per-angle scores to this CSV")
    p.add_argument("--include-dc", type=_bool, nargs="?", const=True, default=False)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("fbp", help="filtered back-projection")
    _add_common(p)
    _add_input(p)
    p.add_argument("--filter", choices=("ram-lak", "shepp-logan"), default="ram-lak")
    p.add_argument("--pad", type=int, default=2, help="zero-padding factor (1, 2 or 4)")
    _add_metrics(p)
    p.set_defaults(func=cmd_fbp)

    p = sub.add_parser("reconstruct", help="TV / DTV regularised reconstruction")
    _add_common(p)
    _add_input(p)
    p.add_argument("--reg", choices=("tv", "dtv"), default="dtv")
    p.add_argument("--lambda", dest="lam", type=float, default=10.0)
    p.add_argument("--theta", type=float, default=None,
                   help="DTV direction (default: estimated from the data)")
    p.add_argument("--a", type=float, default=0.15, help="DTV width in (0, 1]")
    p.add_argument("--nonneg", type=_bool, nargs="?", const=True, default=False)
    _add_solver(p)
    _add_metrics(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("split", help="sinogram splitting into fibre (u) and crack (v) parts")
    _add_common(p)
    _add_input(p)
    p.add_argument("--K", type=int, default=10, help="even range width")
    p.add_argument("--method", choices=("fbp", "variational"), default="variational")
    p.add_argument("--theta", type=float, default=None,
                   help="main direction (default: estimated from the data)")
    p.add_argument("--lambda-u", type=float, default=DEFAULT_SPLIT_PARAMS["lam_u"])
    p.add_argument("--lambda-v", type=float, default=DEFAULT_SPLIT_PARAMS["lam_v"])
    p.add_argument("--beta", type=float, default=DEFAULT_SPLIT_PARAMS["beta"])
    p.add_argument("--a", type=float, default=0.15)
    p.add_argument("--filter", choices=("ram-lak", "shepp-logan"), default="ram-lak")
    _add_solver(p)
    _add_metrics(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("decompose", help="joint DTV-decomposition into u (fibres) and v (cracks)")
    _add_common(p)
    _add_input(p)
    _add_decomp(p, beta=1e-4)
    _add_solver(p)
    _add_metrics(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sweep-alpha", help="decomposition over a list of alpha values")
    _add_common(p)
    _add_scenario(p)
    _add_decomp(p, beta=SWEEP_BETA)
    p.add_argument("--alphas", default="0.3,0.7,1.5")
    _add_solver(p)
    p.set_defaults(func=cmd_sweep_alpha)

    p = sub.add_parser("sweep-K", help="sinogram splitting over a list of K values")
    _add_common(p)
    _add_scenario(p)
    p.add_argument("--Ks", default="2,10,40")
    p.add_argument("--method", choices=("fbp", "variational"), default="variational")
    p.add_argument("--lambda-u", type=float, default=DEFAULT_SPLIT_PARAMS["lam_u"])
    p.add_argument("--lambda-v", type=float, default=DEFAULT_SPLIT_PARAMS["lam_v"])
    p.add_argument("--beta", type=float, default=DEFAULT_SPLIT_PARAMS["beta"])
    p.add_argument("--a", type=float, default=0.15)
    _add_solver(p)
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("sweep-noise", help="direction-estimation robustness over noise levels")
    _add_common(p)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--nangles", type=int, default=171)
    p.add_argument("--angle", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0, help="phantom seed")
    p.add_argument("--levels", default=",".join(str(x) for x in NOISE_LEVELS))
    p.add_argument("--runs", type=int, default=20, help="noise seeds 0..runs-1 per level")
    p.add_argument("--detail", help="also write one row per (level, seed) here")
    p.set_defaults(func=cmd_sweep_noise)
    return parser


def _add_decomp(p, beta):
    g = p.add_argument_group("decomposition")
    g.add_argument("--lambda", dest="lam", type=float, default=0.0038)
    g.add_argument("--alpha", type=float, default=0.7)
    g.add_argument("--beta", type=float, default=beta)
    g.add_argument("--theta", type=float, default=None,
                   help="main direction (default: estimated from the data)")
    g.add_argument("--a-u", type=float, default=0.15)
    g.add_argument("--a-v", type=float, default=0.5)


# ---------------------------------------------------------------- helpers

def _solve_cfg(args):
    return SolveConfig(tol=args.tol, max_iters=args.max_iters, check_every=args.check_every)


def _seconds(args, t0):
    return 0.0 if args.no_timing else time.perf_counter() - t0


def _theta(args, sin):
    if args.theta is not None:
        return float(args.theta)
    est = estimate_direction(sin)
    log.info("estimated main direction %.4g deg", est.theta_deg)
    args.theta = est.theta_deg
    return est.theta_deg


def _save_image(args, path, img):
    write_image(path, img)
    if args.pgm:
        write_pgm(str(path) + ".pgm", img)


def _record(args, method, params, img, iterations, seconds):
    """PSNR against ``--truth`` and optional metrics row."""
    value = math.nan
    if args.truth:
        value = psnr(img, read_image(args.truth))
        print(f"{method}: psnr {value:.4f} dB")
    if args.metrics:
        write_metrics(args.metrics, [MetricRow(method, params, value, iterations, seconds)],
                      append=True)
    return value


# ---------------------------------------------------------------- commands

def cmd_phantom(args):
    _need(args, "output")
    spec = PhantomSpec(size=args.size, kind=args.kind, main_angle_deg=args.angle,
                       n_stripes=args.n_stripes, crack_count=args.crack_count,
                       crack_width_px=args.crack_width, seed=args.seed)
    img = make_phantom(spec)
    write_image(args.output, img)
    if args.pgm:
        write_pgm(args.output + ".pgm", img)
        if spec.kind == "fibre-crack":
            write_pgm(args.output + ".cracks.pgm", crack_mask(spec).astype(float))
    return args.output


def cmd_project(args):
    _need(args, "input", "output")
    img = read_image(args.input)
    geom = parallel_geometry(img.shape[0], args.nangles, args.bins, args.det_spacing)
    write_sinogram(args.output, forward_project(img, geom))
    return args.output


def cmd_noise(args):
    _need(args, "input", "output")
    write_sinogram(args.output, add_noise(read_sinogram(args.input),
                                          NoiseSpec(args.level, args.seed)))
    return args.output


def cmd_estimate(args):
    _need(args, "input")
    sin = read_sinogram(args.input)
    est = estimate_direction(sin, include_dc=args.include_dc)
    print(f"theta_deg={est.theta_deg:.10g} index={est.argmax_index}")
    if args.scores:
        write_table(args.scores, ({"index": k, "angle_deg": a, "score": repr(float(s))}
                                  for k, (a, s) in enumerate(zip(sin.geometry.angles,
                                                                 est.scores))))
    return args.scores or args.input


def cmd_fbp(args):
    _need(args, "input", "output")
    sin = read_sinogram(args.input)
    t0 = time.perf_counter()
    img = fbp_reconstruct(sin, FbpConfig(filter=args.filter, pad_factor=args.pad))
    secs = _seconds(args, t0)
    _save_image(args, args.output, img)
    _record(args, "fbp", format_params(filter=args.filter, pad=args.pad), img, 0, secs)
    return args.output


def cmd_reconstruct(args):
    _need(args, "input", "output")
    sin = read_sinogram(args.input)
    params = DtvParams(_theta(args, sin), args.a) if args.reg == "dtv" else None
    t0 = time.perf_counter()
    img, rep = reconstruct(sin, args.reg, args.lam, params, nonneg=args.nonneg,
                           cfg=_solve_cfg(args))
    secs = _seconds(args, t0)
    _report(rep)
    _save_image(args, args.output, img)
    kw = dict(lam=args.lam, nonneg=args.nonneg)
    if params is not None:
        kw.update(theta=params.theta_deg, a=params.a)
    _record(args, args.reg, format_params(**kw), img, rep.iterations, secs)
    return args.output


def _report(rep):
    print(f"iterations={rep.iterations} converged={rep.converged} "
          f"rel_change={rep.rel_change:.3g} objective={rep.objective:.10g}")


def _prefix_paths(output, *parts):
    base = str(output)
    for ext in (".tim",):
        if base.endswith(ext):
            base = base[: -len(ext)]
    return [f"{base}.{p}.tim" for p in parts]


def cmd_split(args):
    _need(args, "input", "output")
    sin = read_sinogram(args.input)
    theta = _theta(args, sin)
    idx = int(np.argmin(np.abs(np.array(sin.geometry.angles) - theta)))
    spec = SplitSpec(main_index=idx, K=args.K)
    t0 = time.perf_counter()
    if args.method == "fbp":
        res = split_fbp(sin, spec, FbpConfig(filter=args.filter))
        its = 0
    else:
        sp = SplitParams(args.lambda_u, args.lambda_v, args.beta, DtvParams(theta, args.a))
        res = split_variational(sin, spec, sp, _solve_cfg(args))
        for name in ("u", "v"):
            print(name, end=": ")
            _report(res.reports[name])
        its = res.reports["u"].iterations + res.reports["v"].iterations
    secs = _seconds(args, t0)
    pu, pv = _prefix_paths(args.output, "u", "v")
    _save_image(args, pu, res.u)
    _save_image(args, pv, res.v)
    kw = dict(K=args.K, theta=theta)
    if args.method == "variational":
        kw.update(lam_u=args.lambda_u, lam_v=args.lambda_v, beta=args.beta, a=args.a)
    _record(args, "split-" + args.method, format_params(**kw), res.u + res.v, its, secs)
    return pu


def _decomp_params(args, theta):
    return DecompParams(lam=args.lam, alpha=args.alpha, theta_deg=theta,
                        a_u=args.a_u, a_v=args.a_v, beta=args.beta)


def cmd_decompose(args):
    _need(args, "input", "output")
    sin = read_sinogram(args.input)
    p = _decomp_params(args, _theta(args, sin))
    t0 = time.perf_counter()
    u, v, rep = decompose(sin, p, _solve_cfg(args))
    secs = _seconds(args, t0)
    _report(rep)
    pu, pv, ps = _prefix_paths(args.output, "u", "v", "sum")
    _save_image(args, pu, u)
    _save_image(args, pv, v)
    _save_image(args, ps, u + v)
    _record(args, "decompose",
            format_params(lam=p.lam, alpha=p.alpha, beta=p.beta, theta=p.theta_deg,
                          a_u=p.a_u, a_v=p.a_v),
            u + v, rep.iterations, secs)
    return pu


def _scenario(args):
    return make_scenario(Scenario(size=args.size, n_angles=args.nangles, kind=args.kind,
                                  angle_deg=args.angle, noise=args.noise,
                                  phantom_seed=args.seed, noise_seed=args.noise_seed))


def cmd_sweep_alpha(args):
    _need(args, "output")
    data = _scenario(args)
    p = _decomp_params(args, _theta(args, data.noisy))
    rows = alpha_sweep(data.noisy, p, _floats(args.alphas), data.truth, data.crack,
                       _solve_cfg(args), beta=args.beta)
    write_table(args.output, rows)
    for r in rows:
        print(f"alpha={r['alpha']:g} psnr={r['psnr']:.4f} capture={r['crack_capture']:.4g}")
    return args.output


def cmd_sweep_k(args):
    _need(args, "output")
    data = _scenario(args)
    params = dict(lam_u=args.lambda_u, lam_v=args.lambda_v, beta=args.beta)
    rows = k_sweep(data, _ints(args.Ks), args.method, params, a=args.a,
                   cfg=_solve_cfg(args))
    write_table(args.output, rows)
    for r in rows:
        print(f"K={r['K']} capture_v={r['crack_capture_v']:.4g} "
              f"crack_fraction_u={r['crack_fraction_u']:.4g}")
    return args.output


def cmd_sweep_noise(args):
    _need(args, "output")
    rows = noise_sweep(_floats(args.levels), range(args.runs), args.size, args.nangles,
                       args.angle, args.seed)
    table = noise_table(rows)
    write_table(args.output, table)
    if args.detail:
        write_table(args.detail, rows)
    for r in table:
        print(f"eta={r['eta']:g} theta={r['theta_seed0']:.4g} hits={r['hits']}/{r['runs']}")
    return args.output


# ---------------------------------------------------------------- entry

def _parse(parser, argv):
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        raise UsageError("no command given")
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        cmd = cfg.pop("command", args.command)
        if cmd != args.command:
            raise UsageError(f"config is for command {cmd!r}, not {args.command!r}")
        cfg.pop("version", None)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        # string defaults go through each option's type conversion; flags still win
        sub.set_defaults(**{k: v for k, v in cfg.items() if v != ""})
        args = parser.parse_args(argv)
    return args


def main(argv=None):
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"dtvtomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FormatError) as exc:
        print(f"dtvtomo: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        out = args.func(args)
    except UsageError as exc:
        print(f"dtvtomo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParamError, DimensionError, EmptyDataError) as exc:
        print(f"dtvtomo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"dtvtomo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (DivergenceError, FloatingPointError) as exc:
        print(f"dtvtomo {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    manifest = args.manifest or (f"{out}.manifest" if out else None)
    if manifest:
        write_manifest(manifest, args.command, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
