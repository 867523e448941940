"""Command-line interface.

Subcommands: ``generate`` (dataset files), ``estimate`` (one instance,
per-layer NMSE), ``se`` (analytic trajectory), ``sweep`` and ``se-compare``
(CSV experiment grids).  Exit codes: 0 success, 2 configuration error,
3 runtime numeric error.
"""

import argparse
import sys

from . import bench
from .channel import generate_dataset, save_dataset
from .errors import ConfigurationError, NumericError


def _add_common(parser, trials=True):
    parser.add_argument("--m", type=int, default=64)
    parser.add_argument("--n", type=int, default=64)
    parser.add_argument("--paths", type=int, default=4, help="number of channel paths")
    parser.add_argument("--delta", type=float, nargs="+", default=[0.1],
                        help="measurement ratio(s) K/MN")
    parser.add_argument("--snr-db", type=float, nargs="+", default=[10.0])
    parser.add_argument("--layers", type=int, default=10)
    parser.add_argument("--denoiser", nargs="+", default=["soft"],
                        choices=list(bench.DENOISER_NAMES))
    parser.add_argument("--weights", default=None, help="DNCW weight file for dncnn")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--soft-lambda", type=float, default=None,
                        help="soft-threshold multiplier (default: tuned value)")
    parser.add_argument("--se-trials", type=int, default=50,
                        help="Monte-Carlo draws per SE update")
    parser.add_argument("--nmse-denominator", choices=["estimate", "truth"],
                        default="estimate")
    if trials:
        parser.add_argument("--trials", type=int, default=1)


def _config_from(args, trials=None):
    kwargs = dict(m=args.m, n=args.n, num_paths=args.paths,
                  deltas=tuple(args.delta), snr_dbs=tuple(args.snr_db),
                  denoisers=tuple(args.denoiser), weights_path=args.weights,
                  layers=args.layers, seed=args.seed,
                  nmse_denominator=args.nmse_denominator,
                  se_trials=args.se_trials,
                  out_path=getattr(args, "out", None))
    if args.soft_lambda is not None:
        kwargs["soft_lambda"] = args.soft_lambda
    if trials is not None:
        kwargs["trials"] = trials
    return bench.ExperimentConfig(**kwargs)


def build_parser():
    parser = argparse.ArgumentParser(prog="beamspace",
                                     description="Beamspace channel estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a channel dataset file")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--paths", type=int, default=4)
    gen.add_argument("--m", type=int, default=64)
    gen.add_argument("--n", type=int, default=64)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    est = sub.add_parser("estimate", help="recover one instance, print per-layer NMSE")
    _add_common(est, trials=False)
    est.add_argument("--verbose", "-v", action="store_true",
                     help="print both NMSE denominator conventions")

    se = sub.add_parser("se", help="print the state-evolution trajectory")
    _add_common(se, trials=False)

    sweep = sub.add_parser("sweep", help="NMSE grid over delta/SNR/denoiser, to CSV")
    _add_common(sweep)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--verbose", "-v", action="store_true")

    cmp_ = sub.add_parser("se-compare", help="paired SE and simulated curves, to CSV")
    _add_common(cmp_)
    cmp_.add_argument("--out", required=True)

    return parser


def _fmt_db(ratio):
    return f"{bench.nmse_db(ratio):9.3f} dB" if ratio is not None else "  undefined"


def _cmd_generate(args):
    dataset = generate_dataset(args.count, args.paths, args.m, args.n, args.seed)
    save_dataset(dataset, args.out)
    print(f"wrote {dataset.count} samples of {dataset.m}x{dataset.n} to {args.out}")
    return 0


def _cmd_estimate(args):
    cfg = _config_from(args, trials=1)
    traj, _, _ = bench.run_estimate(cfg)
    mode = cfg.nmse_denominator
    for rec in traj.records:
        ratio = rec.nmse_estimate if mode == "estimate" else rec.nmse_truth
        line = f"layer {rec.layer:2d}  sigma_hat {rec.sigma_hat:8.4f}  NMSE {_fmt_db(ratio)}"
        if args.verbose:
            line += (f"  [estimate {_fmt_db(rec.nmse_estimate)},"
                     f" truth {_fmt_db(rec.nmse_truth)}]")
        print(line)
    return 0


def _cmd_se(args):
    cfg = _config_from(args, trials=1)
    traj = bench.run_se_trajectory(cfg)
    for layer, (theta, se_sq) in enumerate(zip(traj.theta, traj.sigma_e_sq)):
        print(f"layer {layer:2d}  theta {theta:10.6f}  sigma_e^2 {se_sq:10.6f}"
              f"  predicted NMSE {bench.nmse_db(theta / traj.theta[0]):9.3f} dB")
    return 0


def _cmd_sweep(args):
    cfg = _config_from(args)
    result = bench.run_sweep(cfg)
    if args.verbose and result.excluded_trials:
        print(f"excluded {result.excluded_trials} undefined zero-estimate ratios",
              file=sys.stderr)
    print(f"wrote {len(result.rows)} rows to {cfg.out_path}")
    return 0


def _cmd_se_compare(args):
    cfg = _config_from(args)
    result = bench.run_se_compare(cfg)
    print(f"wrote {len(result.rows)} rows to {cfg.out_path}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "estimate": _cmd_estimate,
    "se": _cmd_se,
    "sweep": _cmd_sweep,
    "se-compare": _cmd_se_compare,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
