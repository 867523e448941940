"""Command line: train a denoiser on BCHD datasets and export DNCW weights."""

import argparse
import sys

from .errors import ExportError, TrainingError
from .export import export_weights
from .training import TrainingConfig, train


def build_parser():
    parser = argparse.ArgumentParser(prog="dncnn-trainer")
    sub = parser.add_subparsers(dest="command", required=True)
    tr = sub.add_parser("train", help="train and export")
    tr.add_argument("--train", required=True, dest="train_path",
                    help="training dataset (BCHD)")
    tr.add_argument("--val", required=True, dest="val_path",
                    help="validation dataset (BCHD)")
    tr.add_argument("--depth", type=int, default=20)
    tr.add_argument("--width", type=int, default=64)
    tr.add_argument("--epochs", type=int, default=50)
    tr.add_argument("--batch-size", type=int, default=16)
    tr.add_argument("--noise-min", type=float, default=0.0)
    tr.add_argument("--noise-max", type=float, default=0.2)
    tr.add_argument("--patience", type=int, default=3)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--out", required=True, help="DNCW weight file to write")
    tr.add_argument("--fixture", default=None, help="DNPF parity fixture to write")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = TrainingConfig(train_path=args.train_path, val_path=args.val_path,
                         depth=args.depth, width=args.width,
                         noise_range=(args.noise_min, args.noise_max),
                         batch_size=args.batch_size, epochs=args.epochs,
                         patience=args.patience, seed=args.seed,
                         export_path=args.out, fixture_path=args.fixture)
    try:
        result = train(cfg)
        export_weights(result.model, result.affine, args.out,
                       fixture_path=args.fixture,
                       fixture_input=result.fixture_input)
    except (TrainingError, ExportError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"validation PSNR: noisy {result.val_psnr_noisy:.2f} dB -> "
          f"denoised {result.val_psnr_denoised:.2f} dB")
    print(f"wrote {args.out}" + (f" and {args.fixture}" if args.fixture else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
