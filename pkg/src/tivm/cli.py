"""Single executable around the memory toolkit.

Subcommands: init (fresh bank snapshot), short-term (batch adaptation),
online (stream scoring), eval (online-precision curve), ablate (the four
experiment harnesses), inspect (snapshot summary). All randomness flows from
--seed; outputs are written atomically and are byte-identical across runs
with identical flags and inputs.

Exit codes: 0 success, 2 usage, 3 I/O, 4 shape/data, 5 format/alignment.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import (
    DegenerateNormError,
    EmptySequenceError,
    FormatError,
    ImageTooSmallError,
    IndexOutOfRangeError,
    InvalidCapacityError,
    InvalidRateError,
    LabelMismatchError,
    LengthMismatchError,
    NonFiniteDataError,
    ShapeInconsistentError,
    ShapeMismatchError,
)
from .experiments import EXPERIMENT_NAMES, default_config, run_experiment
from .features import GRIDPOOL, ExtractorSpec, load_frames, read_labels_csv
from .memory import WTI, WOTI, bank_init, load_bank, save_bank
from .metrics import auc_op, write_curve_csv
from .pipeline import (
    OnlineParams,
    atomic_write_text,
    format_float,
    online_run,
    read_scores_csv,
    short_term_train,
    write_scores_csv,
)

_USAGE_EXIT = 2
_IO_EXIT = 3
_DATA_EXIT = 4
_FORMAT_EXIT = 5

_DATA_ERRORS = (ShapeMismatchError, ShapeInconsistentError, DegenerateNormError,
                NonFiniteDataError, InvalidCapacityError, InvalidRateError,
                EmptySequenceError, ImageTooSmallError)
_FORMAT_ERRORS = (FormatError, LabelMismatchError, LengthMismatchError,
                  IndexOutOfRangeError)

_FORMATS_EPILOG = """\
file formats:
  bank snapshot (.tivm): magic "TIVM", u32 version=1, u32 n,c,h,w, u64 seed,
      f64 write rate, f64 read rate, then n*c*h*w little-endian f32 values
      (channel-major, row-major).
  feature cube (.fcb):   magic "FCUB", u32 version=1, u32 c,h,w, then c*h*w
      little-endian f32 values (channel-major, row-major).
  raster (.pgm):         binary 8-bit PGM (P5), maxval <= 255.
  labels CSV:            header frame_index,interesting ; one 0/1 row per frame.
  scores CSV:            header frame_index,interest,confidence.
  curve CSV:             header n,n_over_N,s ; trailing summary line auc,<value>.
"""


def _parse_shape(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("shape must be c,h,w")
    try:
        c, h, w = (int(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("shape components must be integers") from exc
    if min(c, h, w) < 1:
        raise argparse.ArgumentTypeError("shape components must be >= 1")
    return c, h, w


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a comma-separated float list") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a comma-separated int list") from exc


def _extractor_from_flags(args) -> ExtractorSpec | None:
    if args.extractor is None:
        return None
    if args.extractor == GRIDPOOL:
        gh, gw = args.grid
        return ExtractorSpec(kind=GRIDPOOL, grid=(gh, gw))
    raise FormatError(f"unsupported extractor {args.extractor!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tivm",
        description="Translation-invariant feature memory: train, score, evaluate.",
        epilog=_FORMATS_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="write a freshly initialized bank snapshot")
    p.add_argument("--capacity", type=int, required=True, help="number of memory cubes")
    p.add_argument("--shape", type=_parse_shape, required=True, help="cube shape c,h,w")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--write-rate", type=float, default=5.0)
    p.add_argument("--read-rate", type=float, default=5.0)
    p.add_argument("--out", required=True, help="snapshot output path")

    p = sub.add_parser("short-term", help="batch-adapt a bank to known-uninteresting frames")
    p.add_argument("--bank", required=True, help="input bank snapshot")
    p.add_argument("--data", required=True, help="directory of .fcb (or .pgm) frames")
    p.add_argument("--max-epochs", type=int, default=10)
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--mode", choices=[WTI, WOTI], default=WTI)
    p.add_argument("--extractor", choices=[GRIDPOOL], default=None)
    p.add_argument("--grid", type=_parse_int_list, default=(7, 7))
    p.add_argument("--out-bank", required=True, help="updated snapshot path")
    p.add_argument("--report", required=True, help="per-epoch confidence CSV path")

    p = sub.add_parser("online", help="score a frame stream, writing as it reads")
    p.add_argument("--bank", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--write-rate", type=float, default=5.0)
    p.add_argument("--read-rate", type=float, default=5.0)
    p.add_argument("--mode", choices=[WTI, WOTI], default=WTI)
    p.add_argument("--extractor", choices=[GRIDPOOL], default=None)
    p.add_argument("--grid", type=_parse_int_list, default=(7, 7))
    p.add_argument("--out", required=True, help="scores CSV path")
    p.add_argument("--save-bank", default=None, help="optional post-run snapshot path")

    p = sub.add_parser("eval", help="online-precision curve from scores + labels")
    p.add_argument("--scores", required=True, help="scores CSV from the online stage")
    p.add_argument("--labels", required=True, help="labels CSV (frame_index,interesting)")
    p.add_argument("--delta", type=float, default=2.0, help="top-slot relaxation, >= 1")
    p.add_argument("--out", required=True, help="curve CSV path")

    p = sub.add_parser("ablate", help="run one named experiment harness")
    p.add_argument("--experiment", choices=list(EXPERIMENT_NAMES), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--capacity", type=int, default=None)
    p.add_argument("--shape", type=_parse_shape, default=None)
    p.add_argument("--write-rate", type=float, default=None)
    p.add_argument("--read-rate", type=float, default=None)
    p.add_argument("--mode", choices=[WTI, WOTI], default=None)
    p.add_argument("--writes-per-tensor", type=int, default=None)
    p.add_argument("--rate-sweep", type=_parse_float_list, default=None)
    p.add_argument("--out", default=".", help="output directory for <experiment>.csv")

    p = sub.add_parser("inspect", help="print a snapshot's header and cube stats")
    p.add_argument("--bank", required=True)

    return parser


def cmd_init(args) -> int:
    bank = bank_init(args.capacity, *args.shape, seed=args.seed,
                     write_rate=args.write_rate, read_rate=args.read_rate)
    save_bank(bank, args.out)
    print(f"wrote {args.out}: {bank!r}")
    return 0


def cmd_short_term(args) -> int:
    bank = load_bank(args.bank)
    frames, _ = load_frames(args.data, _extractor_from_flags(args))
    report = short_term_train(bank, frames, max_epochs=args.max_epochs,
                              threshold=args.threshold, mode=args.mode)
    save_bank(bank, args.out_bank)
    lines = ["epoch,mean_confidence"]
    lines += [f"{i},{format_float(v)}" for i, v in enumerate(report.mean_confidences, 1)]
    atomic_write_text(args.report, "\n".join(lines) + "\n")
    print(f"epochs={report.epochs_run} converged={report.converged} "
          f"final_confidence={report.mean_confidences[-1]:.6f}")
    return 0


def cmd_online(args) -> int:
    bank = load_bank(args.bank)
    frames, _ = load_frames(args.data, _extractor_from_flags(args))
    params = OnlineParams(read_rate=args.read_rate, write_rate=args.write_rate,
                          mode=args.mode)
    scores = online_run(bank, frames, params)
    write_scores_csv(scores, args.out)
    if args.save_bank:
        save_bank(bank, args.save_bank)
    print(f"scored {len(scores)} frames -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    scores = read_scores_csv(args.scores)
    labels = read_labels_csv(args.labels)
    indices = [s.frame_index for s in scores]
    if sorted(labels) != sorted(indices):
        raise LabelMismatchError("scores and labels disagree on frame_index set")
    ordered = sorted(scores, key=lambda s: s.frame_index)
    preds = [s.value for s in ordered]
    truth = [labels[s.frame_index] for s in ordered]
    curve = auc_op(preds, truth, delta=args.delta)
    write_curve_csv(curve, args.out)
    print(f"AUC-OP(delta={args.delta:g}) = {curve.auc:.6f} over N={curve.N}")
    return 0


def cmd_ablate(args) -> int:
    config = default_config(args.experiment, seed=args.seed)
    overrides = {}
    if args.capacity is not None:
        overrides["capacity"] = args.capacity
    if args.shape is not None:
        overrides["shape"] = args.shape
    if args.write_rate is not None:
        overrides["write_rate"] = args.write_rate
    if args.read_rate is not None:
        overrides["read_rate"] = args.read_rate
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.writes_per_tensor is not None:
        overrides["writes_per_tensor"] = args.writes_per_tensor
    if args.rate_sweep is not None:
        overrides["rate_sweep"] = args.rate_sweep
    if overrides:
        from dataclasses import replace
        config = replace(config, **overrides)
    path = run_experiment(args.experiment, config, args.out)
    print(f"wrote {path}")
    return 0


def cmd_inspect(args) -> int:
    bank = load_bank(args.bank)
    norms = np.linalg.norm(bank.data.reshape(bank.capacity, -1).astype(np.float64), axis=1)
    n, c, h, w = bank.data.shape
    print(f"capacity={n} shape=({c},{h},{w}) seed={bank.seed} "
          f"write_rate={bank.write_rate:g} read_rate={bank.read_rate:g}")
    print(f"cube norms: min={norms.min():.6g} mean={norms.mean():.6g} max={norms.max():.6g}")
    print(f"payload: {bank.data.nbytes} bytes")
    return 0


_COMMANDS = {
    "init": cmd_init,
    "short-term": cmd_short_term,
    "online": cmd_online,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "inspect": cmd_inspect,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _FORMAT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _FORMAT_EXIT
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _IO_EXIT


if __name__ == "__main__":
    sys.exit(main())
