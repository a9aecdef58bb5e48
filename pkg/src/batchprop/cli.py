"""Command-line interface: ``train``, ``eval``, ``gradcheck``, ``batch-sweep``.

Exit codes: 0 success, 1 runtime failure (bad data, bad checkpoint, failed
gradient check), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from typing import Optional, Sequence

from . import gradcheck as gc
from .batching import TrainConfig, evaluate, train
from .network import Topology
from .persistence import Fingerprint, load_checkpoint, load_dataset, save_checkpoint


class UsageError(Exception):
    pass


def _topology(text: str) -> Topology:
    try:
        return Topology.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"sizes must be positive, got {text!r}")
    return sizes


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _fmt(v: float) -> str:
    return repr(float(v))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="batchprop", description="Batch backpropagation MLP trainer.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a network and write a checkpoint")
    t.add_argument("--config", help="key=value file; entries override flags")
    t.add_argument("--data", help="dataset CSV (x1..xn,t1..tm)")
    t.add_argument("--topology", type=_topology, help="comma-separated layer sizes, e.g. 2,2,1")
    t.add_argument("--eta", type=float, default=0.5)
    t.add_argument("--epochs", type=_nonneg_int, default=1000)
    t.add_argument("--batch-size", type=_positive_int, default=4)
    t.add_argument("--shards", type=_positive_int, default=1)
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--out", help="checkpoint path")
    t.add_argument("--metrics", help="per-epoch metrics CSV path")
    t.add_argument("--no-timing", action="store_true",
                   help="write wall_ms as 0 so metrics files are byte-reproducible")
    t.set_defaults(func=cmd_train, required=("data", "topology", "out"))

    e = sub.add_parser("eval", help="report the error of a checkpoint on a dataset")
    e.add_argument("--config")
    e.add_argument("--data")
    e.add_argument("--checkpoint")
    e.set_defaults(func=cmd_eval, required=("data", "checkpoint"))

    g = sub.add_parser("gradcheck", help="compare backprop with finite differences")
    g.add_argument("--config")
    g.add_argument("--topology", type=_topology, default=Topology([2, 2, 2]))
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--batch", type=_positive_int, default=2)
    g.add_argument("--epsilon", type=float, default=gc.DEFAULT_EPSILON)
    g.add_argument("--rtol", type=float, default=gc.DEFAULT_RTOL)
    g.set_defaults(func=cmd_gradcheck, required=())

    s = sub.add_parser("batch-sweep", help="final error as a function of batch size")
    s.add_argument("--config")
    s.add_argument("--data")
    s.add_argument("--topology", type=_topology)
    s.add_argument("--eta", type=float, default=0.5)
    s.add_argument("--epochs", type=_nonneg_int, default=100)
    s.add_argument("--sizes", type=_sizes, default=[1, 2, 4])
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--out", help="CSV path (standard output if omitted)")
    s.add_argument("--no-timing", action="store_true")
    s.set_defaults(func=cmd_batch_sweep, required=("data", "topology"))
    return p


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    subparser = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    actions = {a.dest: a for a in subparser._actions if a.dest not in ("help", "config")}
    try:
        with open(args.config, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{args.config}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None:
            raise UsageError(f"{args.config}:{lineno}: unknown key {key!r} for {args.command}")
        if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
            val = value.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                val = action.type(value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{args.config}:{lineno}: bad value for {key}: {exc}") from None
        else:
            val = value
        setattr(args, dest, val)


def _check_required(args: argparse.Namespace) -> None:
    missing = [f"--{d.replace('_', '-')}" for d in args.required if getattr(args, d, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s): {', '.join(missing)}")


def _check_widths(topology: Topology, inputs, targets, what: str) -> None:
    if inputs.cols != topology.n_inputs:
        raise ValueError(f"dataset has {inputs.cols} input columns, {what} expects {topology.n_inputs}")
    if targets.cols != topology.n_outputs:
        raise ValueError(f"dataset has {targets.cols} target columns, {what} expects {topology.n_outputs}")


def cmd_train(args: argparse.Namespace) -> int:
    x, t = load_dataset(args.data)
    _check_widths(args.topology, x, t, f"topology {args.topology}")
    try:
        config = TrainConfig(args.topology, eta=args.eta, epochs=args.epochs,
                             batch_size=args.batch_size, shards=args.shards, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    rows = []
    start = time.perf_counter()

    def record(epoch, report):
        wall = 0 if args.no_timing else round((time.perf_counter() - start) * 1000)
        rows.append([str(epoch + 1), _fmt(report.total), *map(_fmt, report.per_output_mean), str(wall)])

    result = train(config, x, t, on_epoch=record)
    save_checkpoint(result.network, Fingerprint(config.eta, config.batch_size, config.shards,
                                                config.seed, config.epochs), args.out)
    if args.metrics:
        header = ["epoch", "total_error"] + [f"out_mean_{j + 1}" for j in range(t.cols)] + ["wall_ms"]
        with open(args.metrics, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    final = result.history[-1].total if result.history else evaluate(result.network, x, t).total
    print(f"trained {config.epochs} epochs, final total_error={final!r}", file=sys.stderr)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    net, _ = load_checkpoint(args.checkpoint)
    x, t = load_dataset(args.data)
    _check_widths(net.topology, x, t, f"checkpoint (topology {net.topology})")
    report = evaluate(net, x, t)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "index", "value"])
    w.writerow(["total", "", _fmt(report.total)])
    for i, v in enumerate(report.per_row_total, start=1):
        w.writerow(["row_total", i, _fmt(v)])
    for j, v in enumerate(report.per_output_mean, start=1):
        w.writerow(["out_mean", j, _fmt(v)])
    sys.stdout.write(buf.getvalue())
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    if not args.epsilon > 0:
        raise UsageError(f"--epsilon must be positive, got {args.epsilon}")
    if not args.rtol >= 0:
        raise UsageError(f"--rtol must be non-negative, got {args.rtol}")
    net, x, t = gc.random_instance(args.topology, args.seed, args.batch)
    report = gc.check(net, x, t, epsilon=args.epsilon, rtol=args.rtol)
    print(f"topology={args.topology} seed={args.seed} batch={args.batch} epsilon={args.epsilon:g}")
    print("\n".join(report.lines()))
    return 0 if report.passed else 1


def cmd_batch_sweep(args: argparse.Namespace) -> int:
    x, t = load_dataset(args.data)
    _check_widths(args.topology, x, t, f"topology {args.topology}")
    too_big = [s for s in args.sizes if s > x.rows]
    if too_big:
        raise ValueError(f"batch size(s) {too_big} exceed dataset rows ({x.rows})")
    rows = []
    for size in args.sizes:
        config = TrainConfig(args.topology, eta=args.eta, epochs=args.epochs, batch_size=size, seed=args.seed)
        start = time.perf_counter()
        result = train(config, x, t)
        wall = 0 if args.no_timing else round((time.perf_counter() - start) * 1000)
        final = result.history[-1].total if result.history else evaluate(result.network, x, t).total
        rows.append([size, _fmt(final), args.epochs, wall])
        print(f"batch_size={size} final_error={final!r}", file=sys.stderr)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["batch_size", "final_error", "epochs", "wall_time_ms"])
    w.writerows(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(parser, args)
        _check_required(args)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"batchprop: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"batchprop: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
