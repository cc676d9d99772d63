"""Command-line interface.

Subcommands:
  run            execute the solver comparison described by a JSON config
                 (plus flag overrides) and write table.csv / summary.json /
                 subset.csv to the output directory
  gen-synthetic  write a synthetic two-cluster dataset to a CSV file
  validate       run the invariant self-checks on small random instances

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import bench, validate
from .data import gen_synthetic
from .errors import ConfigError, DataError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _build_parser():
    parser = argparse.ArgumentParser(prog="defcg", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the solver comparison")
    run.add_argument("--config", help="path to a JSON config file")
    run.add_argument("--dataset", choices=["synthetic", "mnist"])
    run.add_argument("--n", type=int, help="synthetic dataset size")
    run.add_argument("--d", type=int, help="synthetic dataset dimension")
    run.add_argument("--separation", type=float, help="synthetic cluster separation")
    run.add_argument("--images", dest="images_path", help="MNIST IDX image file")
    run.add_argument("--labels", dest="labels_path", help="MNIST IDX label file")
    run.add_argument("--digit-a", dest="digit_a", type=int, help="digit mapped to +1")
    run.add_argument("--digit-b", dest="digit_b", type=int, help="digit mapped to -1")
    run.add_argument("--max-n", dest="max_n", type=int, help="cap on MNIST rows kept")
    run.add_argument("--k", type=int, help="recycled basis size")
    run.add_argument("--ell", type=int, help="number of logged CG iterations")
    run.add_argument("--tol", type=float, help="relative-residual stopping tolerance")
    run.add_argument("--theta", type=float, help="kernel signal standard deviation")
    run.add_argument("--lengthscale", type=float, help="kernel lengthscale")
    run.add_argument("--newton-tol", dest="newton_tol", type=float, help="Newton stopping gain")
    run.add_argument("--fractions", help="comma-separated subset fractions, e.g. 0.05,0.25")
    run.add_argument("--seed", type=int, help="random seed")
    run.add_argument("--out", dest="output_path", help="output directory")

    gen = sub.add_parser("gen-synthetic", help="write a synthetic dataset to CSV")
    gen.add_argument("--n", type=int, default=200)
    gen.add_argument("--d", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--separation", type=float, default=3.0)
    gen.add_argument("--out", required=True, help="output CSV path")

    val = sub.add_parser("validate", help="run the invariant self-checks")
    val.add_argument("--seed", type=int, default=0)

    return parser


_OVERRIDE_FIELDS = (
    "dataset",
    "n",
    "d",
    "separation",
    "images_path",
    "labels_path",
    "digit_a",
    "digit_b",
    "max_n",
    "k",
    "ell",
    "tol",
    "theta",
    "lengthscale",
    "newton_tol",
    "seed",
    "output_path",
)


def _config_from_args(args):
    if args.config:
        cfg = bench.load_config(args.config)
    else:
        cfg = bench.ExperimentConfig()
    overrides = {}
    for name in _OVERRIDE_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.fractions is not None:
        try:
            overrides["subset_fractions"] = tuple(
                float(tok) for tok in args.fractions.split(",") if tok.strip()
            )
        except ValueError as exc:
            raise ConfigError(f"bad --fractions value: {args.fractions!r}") from exc
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg.validate()


def _cmd_run(args):
    cfg = _config_from_args(args)
    records = []
    summary = {}
    try:
        bench.execute(cfg, records, summary)
    except Exception as exc:
        summary["complete"] = False
        summary["error"] = f"{type(exc).__name__}: {exc}"
        summary.setdefault("config", dataclasses.asdict(cfg))
        bench.emit_reports(records, summary, cfg.output_path)
        print(f"error: {exc}", file=sys.stderr)
        print(f"partial results written to {cfg.output_path}", file=sys.stderr)
        raise
    summary["complete"] = True
    bench.emit_reports(records, summary, cfg.output_path)
    print(f"results written to {cfg.output_path}")
    return EXIT_OK


def _cmd_gen_synthetic(args):
    x, y = gen_synthetic(args.n, args.d, args.seed, args.separation)
    with open(args.out, "w", encoding="utf-8") as fh:
        header = ",".join(f"x{i}" for i in range(args.d))
        fh.write(header + ",label\n")
        for row, label in zip(x, y):
            fh.write(",".join(f"{v:.17g}" for v in row) + f",{label}\n")
    print(f"wrote {args.n} points to {args.out}")
    return EXIT_OK


def _cmd_validate(args):
    ok = validate.main(seed=args.seed)
    return EXIT_OK if ok else EXIT_NUMERICAL


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "gen-synthetic": _cmd_gen_synthetic,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
