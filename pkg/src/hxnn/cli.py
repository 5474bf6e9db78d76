"""Command-line front end.

Results go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 usage error, 2 input/parse error, 3 divergence during training.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import harness, zoo
from .algebra import Algebra, AlgebraParseError, parse_algebra, serialize_algebra
from .bilinear import check_degeneracy
from .harness import ConfigError
from .network import DivergenceError, load_checkpoint, save_checkpoint

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


class _InputError(ValueError):
    pass


def _resolve_source(source: str) -> Algebra:
    """Zoo name or spec-file path (names win when both would match)."""
    try:
        return zoo.from_spec_string(source)
    except ValueError:
        pass
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return parse_algebra(fh.read())
    raise _InputError(f"unknown algebra name or unreadable file: {source!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hxnn",
        description="hypercomplex algebras, degeneracy checks, and "
        "hypercomplex perceptron training",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="inspect and export algebras")
    alg_sub = alg.add_subparsers(dest="subcommand", required=True)
    alg_sub.add_parser("list", help="list built-in algebra names")
    p = alg_sub.add_parser("info", help="show an algebra's product table")
    p.add_argument("source", help="zoo name or spec-file path")
    p = alg_sub.add_parser("check", help="degeneracy classification")
    p.add_argument("source")
    p.add_argument("--format", choices=("text", "machine", "csv"), default="text")
    p = alg_sub.add_parser("export", help="write an algebra spec file")
    p.add_argument("name", help="zoo name (families allowed, e.g. clifford(1,1,0))")
    p.add_argument("--out", default=None)

    p = sub.add_parser("train", help="train a model from an experiment config")
    p.add_argument("config")
    p.add_argument("--out", default="model.txt")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--format", choices=("text", "machine", "csv"), default="text")

    p = sub.add_parser("eval", help="score a stored model on a fresh dataset")
    p.add_argument("model")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("text", "machine", "csv"), default="text")

    p = sub.add_parser("sweep", help="run every *.cfg in a directory")
    p.add_argument("config_dir")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    return parser


def _cmd_algebra(args) -> int:
    if args.subcommand == "list":
        for name in zoo.NAMES:
            print(name)
        print("cayley-dickson-<levels>      (0..5, e.g. cd3)")
        print("clifford(p,q,r)              (2^(p+q+r) <= 32)")
        return EXIT_OK
    if args.subcommand == "info":
        alg = _resolve_source(args.source)
        print(f"name: {alg.name or '(unnamed)'}")
        print(f"dimension: {alg.dim}")
        print("units: " + (" ".join(alg.unit_labels) or "(none)"))
        print(f"exact-constants: {'yes' if alg.sc.exact is not None else 'no'}")
        print(serialize_algebra(alg), end="")
        return EXIT_OK
    if args.subcommand == "check":
        alg = _resolve_source(args.source)
        report = check_degeneracy(alg)
        if args.format == "machine":
            sys.stdout.write(report.to_machine())
        elif args.format == "csv":
            sys.stdout.write(report.to_csv())
        else:
            sys.stdout.write(report.to_text())
        return EXIT_OK
    if args.subcommand == "export":
        try:
            alg = zoo.from_spec_string(args.name)
        except ValueError as exc:
            raise _InputError(str(exc)) from None
        out = args.out or f"{args.name}.alg"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(serialize_algebra(alg))
        print(f"wrote {out}", file=sys.stderr)
        return EXIT_OK
    raise AssertionError(args.subcommand)


def _load_config(path: str, seed_override) -> harness.ExperimentConfig:
    if not os.path.isfile(path):
        raise _InputError(f"config file not found: {path!r}")
    with open(path, encoding="utf-8") as fh:
        cfg = harness.parse_config(fh.read(), base_dir=os.path.dirname(path) or ".")
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=int(seed_override))
    return cfg


def _emit_report(report: harness.RunReport, fmt: str) -> None:
    if fmt == "machine":
        sys.stdout.write(report.to_machine())
    elif fmt == "csv":
        sys.stdout.write(harness.reports_to_csv([report]))
    else:
        sys.stdout.write(report.to_text())


def _cmd_train(args) -> int:
    cfg = _load_config(args.config, args.seed)
    print(f"training {cfg.algebra_label}/{cfg.target.kind} seed={cfg.seed}",
          file=sys.stderr)
    report, params = harness._execute(cfg)
    save_checkpoint(params, args.out, seed=cfg.seed)
    print(f"checkpoint written to {args.out}", file=sys.stderr)
    _emit_report(report, args.format)
    return EXIT_OK


def _cmd_eval(args) -> int:
    if not os.path.isfile(args.model):
        raise _InputError(f"model file not found: {args.model!r}")
    params, _ = load_checkpoint(args.model)
    cfg = _load_config(args.config, args.seed)
    if cfg.algebra.dim != params.algebra.dim:
        raise _InputError(
            f"model algebra dimension {params.algebra.dim} != config "
            f"algebra dimension {cfg.algebra.dim}"
        )
    if cfg.n_inputs != params.n_inputs:
        raise _InputError(
            f"model takes {params.n_inputs} input(s), config target takes "
            f"{cfg.n_inputs}"
        )
    dataset = harness.generate_dataset(cfg)
    mse = harness.loss_mse(params, dataset.inputs, dataset.targets)
    sup = harness.sup_error(params, dataset)
    if args.format == "text":
        print(f"eval of {args.model} on {cfg.algebra_label}/{cfg.target.kind} "
              f"(samples={cfg.samples}, seed={cfg.seed})")
        print(f"  mse={mse:.6g} sup_error={sup:.6g}")
    else:
        print(f"samples {cfg.samples}")
        print(f"seed {cfg.seed}")
        print(f"mse {mse!r}")
        print(f"sup_error {sup!r}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if not os.path.isdir(args.config_dir):
        raise _InputError(f"config directory not found: {args.config_dir!r}")
    paths = sorted(
        os.path.join(args.config_dir, f)
        for f in os.listdir(args.config_dir)
        if f.endswith(".cfg")
    )
    if not paths:
        raise _InputError(f"no *.cfg files in {args.config_dir!r}")
    cfgs = [_load_config(p, None) for p in paths]
    for path, cfg in zip(paths, cfgs):
        print(f"sweep: {path} -> {cfg.algebra_label}/{cfg.target.kind} "
              f"seed={cfg.seed}", file=sys.stderr)
    reports = harness.sweep(cfgs)
    csv_text = harness.reports_to_csv(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def dispatch(argv) -> int:
    """Run one command line; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "algebra":
            return _cmd_algebra(args)
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        raise AssertionError(args.command)
    except DivergenceError as exc:
        print(f"error: {exc} (completed epochs: {len(exc.trace)})", file=sys.stderr)
        return EXIT_RUNTIME
    except (_InputError, AlgebraParseError, ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
