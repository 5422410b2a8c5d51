"""Command line entry point: ``envprobe <task> [--preset NAME | --config PATH] ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from envprobe.config import ConfigError, parse_config, parse_overrides, preset_names
from envprobe.errors import EnvProbeError, SolverError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SUBCOMMANDS = ("evolve", "steady", "negativity", "spectrum", "cv-marginal", "sweep")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI file with [run], [bath], ... sections")
    common.add_argument("--preset", help="bundled preset: " + ", ".join(preset_names()))
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="SECTION.KEY=VALUE", help="override a single config value")
    common.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--seed", type=int, help="seed for the initial-state sampler")
    common.add_argument("--plot", action="store_true", help="also write a PNG next to --out")

    parser = argparse.ArgumentParser(
        prog="envprobe",
        description="Probe-qubit simulations of a hidden qubit coupled to a Markovian bath.")
    sub = parser.add_subparsers(dest="task", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def load_config(args):
    text = None
    source = "<config>"
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", f"--config {args.config}") from None
        source = str(args.config)
    overrides = parse_overrides(args.overrides)
    overrides.setdefault("run", {})["task"] = (args.task, f"subcommand {args.task}")
    if args.task == "cv-marginal":
        overrides["run"].setdefault("model", ("cv", f"subcommand {args.task}"))
    if args.format:
        overrides["run"]["format"] = (args.format, f"--format {args.format}")
    if args.seed is not None:
        overrides["run"]["seed"] = (str(args.seed), f"--seed {args.seed}")
    if text is None and not args.preset:
        # only flags given: let parse_config report what is missing
        present = {k for k in overrides.get("run", {})}
        if "model" not in present:
            raise ConfigError("usage: missing required keys run.model and the model parameters "
                              "(give --preset NAME or --config PATH)")
    return parse_config(text, preset=args.preset, overrides=overrides, source=source)


def main(argv=None):
    from envprobe.runner import format_csv, format_json, run, write_atomic

    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.plot and args.out is None:
            raise ConfigError("--plot needs --out", "--plot")
    except ConfigError as exc:
        print(f"envprobe: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = run(cfg)
        fmt = cfg.output_format
        text = format_csv(result) if fmt == "csv" else format_json(result)
        figure = None
        if args.plot:
            from envprobe.plotting import render
            figure = args.out.with_suffix(".png")
    except (SolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"envprobe: numerical failure in task {cfg.task}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EnvProbeError as exc:
        print(f"envprobe: error in task {cfg.task}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(args.out, text)
        if figure is not None:
            write_atomic(figure, writer=lambda tmp: render(result, tmp))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
