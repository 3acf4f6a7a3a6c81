"""``srgbm`` command line.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..exceptions import NumericalError, ParameterError
from .config import EXPERIMENTS, ConfigError, default_config, parse, render
from .experiments import run, write_outputs

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

# subcommand -> experiment it runs by default
COMMANDS = {
    "simulate": "single-path",
    "sweep": "ergodicity-sweep",
    "tc": "self-averaging",
    "table": "analytics-table",
}
SIMULATE_CHOICES = ("single-path", "regimes-timeseries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srgbm", description="Reset-GBM experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress and warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="override master_seed")
    common.add_argument("--out", help="output directory (overrides output_dir)")
    common.add_argument("--plots", action="store_true", help="also write SVG charts")

    sim = sub.add_parser("simulate", parents=[common], help="single path or regime time series")
    sim.add_argument("--experiment", choices=SIMULATE_CHOICES, help="default: single-path")
    sub.add_parser("sweep", parents=[common], help="sample average vs r and N")
    sub.add_parser("tc", parents=[common], help="critical self-averaging time table")
    sub.add_parser("table", parents=[common], help="moment-behavior table")

    pc = sub.add_parser("print-config", help="print the default config of an experiment")
    pc.add_argument("--experiment", choices=EXPERIMENTS, default="single-path")
    return parser


def _resolve(args):
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    if args.command == "simulate":
        experiment = args.experiment
        if experiment is None:
            own = parse(text).experiment
            experiment = own if own in SIMULATE_CHOICES else "single-path"
    else:
        experiment = COMMANDS[args.command]
    cfg = parse(text, experiment=experiment)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.out:
        cfg = replace(cfg, output_dir=args.out)
    if args.plots:
        cfg = replace(cfg, emit_plots=True)
    return cfg.validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "print-config":
        sys.stdout.write(render(default_config(args.experiment)))
        return EXIT_OK
    try:
        cfg = _resolve(args)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        tables = run(cfg)
    except ParameterError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    try:
        written = write_outputs(cfg, tables, cfg.output_dir, plots=cfg.emit_plots)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
