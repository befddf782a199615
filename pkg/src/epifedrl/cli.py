"""Command-line surface.

Subcommands: ``init-config`` writes a default config, ``train`` runs the
experiment, ``plot`` renders metrics charts, ``compare`` reports run deltas.
Exit codes: 0 success, 1 configuration/validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .compare import compare_runs
from .config import (
    ALGORITHMS,
    ConfigError,
    RunConfig,
    load_config,
    resolve_out_dir,
    run_config_to_dict,
)
from .experiment import MODES, run_experiment
from .plots import emit_plots

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epifedrl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init-config", help="write a config with all defaults")
    p_init.add_argument("--out", type=Path, default=None, help="file path (default: stdout)")

    p_train = sub.add_parser("train", help="run federated and/or centralized training")
    p_train.add_argument("--config", type=Path, required=True)
    p_train.add_argument("--mode", choices=MODES, default="both")
    p_train.add_argument("--agent", choices=ALGORITHMS, default=None,
                         help="override the config's algorithm")
    p_train.add_argument("--seed", type=int, default=None, help="override the config's seed")
    p_train.add_argument("--out", type=Path, default=None, help="output directory")

    p_plot = sub.add_parser("plot", help="render charts from metrics files")
    p_plot.add_argument("--metrics", type=Path, nargs="+", required=True)
    p_plot.add_argument("--out", type=Path, required=True)

    p_cmp = sub.add_parser("compare", help="compare two metrics files")
    p_cmp.add_argument("--a", type=Path, required=True)
    p_cmp.add_argument("--b", type=Path, required=True)
    p_cmp.add_argument("--phase", choices=("eval", "train"), default="eval")
    p_cmp.add_argument("--out", type=Path, default=None, help="write the report as JSON")
    return parser


def _cmd_init_config(args) -> int:
    text = json.dumps(run_config_to_dict(RunConfig()), indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.agent is not None:
        cfg = dataclasses.replace(cfg, algorithm=args.agent)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    cfg.validate()
    out_dir = resolve_out_dir(cfg, None if args.out is None else str(args.out))
    paths = run_experiment(cfg, args.mode, out_dir)
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    written = emit_plots(list(args.metrics), args.out)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    report = compare_runs(args.a, args.b, phase=args.phase)
    text = json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        print(f"wrote {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "init-config": _cmd_init_config,
            "train": _cmd_train,
            "plot": _cmd_plot,
            "compare": _cmd_compare,
        }[args.command]
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps failures to exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
