"""Command-line entry point: ``palmvar {generate,fit,eval,compare,sweep}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .harness import (
    EXIT_CONFIG,
    ConfigError,
    cmd_compare,
    cmd_eval,
    cmd_fit,
    cmd_generate,
    cmd_sweep,
    load_experiment_config,
    load_suite_config,
)

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="palmvar", description="Sparse and low-rank VAR(1) estimation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the output directory")
        return p

    with_config("generate", "draw a model and write data files")
    with_config("fit", "estimate the transition matrix")
    with_config("compare", "run the card/l1/GP comparison suite")
    with_config("sweep", "cross-validate rho1 and sigma")

    ev = sub.add_parser("eval", help="score an estimate on test data")
    ev.add_argument("--estimate", required=True, help="estimate CSV (p x p)")
    ev.add_argument("--test", required=True, help="test series CSV (p x m)")
    ev.add_argument("--out", help="directory for metrics.json (stdout only if omitted)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "eval":
            code, metrics = cmd_eval(args.estimate, args.test, args.out)
            print(json.dumps(metrics, indent=2, sort_keys=True))
            return code
        if args.command == "compare":
            return cmd_compare(load_suite_config(args.config, args.seed, args.out))
        cfg = load_experiment_config(args.config, args.seed, args.out)
        return {"generate": cmd_generate, "fit": cmd_fit, "sweep": cmd_sweep}[args.command](cfg)
    except ConfigError as exc:
        print(f"palmvar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
