"""Command-line entry point.

Exit codes: 0 success, 1 fatal error, 2 success with warnings.
"""

import argparse
import sys
from pathlib import Path

from . import pipeline
from .errors import NetstyloError

_VERBS = ("preprocess", "partition", "metrics", "series", "stationarity",
          "features", "select", "extract", "classify", "experiment")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netstylo",
        description="Authorship attribution from co-occurrence network dynamics")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in _VERBS:
        sp = sub.add_parser(verb, help=f"run the {verb} stage"
                            if verb != "experiment"
                            else "run the full experiment comparison")
        sp.add_argument("--config", required=True, help="pipeline config file")
        sp.add_argument("--out", default=None, help="override run.out")
        sp.add_argument("--seed", type=int, default=None, help="override run.seed")
        sp.add_argument("--stage-only", action="store_true",
                        help="fail if upstream artifacts are missing instead of "
                             "computing them")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = pipeline.parse_config(args.config)
        if args.out is not None:
            config.out = Path(args.out)
        if args.seed is not None:
            config.seed = args.seed
        if args.verb == "experiment":
            report, warn_count = pipeline.run_experiment(config)
            kinds = report["kinds"]
            print("combination".ljust(16) + "".join(k.rjust(10) for k in kinds))
            for combo in report["combinations"]:
                row = "".join(
                    f"{100.0 * report['success_rates'][k][combo]:9.2f}%"
                    for k in kinds)
                print(combo.ljust(16) + row)
            print(f"zeror baseline: {100.0 * report['zeror_baseline']:.2f}%")
            for w in report["warnings"]:
                print(f"warning: {w}", file=sys.stderr)
            return 2 if warn_count else 0
        run = pipeline.PipelineRun(config)
        art = run.run_stage(args.verb, stage_only=args.stage_only)
        state = "cached" if art.cached else "done"
        print(f"{args.verb}: {state} -> {art.path}")
        for w in art.warnings:
            print(f"warning: {w}", file=sys.stderr)
        return 2 if art.warnings else 0
    except (NetstyloError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
