"""Command-line front end.

Exit codes: 0 success, 1 self-test failure, 2 configuration error,
3 I/O error, 4 divergence fault (abort policy).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .adaptive_filters import flipped_attractor
from .config import DEFAULT_DELTAS, FIGURE_PRESETS, SWEEP_PRESETS, load_config, preset
from .errors import ConfigError, DivergenceError
from .experiment import run_scenario, sweep_delta
from .output import emit_curves, emit_sweep
from .selftest import selftest

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_IO, EXIT_DIVERGENCE = 0, 1, 2, 3, 4

log = logging.getLogger("acl0lms")


def _parse_deltas(text: str):
    try:
        return [float(d) for d in text.split(",") if d.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        dest="overrides", help="override one parameter (repeatable)")
    common.add_argument("--out", metavar="DIR", default="results", help="output directory")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--runs", type=int, help="number of Monte-Carlo runs")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="worker processes (default: available CPUs)")
    common.add_argument("--quiet", action="store_true", help="only report warnings and errors")

    parser = argparse.ArgumentParser(
        prog="acl0lms",
        description="Monte-Carlo learning curves for LMS, L0-LMS and their affine combinations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("run", parents=[common], help="run one scenario")
    sweep = sub.add_parser("sweep", parents=[common], help="paired sweep over delta")
    sweep.add_argument("--deltas", type=_parse_deltas, default=list(DEFAULT_DELTAS),
                       help="comma-separated step ratios (default: 0.1,0.3,0.5,0.7,0.9)")
    for name in FIGURE_PRESETS:
        kind = "delta sweep" if name in SWEEP_PRESETS else "learning curves"
        sub.add_parser(name, parents=[common], help=f"{kind} preset ({name})")
    st = sub.add_parser("selftest", help="run the oracle and identity checks")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--flip-attractor-sign", action="store_true", help=argparse.SUPPRESS)
    return parser


def resolve(args):
    base = preset(args.command) if args.command in FIGURE_PRESETS else None
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"master_seed={args.seed}")
    if args.runs is not None:
        overrides.append(f"n_runs={args.runs}")
    return load_config(args.config, overrides, base=base)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "selftest":
        if args.flip_attractor_sign:
            with flipped_attractor():
                return EXIT_OK if selftest(args.seed) else EXIT_SELFTEST
        return EXIT_OK if selftest(args.seed) else EXIT_SELFTEST

    try:
        cfg = resolve(args)
        if args.command in ("sweep",) + SWEEP_PRESETS:
            deltas = args.deltas if args.command == "sweep" else list(DEFAULT_DELTAS)
            result = sweep_delta(cfg, deltas, workers=args.workers)
            emit = emit_sweep
        else:
            result = run_scenario(cfg, workers=args.workers)
            emit = emit_curves
    except ConfigError as exc:
        print(f"acl0lms: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"acl0lms: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE

    try:
        paths = emit(result, args.out)
    except OSError as exc:
        print(f"acl0lms: cannot write results to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %d files under %s", len(paths), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
