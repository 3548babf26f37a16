"""Command line entry point: ``purigate sweep|fig1|threshold``."""

import argparse
import logging
import sys

from .densmat import InvariantError
from .noise import error_rate_from_q
from .sweep import ConfigError, fmt, parse_config, run_sweep, threshold_scan

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(prog="purigate", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="logical gate error over a grid of physical error rates")
    sw.add_argument("--config", metavar="PATH")
    sw.add_argument("--p-single", metavar="LIST|logspace:lo,hi,n")
    sw.add_argument("--p-two", metavar="LIST")
    sw.add_argument("--levels", metavar="LIST")
    sw.add_argument("--mode", choices=["expected", "mc"])
    sw.add_argument("--trials", metavar="N")
    sw.add_argument("--seed", metavar="N")
    sw.add_argument("--epsilon", metavar="X")
    sw.add_argument("--max-steps", metavar="N")
    sw.add_argument("--eta", metavar="X", help="measurement reliability, or q_local")
    sw.add_argument("--p-herald", metavar="X")
    sw.add_argument("--out", metavar="PATH")

    fig = sub.add_parser("fig1", help="default sweep preset (p_two in {0.15, 0.01}, levels 0-3)")
    fig.add_argument("--out", metavar="PATH", default="fig1.csv")

    th = sub.add_parser("threshold", help="q' at which the noisy CNOT becomes entangling")
    th.add_argument("--tolerance", type=float, default=1e-6)
    return p


def _sweep_overrides(args):
    keys = ("p_single", "p_two", "levels", "mode", "trials", "seed", "epsilon",
            "max_steps", "eta", "p_herald", "out")
    return {k: getattr(args, k) for k in keys}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "threshold":
            q = threshold_scan("entangling", args.tolerance)
            print(f"q_threshold={fmt(q)}")
            print(f"p_threshold={fmt(error_rate_from_q(q))}")
            return EXIT_OK
        if args.command == "fig1":
            spec = parse_config(overrides={"out": args.out})
        else:
            spec = parse_config(args.config, _sweep_overrides(args))
        rows = run_sweep(spec)
        print(f"wrote {len(rows)} rows to {spec.output_path}")
        return EXIT_OK
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as e:
        print(f"numerical invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
