"""Command-line interface.

Subcommands:
    tomo <files...> --out DIR       reconstruct states from count files
    simulate --config FILE --out DIR   synthesize count files
    sweep --config FILE --out FILE  analytic (eta, power) sweep tables
    metrics <file>                  metrics of a serialized density matrix

Exit codes: 0 success, 2 parse/config error, 3 validation or degenerate
input, 4 optimizer non-convergence.
"""

import argparse
import sys

from . import pipeline
from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateInputError,
    ParseError,
    ValidationError,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NONCONVERGED = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Two-photon polarization tomography and multi-pair modeling",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tomo = sub.add_parser("tomo", help="reconstruct states from count files")
    p_tomo.add_argument("files", nargs="+")
    p_tomo.add_argument("--out", required=True, help="output directory")

    for name, out_help in (("simulate", "output directory"), ("sweep", "output file")):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True, help=out_help)
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--alpha", type=float, help="override source.alpha")
        p.add_argument("--eta", type=float, help="override source.eta")
        p.add_argument("--scale", type=float, help="override simulate.scale")

    p_metrics = sub.add_parser("metrics", help="metrics of a density-matrix file")
    p_metrics.add_argument("file")
    return parser


def _overrides(args):
    return {
        "seed": getattr(args, "seed", None),
        "source.alpha": getattr(args, "alpha", None),
        "source.eta": getattr(args, "eta", None),
        "simulate.scale": getattr(args, "scale", None),
    }


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "tomo":
            records, errors = pipeline.run_tomo(args.files, args.out)
            for rec in records:
                print(f"{rec.label}: {pipeline.format_metrics(rec.metrics)}")
            for fname, msg in errors:
                print(f"error: {fname}: {msg}", file=sys.stderr)
            return EXIT_PARSE if errors else EXIT_OK
        if args.command == "simulate":
            cfg = pipeline.load_config(args.config, _overrides(args))
            for path in pipeline.run_simulate(cfg, args.out):
                print(path)
            return EXIT_OK
        if args.command == "sweep":
            cfg = pipeline.load_config(args.config, _overrides(args))
            rows = pipeline.run_sweep(cfg, args.out)
            print(f"wrote {len(rows)} sweep rows to {args.out}")
            return EXIT_OK
        if args.command == "metrics":
            print(pipeline.format_metrics(pipeline.run_metrics(args.file)))
            return EXIT_OK
    except (ParseError, ConfigError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, DegenerateInputError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"optimizer did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
