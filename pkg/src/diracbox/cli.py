"""Command line interface: run / sweep / validate.

Exit codes: 0 success, 2 configuration error, 3 runtime failure,
4 validation-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, DiracBoxError
from .runner import SWEEPABLE, run, sweep, validate


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracbox",
        description="Spectral simulator for a particle in a box with a "
        "moving wall",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None,
                       help="output directory (default runs/<config stem>)")

    p_sweep = sub.add_parser("sweep", help="run one configuration over a "
                             "list of parameter values")
    p_sweep.add_argument("config", type=Path)
    p_sweep.add_argument("--param", required=True,
                         help=f"one of {', '.join(SWEEPABLE)}")
    p_sweep.add_argument("--values", required=True, nargs="+",
                         help="parameter values")
    p_sweep.add_argument("--out", type=Path, default=None)
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="parallel runs (results are byte-identical "
                         "for any jobs value)")

    p_val = sub.add_parser("validate", help="run the invariant/oracle suite "
                           "without producing tables")
    p_val.add_argument("config", type=Path)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "run":
            out = args.out or Path("runs") / args.config.stem
            result = run(cfg, out)
            print(f"wrote {result.table_path}")
            print(f"wrote {result.manifest_path}")
            for p in result.snapshot_paths:
                print(f"wrote {p}")
            return 0
        if args.command == "sweep":
            out = args.out or Path("runs") / f"{args.config.stem}_{args.param}"
            caster = int if args.param.lower() in ("n_max", "nmax") else float
            values = [caster(v) for v in args.values]
            index = sweep(cfg, args.param, values, out, jobs=args.jobs)
            print(f"wrote {out / 'sweep_index.json'} ({len(index['runs'])} runs)")
            return 0
        # validate
        ok, lines = validate(cfg)
        for line in lines:
            print(line)
        return 0 if ok else 4
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DiracBoxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
