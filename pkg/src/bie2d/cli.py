"""Command-line benchmark harness.

Subcommands:
    solve <cfg>         one solve; writes a one-row CSV and the far-field samples
    convergence <cfg>   refinement study at fixed wavenumbers
    bench <cfg>         (k1, k2, unknowns) sweep at fixed geometry
    verify              oracle/invariant self-checks

Exit codes: 0 success, 1 configuration error, 2 GMRES non-convergence,
3 internal assertion.
"""

import argparse
import sys

from .config import ConfigError, load_config
from .driver import (SolveFailure, csv_row, CSV_HEADER, run_bench,
                     run_convergence, run_solve, write_farfield,
                     write_reports_csv)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOCONV = 2
EXIT_INTERNAL = 3


def _print_reports(reports):
    print(CSV_HEADER)
    for rep in reports:
        print(csv_row(rep))


def cmd_solve(args):
    cfg = load_config(args.config)
    rep = run_solve(cfg)
    write_reports_csv(cfg.csv_path, [rep])
    write_farfield(cfg.farfield_path, rep.farfield)
    _print_reports([rep])
    print(f"wrote {cfg.csv_path} and {cfg.farfield_path}")
    return EXIT_OK


def cmd_convergence(args):
    cfg = load_config(args.config)
    reports = run_convergence(cfg)
    write_reports_csv(cfg.csv_path, reports)
    _print_reports(reports)
    print(f"wrote {cfg.csv_path}")
    return EXIT_OK


def cmd_bench(args):
    cfg = load_config(args.config)
    reports = run_bench(cfg)
    write_reports_csv(cfg.csv_path, reports)
    _print_reports(reports)
    print(f"wrote {cfg.csv_path}")
    return EXIT_OK


def cmd_verify(args):
    from .verify import verify_all
    return EXIT_OK if verify_all() else EXIT_INTERNAL


def build_parser():
    ap = argparse.ArgumentParser(prog="bie2d",
                                 description="Nystrom solvers for 2D Helmholtz transmission scattering")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, needs_cfg in (("solve", cmd_solve, True),
                                ("convergence", cmd_convergence, True),
                                ("bench", cmd_bench, True),
                                ("verify", cmd_verify, False)):
        p = sub.add_parser(name)
        if needs_cfg:
            p.add_argument("config", help="path to a flat key = value config file")
        p.set_defaults(fn=fn)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolveFailure as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except AssertionError as exc:
        print(f"internal assertion: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
