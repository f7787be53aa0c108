"""Command line entry point: ``mixret run | sweep | audit``.

Exit codes: 0 success, 2 input or precondition failure, 3 capability limit.
"""

from __future__ import annotations

import argparse
import logging
import sys
import traceback

from mixret.config import load_config, with_overrides
from mixret.errors import MixretError
from mixret.experiment import run_experiment, sweep
from mixret.report import emit_report, fmt
from mixret.schedules import audit_schedule


def _origin(exc: BaseException) -> str:
    """Dotted module name of the innermost mixret frame that raised ``exc``."""
    name = "mixret"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        mod = frame.f_globals.get("__name__", "")
        if mod.startswith("mixret"):
            name = mod
    return name


def _load(args):
    cfg = load_config(args.config)
    return with_overrides(
        cfg,
        master_seed=args.seed,
        workers=args.workers,
        exact=args.exact,
        M=getattr(args, "samples", None),
    )


def cmd_run(args) -> int:
    cfg = _load(args)
    res = run_experiment(cfg)
    if args.out:
        res.write(args.out)
    sys.stdout.write(emit_report(res))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    res = sweep(cfg)
    if args.out:
        res.write(args.out)
    sys.stdout.write(emit_report(res))
    return 0


def cmd_audit(args) -> int:
    cfg = load_config(args.config)
    Ns = args.N or ([cfg.N] if cfg.N else [10, 100, 1000])
    rep = audit_schedule(cfg.schedule, Ns)
    print(f"schedule: {cfg.schedule.name}")
    for a in rep:
        print(f"N={a.N}  K1={a.K1}  K2={a.K2}  monotone_tail_n0={fmt(a.monotone_tail_n0)}")
    print(f"verdict: {rep.verdict}  K={rep.K}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mixret", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="YAML config, or a result.json to re-run")
        sp.add_argument("--seed", type=int, default=None, help="override master_seed")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--samples", type=int, default=None, help="override M")
        sp.add_argument("--out", default=None, help="output directory for JSON and CSV files")
        sp.add_argument("--exact", action=argparse.BooleanOptionalAction, default=None,
                        help="force or disable exact enumeration (default: automatic)")

    run = sub.add_parser("run", help="run one experiment")
    common(run)
    run.set_defaults(func=cmd_run)
    sw = sub.add_parser("sweep", help="run a family of experiments over L")
    common(sw)
    sw.set_defaults(func=cmd_sweep)
    au = sub.add_parser("audit", help="audit the schedule of a config")
    au.add_argument("--config", required=True)
    au.add_argument("--N", type=int, nargs="*", default=None)
    au.set_defaults(func=cmd_audit)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MixretError as e:
        print(f"error [{_origin(e)}]: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
