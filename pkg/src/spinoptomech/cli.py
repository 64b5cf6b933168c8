"""Command line front end.

    spinoptomech {dispersion,stability,dns,teff,dsf,sweep} [--config PATH] [--out DIR]
                 [--mode corrected|as-printed] [--no-cache] [--resume] [--force]
                 [--seed N] [--workers N] [--allow-unstable]

Exit status: 0 success, 2 configuration error, 3 physics error, 4 I/O error.
"""
import argparse
from dataclasses import replace
import json
import os
import sys

from .config import SUBCOMMANDS, parse_config
from .errors import SpinOptomechError
from .runner import run
from .spectra import Mode

DEFAULT_OUT = "spinoptomech-out"
OUT_ENV = "SPINOPTOMECH_OUT"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spinoptomech",
        description="Spectra, stability and thermometry of a cavity with a moving mirror "
                    "and a spin-orbit-coupled condensate.",
    )
    parser.add_argument("command", choices=SUBCOMMANDS + ("sweep",),
                        help="pipeline to run at every sweep point "
                             "('sweep' runs the [run] target)")
    parser.add_argument("--config", help="configuration file (defaults only if omitted)")
    parser.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    parser.add_argument("--mode", choices=[m.value for m in Mode],
                        help="spectrum evaluation mode (overrides the config)")
    parser.add_argument("--no-cache", action="store_true", help="recompute every point")
    parser.add_argument("--resume", action="store_true",
                        help="complete only the points missing from an existing manifest")
    parser.add_argument("--force", action="store_true", help="allow sweeps above 10^7 points")
    parser.add_argument("--seed", type=int, help="seed recorded with the run")
    parser.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    parser.add_argument("--allow-unstable", action="store_true",
                        help="evaluate spectra at linearly unstable operating points")
    return parser


def _fail(exc, code):
    payload = exc.to_dict() if isinstance(exc, SpinOptomechError) else {
        "error": type(exc).__name__, "message": str(exc)}
    payload["exit_code"] = code
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT
    if args.workers is not None and args.workers < 1:
        print(json.dumps({"error": "ConfigError", "message": "--workers must be >= 1",
                          "exit_code": 2}), file=sys.stderr)
        return 2
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        config = parse_config(text)
    except SpinOptomechError as exc:
        return _fail(exc, exc.exit_code)
    except OSError as exc:
        return _fail(exc, 4)

    overrides = {}
    if args.mode:
        overrides["mode"] = Mode(args.mode)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.allow_unstable:
        overrides["allow_unstable"] = True
    config = replace(config, **overrides)

    try:
        result = run(config, args.command, out, use_cache=not args.no_cache,
                     resume=args.resume, force=args.force, workers=args.workers)
    except SpinOptomechError as exc:
        return _fail(exc, exc.exit_code)
    except OSError as exc:
        return _fail(exc, 4)

    summary = {"manifest": result.manifest_path, "computed": result.computed,
               "cached": result.cached, "resumed": result.resumed, "failed": result.failed,
               "exit_code": result.exit_code}
    if result.failed:
        first = next(r for r in result.records if r["status"] == "error")
        summary["first_error"] = first["error"]
        print(json.dumps(summary), file=sys.stderr)
    else:
        print(json.dumps(summary))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
