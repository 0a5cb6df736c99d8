"""Command-line entry point: ``wignerflow run|preset|list-presets|selftest``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .fock import TruncationError
from .scenarios import ConfigError, default_output_dir, list_presets, load_config, preset_config, run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

log = logging.getLogger("wignerflow")


def _parser():
    ap = argparse.ArgumentParser(prog="wignerflow", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="run a scenario from a YAML config file")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: $WIGNERFLOW_OUTPUT_DIR/<name>)")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    p = sub.add_parser("preset", help="run one of the built-in figure presets")
    p.add_argument("name")
    p.add_argument("--out")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    sub.add_parser("list-presets", help="list preset names and descriptions")

    p = sub.add_parser("selftest", help="run the fast subset of the acceptance checks")
    p.add_argument("--json", action="store_true", help="print results as JSON")
    return ap


def _run(cfg, out):
    out = Path(out) if out else default_output_dir(cfg.name)
    manifest = run(cfg, out)
    print(f"wrote {len(manifest['files'])} files to {out} (manifest.json)")
    return EXIT_OK


def _selftest(as_json):
    from .acceptance import FAST, run_criteria

    results = run_criteria(FAST)
    if as_json:
        print(json.dumps([r.as_dict() for r in results], indent=1))
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.verb == "list-presets":
            for name, desc in list_presets():
                print(f"{name}\t{desc}")
            return EXIT_OK
        if args.verb == "selftest":
            return _selftest(args.json)
        if args.verb == "run":
            cfg = load_config(args.config, args.override)
        else:
            cfg = preset_config(args.name, args.override)
        return _run(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, ValueError, ArithmeticError, FloatingPointError, MemoryError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
