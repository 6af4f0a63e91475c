"""verify <suite> [--dims ...] [--trials N] [--seed S] [--format json|text] [--golden DIR]

Exit status 0 iff every check passes; 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..coordmodels.golden import GoldenError
from .config import SEED_ENV, ConfigError, build_config
from .suites import SUITES, UnknownSuite, list_suites, regen_golden, run_suite


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="verify", description="Run a seeded exact verification suite.",
        epilog=f"The seed may also be set with {SEED_ENV}; flags override the config file.")
    p.add_argument("suite", help="suite name, or 'list'")
    p.add_argument("--dims", help="comma-separated, meaning depends on the suite")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=["json", "text"])
    p.add_argument("--golden", metavar="DIR", help="compare against golden data in DIR")
    p.add_argument("--config", metavar="FILE", help="key=value configuration file")
    p.add_argument("--inject-fault", action="store_true", dest="fault", default=None,
                   help="run the suite's fault fixture (expected to fail)")
    p.add_argument("--timing", action="store_true", default=None,
                   help="include wall time in the JSON report (breaks byte identity)")
    p.add_argument("--regen-golden", action="store_true",
                   help="rewrite the golden files used by the suite")
    p.add_argument("--force", action="store_true", help="required by --regen-golden")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    out = sys.stdout
    if args.suite == "list":
        if args.format == "json":
            out.write(json.dumps(list_suites(), indent=1) + "\n")
        else:
            for d in list_suites():
                out.write(f"{d['name']:<18}{d['anchor']}\n")
        return 0
    try:
        if args.regen_golden:
            paths = regen_golden(args.suite, args.golden, force=args.force)
            for path in paths:
                out.write(f"wrote {path}\n")
            return 0
        cfg = build_config(args.suite, file=args.config, dims=args.dims, trials=args.trials,
                           seed=args.seed, format=args.format, golden=args.golden,
                           fault=args.fault, timing=args.timing)
        report = run_suite(args.suite, cfg)
    except (ConfigError, UnknownSuite, GoldenError) as e:
        msg = e.args[0] if isinstance(e, UnknownSuite) else str(e)
        sys.stderr.write(f"verify: {msg}\n")
        return 2
    if cfg.format == "json":
        out.write(report.to_json(cfg.timing) + "\n")
    else:
        out.write(report.to_text() + "\n")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
