"""``adialab`` command line: ``run``, ``sweep`` and ``list-models``.

Exit status: 0 success, 1 a run finished but an invariant or expectation
failed, 2 invalid configuration or parameters, 3 a numerical guard fired
(or the eigensolver or level matching gave up).
Log verbosity comes from ``ADIALAB_LOG_LEVEL`` (default ``WARNING``).
"""

import argparse
import logging
import os
import sys

from ..errors import AdialabError, DegenerateMatchAmbiguity, NoConvergence, NumericalGuardError
from . import config, runner

EXIT_OK, EXIT_FAILED_CHECK, EXIT_INVALID, EXIT_GUARD = 0, 1, 2, 3
LOG_ENV = "ADIALAB_LOG_LEVEL"

log = logging.getLogger("adialab")


def _setup_logging():
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser():
    parser = argparse.ArgumentParser(prog="adialab", description="Adiabatic evolution scenarios and diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write its report and time series")
    p_run.add_argument("config", help="YAML scenario file")
    p_run.add_argument("--output-dir", help="override output_dir from the config")
    p_run.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")

    p_sweep = sub.add_parser("sweep", help="run the scenario at every total time in its sweep list")
    p_sweep.add_argument("config", help="YAML scenario file")
    p_sweep.add_argument("--output-dir", help="override output_dir from the config")
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")

    sub.add_parser("list-models", help="list models and their parameters")
    return parser


def _summarize(result):
    rep = result.report
    bad = [k for k, v in rep["invariants"].items() if not v["passed"]]
    bad += [f"expect {k}" for k, v in rep.get("expectations", {}).items() if not v["passed"]]
    status = "ok" if rep["passed"] else "FAILED: " + ", ".join(bad)
    return f"{rep['run']['model']}: {status} -> {result.files[0]}"


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.command == "list-models":
        sys.stdout.write(config.describe_models())
        return EXIT_OK
    try:
        cfg = config.load(args.config)
        if args.command == "run":
            results = runner.run_config(cfg, args.output_dir, timing=args.timing)
            for r in results:
                print(_summarize(r))
            return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED_CHECK
        if args.jobs < 1:
            raise config.ConfigError("--jobs must be at least 1")
        summary, files = runner.sweep_config(cfg, args.output_dir, jobs=args.jobs)
        print(f"{len(summary['rows'])} rows -> {files[0]}")
        for key, slope in sorted(summary.get("loglog_slope_max_abs_A_frozen", {}).items()):
            print(f"log-log slope of max|A_{key}|: {slope:.6f}")
        return EXIT_OK
    except (NumericalGuardError, NoConvergence, DegenerateMatchAmbiguity) as exc:
        print(f"adialab: numerical guard {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (AdialabError, ValueError) as exc:
        print(f"adialab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
