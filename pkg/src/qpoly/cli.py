"""Command line: ``qpoly compute | verify | fuzz``.

Exit codes: 0 success or PASS, 1 any FAIL or INCONCLUSIVE verdict, 2 invalid
input, 3 I/O failure.
"""

import argparse
import logging
import sys

from . import harness
from .io import dumps_csv, dumps_report, load_state, write_text
from .polygamy import DEFAULT_TOLERANCE, PASS
from .roof import OptimizerConfig
from .states import StateSpec

EXIT_OK, EXIT_VERDICT, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


def _labels(text):
    return [s.strip() for s in text.split(",") if s.strip()]


def _dims(text):
    return [int(d) for d in text.replace(",", "x").split("x") if d]


def _on_off(text):
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _common(p):
    p.add_argument("--restarts", type=int, default=OptimizerConfig.restarts)
    p.add_argument("--max-evals", type=int, default=OptimizerConfig.max_evals_per_restart,
                   help="line searches per restart")
    p.add_argument("--tol", type=float, default=OptimizerConfig.tol,
                   help="stop a restart when a sweep gains at most this")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-v", "--verbose", action="store_true")


def _state_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", metavar="PATH", help="state file (JSON)")
    src.add_argument("--gen", metavar="SPEC", help="e.g. ghz,4  w,3  dicke,4,2  haar,2x2x2")


def _checking(p):
    p.add_argument("--focus", help="focus party (default: first label)")
    p.add_argument("--slack-tol", type=float, default=DEFAULT_TOLERANCE,
                   help="a slack at or above minus this passes")
    p.add_argument("--escalate", type=_on_off, default=True, metavar="on|off")
    p.add_argument("--identities", type=_on_off, default=True, metavar="on|off")


def build_parser():
    parser = argparse.ArgumentParser(prog="qpoly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate one correlation measure")
    _state_source(p)
    p.add_argument("--measure", required=True, choices=harness.MEASURES)
    p.add_argument("--keep", type=_labels, help="take this marginal first (comma-separated labels)")
    p.add_argument("--cut", type=_labels, help="first side of the cut (default: first label)")
    _common(p)

    p = sub.add_parser("verify", help="check both polygamy chains and the identities")
    _state_source(p)
    _checking(p)
    _common(p)

    p = sub.add_parser("fuzz", help="verify many Haar-random pure states")
    p.add_argument("--dims", type=_dims, required=True, help="e.g. 2x2x2x2")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: $QPOLY_JOBS or 1)")
    _checking(p)
    _common(p)
    return parser


def _config(args):
    return OptimizerConfig(restarts=args.restarts, max_evals_per_restart=args.max_evals,
                           tol=args.tol, seed=args.seed)


def _load(args):
    if args.gen:
        spec = StateSpec.parse(args.gen, seed=args.seed)
        return spec.build(), spec
    return load_state(args.state), None


def _run(args):
    cfg = _config(args)
    if args.command == "compute":
        state, spec = _load(args)
        return harness.compute_record(state, args.measure, args.keep, args.cut, cfg, spec)
    if args.command == "verify":
        state, spec = _load(args)
        return harness.verify_record(state, args.focus, cfg, args.slack_tol, args.escalate,
                                     args.identities, spec)
    jobs = args.jobs if args.jobs is not None else harness.default_jobs()
    return harness.fuzz_record(args.dims, args.trials, args.seed, cfg, args.focus, args.slack_tol,
                               args.escalate, args.identities, jobs)


def _summary(record):
    if record["command"] == "compute":
        r = record["result"]
        return f"{record['measure']} = {r['value']:.10g} ({r['bound']}, {r['route']})"
    if record["command"] == "fuzz":
        s = record["summary"]
        return (f"fuzz {record['verdict']}: {s['verdicts']}, min slack {s['min_slack']:.3g}, "
                f"{s['escalations']} escalation(s)")
    return f"verify {record['verdict']}: " + ", ".join(
        f"{c['check']}={c['verdict']}" for c in record["checks"] if c["check"].endswith("_chain"))


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        record = _run(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = dumps_csv(record) if args.format == "csv" else dumps_report(record)
    try:
        if args.out:
            write_text(text, args.out)
            print(_summary(record))
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if record["command"] == "compute":
        return EXIT_OK
    return EXIT_OK if record["verdict"] == PASS else EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
