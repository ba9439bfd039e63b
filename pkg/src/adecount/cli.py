"""Command-line interface for counting experiments.

Subcommands: ``count`` prints the records of one experiment, ``fit``
fits and verifies them, ``oracle`` prints the predicted degree and
multiplicity, ``cross-check`` compares the two counting models,
``catalog`` runs the built-in acceptance suite and ``report`` renders a
verification from cached counts without recounting.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget
refusal.
"""

import argparse
import json
import sys

from . import catalog
from .pipeline import (
    BudgetExceeded,
    CODE_VERSION,
    CrossCheckError,
    DEFAULT_BUDGET,
    ExperimentSpec,
    cache_load,
    cross_check_a_type,
    emit_report,
    fit_and_verify,
    run_experiment,
)


def _parse_q_list(text):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="adecount",
        description="Exact counting experiments for filtered modules and framed quiver data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec_required=True):
        p.add_argument(
            "--spec",
            required=spec_required,
            help="JSON experiment description",
        )
        p.add_argument(
            "--q",
            type=_parse_q_list,
            default=None,
            help="comma-separated field sizes overriding the spec's list",
        )
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--cache", default=None, help="JSON-lines count cache")
        p.add_argument(
            "--budget",
            type=int,
            default=DEFAULT_BUDGET,
            help="field-operation ceiling before a job is refused",
        )
        p.add_argument(
            "--format",
            choices=("md", "csv", "json"),
            default="md",
            dest="fmt",
        )

    common(sub.add_parser("count", help="count one spec and print the records"))
    common(sub.add_parser("fit", help="count, fit and verify one spec"))
    common(sub.add_parser("oracle", help="print predicted degree and multiplicity"))
    common(sub.add_parser("cross-check", help="compare the two counting models"))
    cat = sub.add_parser("catalog", help="run the built-in acceptance suite")
    cat.add_argument("--threads", type=int, default=1)
    common(sub.add_parser("report", help="render a verification from cached counts"))
    return parser


def _load_spec(args):
    try:
        with open(args.spec) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ValueError("cannot read spec file: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ValueError("spec file is not valid JSON: %s" % exc)
    spec = ExperimentSpec.from_json(data)
    if args.q is not None:
        data = spec.to_json()
        data["q"] = args.q
        spec = ExperimentSpec.from_json(data)
    return spec


def _print_records(records, fmt):
    if fmt == "json":
        for rec in records:
            print(json.dumps(rec.to_json(), sort_keys=True))
        return
    if fmt == "csv":
        print("q,raw,normalized")
        for rec in records:
            print("%d,%d,%d" % (rec.q, rec.raw, rec.normalized))
        return
    print("| q | raw | normalized |")
    print("| --- | --- | --- |")
    for rec in records:
        print("| %d | %d | %d |" % (rec.q, rec.raw, rec.normalized))


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            return 0 if catalog.run_catalog() else 1
        spec = _load_spec(args)
        if args.command == "count":
            records = run_experiment(
                spec, cache=args.cache, budget=args.budget, threads=args.threads
            )
            _print_records(records, args.fmt)
            return 0
        if args.command == "fit":
            records = run_experiment(
                spec, cache=args.cache, budget=args.budget, threads=args.threads
            )
            report = fit_and_verify(spec, records)
            print(emit_report(report, args.fmt))
            return 0 if report.passed else 1
        if args.command == "oracle":
            degree = spec.degree_bound()
            leading = spec.expected_leading()
            if args.fmt == "json":
                print(
                    json.dumps(
                        {"degree": degree, "leading": leading}, sort_keys=True
                    )
                )
            else:
                print("predicted degree %d, leading coefficient %d" % (degree, leading))
            return 0
        if args.command == "cross-check":
            if spec.kind not in ("quiver", "cross_check"):
                raise ValueError("cross-check needs a quiver or cross_check spec")
            n = spec.xi.graph.rank + 1
            qs = args.q if args.q is not None else list(spec.q) + list(spec.holdout)
            try:
                rows = cross_check_a_type(n, spec.xi, spec.etas, qs)
            except CrossCheckError as exc:
                print("FAIL %s" % exc, file=sys.stderr)
                return 1
            for row in rows:
                print(
                    "q=%d quiver=%d nilpotent=%d agree"
                    % (row["q"], row["quiver"], row["nilpotent"])
                )
            return 0
        if args.command == "report":
            if args.cache is None:
                raise ValueError("report needs --cache with stored counts")
            fingerprint = spec.fingerprint()
            records = [
                rec
                for rec in cache_load(args.cache)
                if rec.fingerprint == fingerprint and rec.version == CODE_VERSION
            ]
            report = fit_and_verify(spec, records)
            print(emit_report(report, args.fmt))
            return 0 if report.passed else 1
        raise ValueError("unknown command %r" % (args.command,))
    except BudgetExceeded as exc:
        print("refused: %s" % exc, file=sys.stderr)
        return 3
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
