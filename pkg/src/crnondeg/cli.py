"""Command-line front end.

    crnondeg analyze JOB.json [--max-order K] [--json] [--witnesses]
    crnondeg corpus [--json]
    crnondeg invariance JOB.json --seed S --trials T [--max-order K] [--json]

``analyze`` exits 0 for a nondegenerate map, 2 for "degenerate up to K" and
1 for bad input.  ``corpus`` and ``invariance`` exit 0 iff every check holds.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .corpus import CORPUS, run_corpus
from .engine import invariance_trials
from .errors import CRError
from .jobs import MAX_ORDER_ENV, load_job
from .report import InvarianceReport, Report, TrialRecord

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2


def _ladder_table(dims: list[int], n_target: int) -> str:
    lines = [" k | dim E_k", "---+--------"]
    for k, d in enumerate(dims):
        mark = "  (full)" if d == n_target else ""
        lines.append(f"{k:2d} | {d}{mark}")
    return "\n".join(lines)


def _verdict_line(r: Report) -> str:
    if r.nondegenerate:
        return f"k0 = {r.k0}: the map is {r.k0}-nondegenerate"
    return f"degenerate up to K_max = {r.max_order}: E_k(0) never fills C^{r.target_dimension} for k <= {r.max_order}"


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    try:
        job = load_job(args.job)
        analysis = job.analysis(args.max_order)
        result = analysis.run()
    except CRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = Report.build(job.name, analysis, result, time.perf_counter() - t0)
    if args.json:
        print(report.to_json())
    else:
        print(f"job: {job.name}")
        print(f"CR dimension n = {report.cr_dimension}, target C^{report.target_dimension}, "
              f"working order {report.working_order}, tangency {report.tangency}")
        print(_ladder_table(report.dims, report.target_dimension))
        print(_verdict_line(report))
        if args.witnesses:
            print("witnesses (k, alpha, l: row):")
            for w in report.witnesses:
                print(f"  {w.k}, {tuple(w.alpha)}, {w.l}: ({', '.join(w.row)})")
    return EXIT_OK if report.nondegenerate else EXIT_DEGENERATE


def cmd_corpus(args) -> int:
    results = run_corpus(CORPUS)
    ok = all(r.passed for r in results)
    if args.json:
        out = [
            {"name": r.name, "expected": r.expected, "verdict": r.verdict, "dims": r.dims,
             "expected_dims": r.expected_dims, "passed": r.passed, "error": r.error,
             "timing_seconds": round(r.seconds, 6)}
            for r in results
        ]
        print(json.dumps(out, sort_keys=True, indent=2))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            detail = r.error or f"dims {r.dims}"
            print(f"{status}  {r.name:<{width}}  expected {r.expected:<20} got {r.verdict:<20} {detail}")
        print(f"{sum(r.passed for r in results)}/{len(results)} passed")
    return EXIT_OK if ok else EXIT_INPUT


def cmd_invariance(args) -> int:
    t0 = time.perf_counter()
    try:
        job = load_job(args.job)
        analysis = job.analysis(args.max_order)
        trials = invariance_trials(analysis, args.seed, args.trials)
    except CRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    records = [TrialRecord.build(t) for t in trials]
    ok = all(r.ok for r in records)
    report = InvarianceReport(job.name, args.seed, args.trials, analysis.max_order, ok, records,
                              round(time.perf_counter() - t0, 6))
    if args.json:
        print(report.to_json())
    else:
        print(f"job: {job.name}, seed {args.seed}, {args.trials} trials, K_max {analysis.max_order}")
        for r in records:
            status = "PASS" if r.ok else "FAIL"
            dims = [p["dim_transformed"] for p in r.per_order]
            print(f"{status}  trial {r.trial}: {r.transformed_verdict}, dims {dims}")
        print("all row spaces transform by dF(0)^-1" if ok else "transformation law FAILED")
    return EXIT_OK if ok else EXIT_INPUT


def _nonneg(text: str) -> int:
    k = int(text)
    if k < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return k


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crnondeg", description="Exact k0-nondegeneracy of polynomial CR maps.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute the E_k ladder and verdict for a job file")
    a.add_argument("job")
    a.add_argument("--max-order", type=_nonneg, default=None,
                   help=f"largest k examined (default: job truncation_order, then ${MAX_ORDER_ENV}, then 10)")
    a.add_argument("--json", action="store_true")
    a.add_argument("--witnesses", action="store_true", help="list the multiindices spanning each E_k")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("corpus", help="run the built-in examples against their expected verdicts")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_corpus)

    i = sub.add_parser("invariance", help="check the target coordinate-change law on random biholomorphisms")
    i.add_argument("job")
    i.add_argument("--seed", type=int, required=True)
    i.add_argument("--trials", type=_nonneg, required=True)
    i.add_argument("--max-order", type=_nonneg, default=None)
    i.add_argument("--json", action="store_true")
    i.set_defaults(func=cmd_invariance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
