"""Command-line surface: counting, invariant evaluation, verification.

Exit codes: 0 on success, 1 on a domain error (bad metric, degenerate
structure, failed verification), 2 on a usage error.  JSON output is
byte-identical for identical flags and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .counting import CountReport, poincare, poincare_general_check
from .errors import ConfinvError
from .invariants import evaluate_invariants
from .metric_io import load_metric, report_json
from .verify import SUITES, run_suite, tolerance_from_env


def _emit_error(exc: Exception, as_json: bool) -> int:
    reason = type(exc).__name__
    if as_json:
        print(json.dumps({"error": reason, "message": str(exc)}))
    else:
        print(f"error: {reason}: {exc}", file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------


def run_count(args) -> int:
    orders = (
        list(range(args.max_order + 1)) if args.order is None else [args.order]
    )
    reports = [CountReport.build(args.dim, k) for k in orders]
    if args.json:
        payload = [r.to_json_dict() for r in reports]
        print(json.dumps(payload[0] if args.order is not None else payload, indent=2))
        return 0
    if args.table:
        ks = [r.k for r in reports if r.k >= 1]
        print("k      " + "".join(f"{k:>8}" for k in ks))
        row = "".join(f"{r.hilbert:>8}" for r in reports if r.k >= 1)
        print(f"H_{args.dim}(k)" + row)
        return 0
    for r in reports:
        print(
            f"n={r.n} k={r.k}: hilbert={r.hilbert} trdeg={r.trdeg} "
            f"(symbol {r.dim_symbol}, delta {r.dim_delta})"
        )
    return 0


# ---------------------------------------------------------------------------
# poincare
# ---------------------------------------------------------------------------


def run_poincare(args) -> int:
    p = poincare(args.dim)
    payload = p.to_json_dict()
    if args.check_general:
        payload["general_check"] = poincare_general_check(args.dim)
    if args.json:
        print(json.dumps(payload, indent=2))
        return 0
    print(f"numerator coefficients (ascending):   {payload['num']}")
    print(f"denominator coefficients (ascending): {payload['den']}")
    if args.check_general:
        print(f"matches the general closed form: {payload['general_check']}")
    return 0


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def run_invariants(args) -> int:
    g = load_metric(args.metric)
    max_order = args.max_order if args.max_order is not None else g.order
    values, residuals = evaluate_invariants(g, max_order)
    meta = {
        "dim": g.dim,
        "signature": g.signature,
        "order": max_order,
        "seed": args.seed,
    }
    if args.json:
        sys.stdout.write(report_json(values, residuals, meta))
        return 0
    print(f"{'name':<16} {'order':>5} {'backend':>8}  value")
    for v in values:
        print(f"{v.name:<16} {v.order:>5} {v.backend:>8}  {v.value}")
    for name, r in residuals:
        print(f"residual {name}: {r:.3e}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def run_verify(args) -> int:
    report = run_suite(args.suite, args.dim, args.order, args.seed)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for case in report["cases"]:
            status = "PASS" if case["pass"] else "FAIL"
            print(
                f"{status} {case['case']}: expected {case['expected']}, "
                f"got {case['actual']}"
            )
        print(f"{report['passed']} passed, {report['failed']} failed")
    return 0 if report["failed"] == 0 else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confinv",
        description="Scalar conformal differential invariants: counts, "
        "evaluation, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    count = sub.add_parser("count", help="invariant counts per jet order")
    count.add_argument("--dim", type=int, required=True)
    group = count.add_mutually_exclusive_group(required=True)
    group.add_argument("--order", type=int, default=None)
    group.add_argument("--max-order", type=int, default=None)
    count.add_argument("--table", action="store_true")
    count.add_argument("--json", action="store_true")
    count.set_defaults(func=run_count)

    poin = sub.add_parser("poincare", help="generating function of the counts")
    poin.add_argument("--dim", type=int, required=True)
    poin.add_argument("--check-general", action="store_true")
    poin.add_argument("--json", action="store_true")
    poin.set_defaults(func=run_poincare)

    inv = sub.add_parser("invariants", help="evaluate invariants of a metric file")
    inv.add_argument("--metric", required=True)
    inv.add_argument("--max-order", type=int, default=None)
    inv.add_argument("--seed", type=int, default=0)
    inv.add_argument("--json", action="store_true")
    inv.set_defaults(func=run_invariants)

    ver = sub.add_parser("verify", help="run one verification suite")
    ver.add_argument("--suite", required=True, choices=SUITES)
    ver.add_argument("--dim", type=int, default=3)
    ver.add_argument("--order", type=int, default=3)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--json", action="store_true")
    ver.set_defaults(func=run_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tolerance_from_env()  # fail fast on a malformed CI_TOLERANCE
        return args.func(args)
    except ConfinvError as exc:
        return _emit_error(exc, getattr(args, "json", False))
    except OSError as exc:
        return _emit_error(exc, getattr(args, "json", False))


if __name__ == "__main__":
    sys.exit(main())
