#!/usr/bin/env python3
"""How many local conformal invariants are there, order by order?

This script walks the counting side of the package from first
principles and checks itself as it goes:

1) Prints the table of pure-order counts H_n(k) for n = 3..5 and
   cross-checks every entry against the symbol/relation difference
   dim S^k - dim delta_{k+1} computed by an independent code path.
2) Rebuilds the generating function P_n(z) from scratch, reduces it,
   and compares its Taylor coefficients with the direct counts.
3) Probes the n = 3 anomaly: the general closed form that works for
   every n >= 4 fails at n = 3, and the script shows the exact
   rational-function discrepancy rather than asserting it away.
4) Spot-checks the stabilizer story with the brute-force orbit oracle:
   the codimension of a generic orbit in the k-jet fiber must equal
   the transcendence degree returned by the counting formulas.

All arithmetic in stages 1-3 is exact (integers and Fractions); no
tolerances appear anywhere.  Stage 4 does exact rank computations over
randomized rational jets, so its seeds are printed.

Usage:
  python3 demos/counting_demo.py
  python3 demos/counting_demo.py --max-dim 6 --max-order 8
  python3 demos/counting_demo.py --skip-orbit
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time

from confinv.counting import (
    dim_delta,
    dim_symbol,
    hilbert,
    poincare,
    poincare_general,
    poincare_general_check,
    trdeg,
)
from confinv.orbits import fiber_dim, orbit_dim_bruteforce
from confinv.ratfunc import Poly

W = 78


def title(s: str) -> str:
    pad = max(0, W - len(s) - 2)
    return f"{'=' * (pad // 2)} {s} {'=' * (pad - pad // 2)}"


def fmt_poly(p: Poly) -> str:
    parts = []
    for i, c in enumerate(p.coeffs):
        if c == 0:
            continue
        mag = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
        if not mag:
            parts.append(f"{c}")
        elif c == 1:
            parts.append(mag)
        elif c == -1:
            parts.append(f"-{mag}")
        else:
            parts.append(f"{c}{mag}")
    if not parts:
        return "0"
    out = parts[0]
    for t in parts[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


def fmt_over_unit_pole(r, n: int) -> str:
    """Render a generating function with its (1 - z)^n pole made explicit."""
    target = Poly([1, -1]) ** n
    if r.den == target:
        return f"({fmt_poly(r.num)}) / (1 - z)^{n}"
    if r.den == target * Poly([-1]):
        return f"({fmt_poly(r.num * Poly([-1]))}) / (1 - z)^{n}"
    if r.den == Poly([1]):
        return fmt_poly(r.num)
    return f"({fmt_poly(r.num)}) / ({fmt_poly(r.den)})"


@dataclasses.dataclass(frozen=True)
class Gate:
    name: str
    ok: bool
    detail: str = ""


def print_gate(g: Gate) -> None:
    tag = "PASS" if g.ok else "FAIL"
    detail = f"  {g.detail}" if g.detail else ""
    print(f"{tag:<5} {g.name}{detail}")


def stage_table(max_dim: int, max_order: int) -> Gate:
    print(title("STAGE 1: counts of pure-order invariants"))
    corner = "n | k"
    print(f"{corner:>6}", *(f"{k:>8}" for k in range(1, max_order + 1)))
    for n in range(3, max_dim + 1):
        row = [hilbert(n, k) for k in range(1, max_order + 1)]
        print(f"{n:>6}", *(f"{v:>8}" for v in row))
    print()
    print("Reading the table: no invariants exist below order 2 in any")
    print("dimension, n = 3 stays silent through order 2 as well, and the")
    print("first nonzero entries (1 at n=3 k=3, 3 at n=4 k=2, 24 at n=5 k=2)")
    print("are where the fundamental curvature quantities first appear.")
    print()
    print("Above the low orders the count is just a difference of two space")
    print("dimensions: the order-k symbol space minus the next graded piece")
    print("of the diffeomorphism jet group.  That naive subtraction becomes")
    print("valid once the group acts freely, at k = 4 for n >= 4 and k = 5")
    print("for n = 3; below that, stabilizers eat part of the action and the")
    print("special-case values in the table take over.")
    mismatches = 0
    checked = 0
    for n in range(3, max_dim + 1):
        for k in range(5 if n == 3 else 4, max(max_order, 12) + 1):
            checked += 1
            if hilbert(n, k) != dim_symbol(n, k) - dim_delta(n, k + 1):
                mismatches += 1
    return Gate(
        "stable-range counts equal dim S^k - dim delta_(k+1)",
        mismatches == 0,
        f"checked {checked} entries",
    )


def stage_poincare(max_dim: int) -> list[Gate]:
    print(title("STAGE 2: generating functions"))
    gates = []
    for n in range(3, max_dim + 1):
        p = poincare(n)
        print(f"P_{n}(z) = {fmt_over_unit_pole(p, n)}")
        terms = 2 * n + 7
        series = [int(c) for c in p.series(terms)]
        direct = [hilbert(n, k) for k in range(terms)]
        gates.append(
            Gate(
                f"P_{n} series matches direct counts through z^{terms - 1}",
                series == direct,
            )
        )
    return gates


def stage_anomaly(max_dim: int) -> list[Gate]:
    print(title("STAGE 3: the n = 3 anomaly"))
    print("A single closed form covers the generating functions of all")
    print("dimensions n >= 4.  Extrapolating it down to n = 3 is wrong, and")
    print("the discrepancy is itself a polynomial worth looking at:")
    diff = poincare(3) - poincare_general(3)
    print(f"  P_3(z) - P_3^general(z) = {fmt_over_unit_pole(diff, 3)}")
    gates = []
    for n in range(3, max_dim + 1):
        agrees = poincare_general_check(n)
        gates.append(
            Gate(
                f"general closed form at n={n}: {'agrees' if n != 3 else 'must disagree'}",
                agrees == (n != 3),
                f"agreement={agrees}",
            )
        )
    return gates


def stage_orbit(seeds: int) -> list[Gate]:
    print(title("STAGE 4: orbit-dimension oracle"))
    print("The counting formulas predict that a generic k-jet orbit has")
    print("codimension trdeg(n, k) in its fiber.  The oracle below builds the")
    print("action of jet-level diffeomorphisms directly and measures the")
    print("orbit dimension as an exact matrix rank, no formulas involved.")
    gates = []
    for n, k in ((3, 3), (4, 2)):
        fiber = fiber_dim(n, k)
        want = fiber - trdeg(n, k)
        t0 = time.time()
        ranks = [orbit_dim_bruteforce(n, k, seed) for seed in range(seeds)]
        dt = time.time() - t0
        print(
            f"  n={n} k={k}: fiber {fiber}, predicted orbit dim {want}, "
            f"measured {ranks} ({dt:.1f}s, seeds 0..{seeds - 1})"
        )
        gates.append(
            Gate(
                f"orbit dimension at (n={n}, k={k}) equals fiber - trdeg",
                all(r == want for r in ranks),
            )
        )
    return gates


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-dim", type=int, default=5, help="largest n (default 5)")
    ap.add_argument("--max-order", type=int, default=6, help="largest k in the table")
    ap.add_argument("--orbit-seeds", type=int, default=3, help="oracle seeds per pair")
    ap.add_argument("--skip-orbit", action="store_true", help="skip stage 4")
    args = ap.parse_args()
    if args.max_dim < 3:
        ap.error("--max-dim must be at least 3")

    gates = [stage_table(args.max_dim, args.max_order)]
    gates += stage_poincare(args.max_dim)
    gates += stage_anomaly(args.max_dim)
    if args.skip_orbit:
        print(title("STAGE 4: orbit-dimension oracle"))
        print("skipped (--skip-orbit)")
    else:
        gates += stage_orbit(args.orbit_seeds)

    print(title("VERDICT"))
    for g in gates:
        print_gate(g)
    ok = all(g.ok for g in gates)
    print("PASS: all gates hold" if ok else "FAIL: at least one gate failed")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
