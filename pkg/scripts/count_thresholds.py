"""Asymptotic count thresholds: n_t such that |E1| >= |Y| for all n >= n_t at c = t n.

Also prints t* (the root of the leading coefficient) and the rank bound
r = sum_{j=0..tn} (n - j + 1) = (t - t^2/2) n^2 + (1 + t/2) n + 1.

    python scripts/count_thresholds.py
"""

from __future__ import annotations

import argparse

from hankelext.linear import count_threshold, count_Y_E1, format_rank, tstar


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=float, nargs="*", default=[0.4, 0.5, 0.6, 0.63, 0.632])
    ap.add_argument("--table-n", type=int, default=10, help="also print |Y|, |E1| for n up to this")
    args = ap.parse_args()

    print(f"t* = {tstar():.12f}")
    print(f"{'t':>6} {'n_t':>6}   rank bound")
    for t in args.t:
        q, lin = t - t * t / 2, 1 + t / 2
        print(f"{t:>6} {count_threshold(t):>6}   {q:.6g} n^2 + {lin:.6g} n + 1")

    print()
    print(f"{'n':>3} {'c':>3} {'r':>5} {'|Y|':>7} {'|E1|':>7} {'tall':>5}")
    for n in range(2, args.table_n + 1):
        for c in range(1, n + 1):
            y, e1 = count_Y_E1(n, c)
            print(f"{n:>3} {c:>3} {format_rank(n, c):>5} {y:>7} {e1:>7} {'yes' if e1 >= y else 'no':>5}")


if __name__ == "__main__":
    main()
