"""Time and check the order-4 linear method and the Jennrich baseline over formats.

    python scripts/benchmark_formats.py --seeds 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hankelext.errors import ArtifactError
from hankelext.jennrich import jennrich_decompose
from hankelext.linear import decompose4
from hankelext.tensor import complex_gaussian, match_points, random_points, reconstruction_residual, tensor_from_points

LINEAR = [(2, 4), (3, 6), (3, 7), (4, 9), (4, 11), (5, 11), (5, 15), (6, 13), (6, 21), (7, 28), (8, 36)]
JENNRICH = [(3, 4), (5, 6), (8, 9), (5, 8)]


def _generic(n: int, r: int, d: int, seed: int):
    rng = np.random.default_rng(seed)
    pts = random_points(rng, r, n)
    lam = complex_gaussian(rng, r)
    return tensor_from_points(pts, lam, d), pts


def _row(label: str, n: int, r: int, seed: int, run, d: int) -> None:
    phi, pts = _generic(n, r, d, seed)
    t0 = time.perf_counter()
    try:
        dec, note = run(phi, seed)
        dt = time.perf_counter() - t0
        print(f"{label:<9} ({n:>2},{r:>3}) seed={seed:<3} {dt:>7.3f}s  "
              f"point err {match_points(dec.points, pts):.1e}  "
              f"residual {reconstruction_residual(phi, dec):.1e}  {note}")
    except ArtifactError as exc:
        dt = time.perf_counter() - t0
        print(f"{label:<9} ({n:>2},{r:>3}) seed={seed:<3} {dt:>7.3f}s  {type(exc).__name__}: {exc}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=2)
    args = ap.parse_args()

    def linear(phi, seed):
        dec, cert = decompose4(phi, seed=seed)
        return dec, f"unique={str(cert.unique).lower()}"

    def jennrich(phi, seed):
        return jennrich_decompose(phi, seed=seed), ""

    for n, r in LINEAR:
        for seed in range(args.seeds):
            _row("linear", n, r, seed, linear, 4)
    for n, r in JENNRICH:
        for seed in range(args.seeds):
            _row("jennrich", n, r, seed, jennrich, 3)


if __name__ == "__main__":
    main()
