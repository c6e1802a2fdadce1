"""Walk the size ladder for x0^4 x1 (x0 + x1), a binary sextic of rank 5.

Prints the catalecticant ranks and, for s = 3..6, what the extension method
does: a failure type at s = 3, 4 and a family of decompositions from s = 5 on.

    python scripts/binary_example.py --seeds 5 --randomize
"""

from __future__ import annotations

import argparse

import numpy as np

from hankelext.errors import AlgorithmicFailure
from hankelext.hankel import binary_decompose, binary_free_variables
from hankelext.tensor import SymTensor, apply_gl, hilbert_function, random_gl, reconstruction_residual


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--randomize", action="store_true", help="apply a seeded random change of basis")
    ap.add_argument("--gl-seed", type=int, default=2024)
    args = ap.parse_args()

    phi = SymTensor.from_dict(1, 6, {(1,): 1.0, (2,): 1.0})
    if args.randomize:
        phi = apply_gl(phi, random_gl(np.random.default_rng(args.gl_seed), 1))
    print("catalecticant ranks:", hilbert_function(phi))
    for s in range(3, 7):
        try:
            free = len(binary_free_variables(s, phi.d))
        except AlgorithmicFailure:
            free = 0
        res = []
        for seed in range(args.seeds):
            try:
                dec = binary_decompose(phi, s, seed=seed)
            except AlgorithmicFailure as exc:
                print(f"s={s}: {type(exc).__name__}: {exc}")
                break
            res.append(reconstruction_residual(phi, dec))
        else:
            print(f"s={s}: {free} free moments, {len(res)} decompositions, "
                  f"max residual {max(res):.2e}")


if __name__ == "__main__":
    main()
