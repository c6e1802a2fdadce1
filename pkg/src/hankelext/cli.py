"""Command-line entry point: `hankelext <subcommand> ...`.

Exit codes: 0 success, 1 input error, 2 algorithmic failure, 3 structural
infeasibility.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .config import DEFAULT, Tolerances
from .errors import AlgorithmicFailure, ArtifactError, InputError, OrderUnsupported, StructuralInfeasibility
from .ffverify import DEFAULT_PRIME, check_certificate, verify_format
from .hankel import binary_decompose
from .jennrich import jennrich_decompose, solve_weights
from .linear import count_threshold, count_Y_E1, decompose4, format_rank, tstar
from .monomial import (
    MonomialSpec,
    canonical_params,
    monomial_decompose,
    monomial_rank,
    vsp_dimension,
)
from .tensor import (
    Decomposition,
    SymTensor,
    apply_gl,
    catalecticant,
    dehomogenize,
    essential_vars,
    hilbert_function,
    numerical_rank,
    random_gl,
    reconstruction_residual,
)


# ------------------------------------------------------------------ helpers

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str, fallback_stderr: bool = False) -> None:
    """path None: stdout (or stderr); '-': stdout; otherwise a file."""
    if path is None or path == "-":
        stream = sys.stderr if (path is None and fallback_stderr) else sys.stdout
        stream.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


class _UsageError(InputError):
    pass


def _tols(args) -> Tolerances:
    return replace(DEFAULT, rank=args.tol) if args.tol is not None else DEFAULT


def _randomized(phi: SymTensor, seed: int, solve):
    """Run `solve` on a seeded GL image of phi and map the points back."""
    M = random_gl(np.random.default_rng([seed, 1]), phi.n)
    dec = solve(apply_gl(phi, M))
    back = np.linalg.solve(M, dec.points.T).T
    pts, _ = dehomogenize(back, np.ones(len(back)), phi.d)
    lam, _ = solve_weights(phi, pts)
    return Decomposition(pts, lam)


def _reduced(phi: SymTensor, tol: float, solve):
    """Decompose in essential variables when phi is not concise."""
    count, basis, red = essential_vars(phi, tol)
    if count == phi.n + 1 or count < 2:
        return solve(phi)
    dec = solve(red)
    full = dec.points @ basis
    pts, _ = dehomogenize(full, np.ones(len(full)), phi.d)
    lam, _ = solve_weights(phi, pts)
    return Decomposition(pts, lam)


# ------------------------------------------------------------- subcommands

def cmd_decompose(args) -> int:
    phi = io.loads_tensor(_read(args.input))
    tols = _tols(args)
    if phi.norm() == 0:
        dec = Decomposition(np.zeros((0, phi.n + 1)), np.zeros(0))
        _write(args.output, io.dumps_decomposition(dec))
        _write(args.certificate, "zero tensor: rank 0\n", fallback_stderr=True)
        return 0
    note: dict = {}

    def route(psi: SymTensor) -> Decomposition:
        if psi.n == 1 and args.size:
            note["path"] = "binary"
            return binary_decompose(psi, args.size, seed=args.seed, tols=tols)
        D = (psi.d - 1) // 2
        if psi.d >= 3 and (psi.d % 2 == 1 or numerical_rank(catalecticant(psi, D), tols.rank)
                           == numerical_rank(catalecticant(psi, psi.d // 2), tols.rank)):
            note["path"] = "jennrich"
            return jennrich_decompose(psi, args.seed, tols.rank, tols.eig, tols.residual)
        if psi.d % 2 == 0 and (psi.d == 4 or args.experimental_even_d):
            dec, cert = decompose4(psi, args.seed, tols, experimental=args.experimental_even_d)
            note["path"] = "linear"
            note["cert"] = cert.line()
            return dec
        raise OrderUnsupported(f"no decomposition path for d={psi.d}; "
                               "even d other than 4 needs --experimental-even-d")

    solve = (lambda psi: _randomized(psi, args.seed, route)) if args.randomize else route
    dec = _reduced(phi, tols.rank, solve)
    res = reconstruction_residual(phi, dec)
    if res > tols.residual:
        raise AlgorithmicFailure(f"reconstruction residual {res:.3g} exceeds {tols.residual:.3g}",
                                 stage="weights")
    _write(args.output, io.dumps_decomposition(dec))
    lines = [f"path={note.get('path')} n={phi.n} d={phi.d} s={dec.size} residual={res:.3e}"]
    if "cert" in note:
        lines.append(note["cert"])
    _write(args.certificate, "\n".join(lines) + "\n", fallback_stderr=True)
    return 0


def cmd_jennrich(args) -> int:
    phi = io.loads_tensor(_read(args.input))
    tols = _tols(args)
    run = lambda psi: jennrich_decompose(psi, args.seed, tols.rank, tols.eig, tols.residual)
    dec = _randomized(phi, args.seed, run) if args.randomize else run(phi)
    res = reconstruction_residual(phi, dec)
    _write(args.output, io.dumps_decomposition(dec))
    sys.stderr.write(f"path=jennrich n={phi.n} d={phi.d} s={dec.size} residual={res:.3e}\n")
    return 0


def cmd_monomial(args) -> int:
    try:
        spec = MonomialSpec(tuple(int(x) for x in args.degrees.split(",")))
    except ValueError:
        raise _UsageError(f"--degrees must be comma-separated integers, got {args.degrees!r}") from None
    tols = _tols(args)
    if args.params:
        params = io.loads_params(_read(args.params), spec.n)
        dec = monomial_decompose(spec, params=params, seed=args.seed, tols=tols)
    else:
        dec = monomial_decompose(spec, seed=args.seed, canonical=args.canonical, tols=tols)
    res = reconstruction_residual(spec.tensor(), dec)
    _write(args.output, io.dumps_decomposition(dec))
    if args.write_params:
        _write(args.write_params, io.dumps_params(canonical_params(spec)))
    sys.stderr.write(f"monomial degrees={','.join(map(str, spec.degrees))} rank={monomial_rank(spec)} "
                     f"|Y_P|={vsp_dimension(spec)} residual={res:.3e}\n")
    return 0


def cmd_verify(args) -> int:
    if args.check:
        ok = check_certificate(_read(args.check))
        print("certificate verified" if ok else "certificate REJECTED")
        return 0 if ok else 2
    if args.n is None or args.r is None:
        raise _UsageError("verify needs --n and --r (or --check FILE)")
    res = verify_format(args.n, args.r, args.prime, args.seed, args.trials,
                        e1_only=args.e1_only, raise_short=True)
    print(res.summary())
    if res.full:
        if args.certificate:
            _write(args.certificate, res.certificate())
        return 0
    return 2


def cmd_counts(args) -> int:
    if args.t is not None:
        print(f"n_t={count_threshold(args.t)}")
        return 0
    if args.tstar:
        print(f"t*={tstar():.15f}")
        return 0
    if args.n is None or args.c is None:
        raise _UsageError("counts needs --n and --c, or --t, or --tstar")
    y, e1 = count_Y_E1(args.n, args.c)
    print(f"|Y|={y} |E1|={e1} r={format_rank(args.n, args.c)}")
    return 0


def cmd_hilbert(args) -> int:
    phi = io.loads_tensor(_read(args.input))
    print(" ".join(map(str, hilbert_function(phi, _tols(args).rank))))
    return 0


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit 1, not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--input", default="-", help="tensor file ('-' for stdin)")
    shared.add_argument("--output", default="-", help="output file ('-' for stdout)")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--tol", type=float, default=None, help="relative rank tolerance")
    shared.add_argument("--randomize", action="store_true",
                        help="apply a seeded random change of basis first")

    p = _Parser(prog="hankelext", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", parents=[shared], help="decompose a tensor file")
    d.add_argument("--certificate", default=None, help="certificate file (default stderr)")
    d.add_argument("--size", type=int, default=None, help="binary tensors: decomposition size")
    d.add_argument("--experimental-even-d", action="store_true")
    d.set_defaults(func=cmd_decompose)

    j = sub.add_parser("jennrich", parents=[shared], help="simultaneous diagonalization only")
    j.set_defaults(func=cmd_jennrich)

    m = sub.add_parser("monomial", parents=[shared], help="decompose x0^d0 ... xn^dn")
    m.add_argument("--degrees", required=True, help="comma-separated d0,...,dn, ascending")
    g = m.add_mutually_exclusive_group()
    g.add_argument("--canonical", action="store_true")
    g.add_argument("--params", default=None, help="parameter file over Y_P")
    m.add_argument("--write-params", default=None, help="write the canonical parameter file")
    m.set_defaults(func=cmd_monomial)

    v = sub.add_parser("verify", parents=[shared], help="finite-field rank certificate")
    v.add_argument("--n", type=int)
    v.add_argument("--r", type=int)
    v.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    v.add_argument("--trials", type=int, default=3)
    v.add_argument("--e1-only", action="store_true")
    v.add_argument("--certificate", default=None)
    v.add_argument("--check", default=None, help="re-verify a certificate file")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counts", parents=[shared], help="|Y| and |E1| counts, thresholds")
    c.add_argument("--n", type=int)
    c.add_argument("--c", type=int)
    c.add_argument("--t", type=float)
    c.add_argument("--tstar", action="store_true")
    c.set_defaults(func=cmd_counts)

    h = sub.add_parser("hilbert", parents=[shared], help="catalecticant ranks")
    h.set_defaults(func=cmd_hilbert)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except StructuralInfeasibility as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return 3
    except AlgorithmicFailure as exc:
        sys.stderr.write(f"failed: {exc}\n")
        return 2
    except ArtifactError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
