"""Decompositions of monomials x0^{d0} x1^{d1} ... xn^{dn} with d0 <= d1 <= ... <= dn.

The basis is the box {alpha <= dbar}; the moments exceeding dbar in exactly one
coordinate are free parameters and every other moment is fixed, grade by
grade, by one bordered determinant that is affine in it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch, InternalMismatch, OutOfRange, Unreachable
from .hankel import (
    HankelMatrix,
    MonomialBasis,
    extract_decomposition,
    hankel,
    moment_variables,
    multiplication_matrices,
)
from .jennrich import solve_weights
from .tensor import Decomposition, Exponent, SymTensor, complex_gaussian, glex_key, shift


@dataclass(frozen=True)
class MonomialSpec:
    degrees: tuple[int, ...]

    def __post_init__(self):
        degs = tuple(int(x) for x in self.degrees)
        if len(degs) < 2:
            raise DimensionMismatch("need at least x0 and one more variable")
        if degs[0] < 1:
            raise OutOfRange("x0 must appear (d0 >= 1)")
        if any(a > b for a, b in zip(degs, degs[1:])):
            raise OutOfRange(f"degrees must be sorted ascending, got {degs}")
        object.__setattr__(self, "degrees", degs)

    @property
    def n(self) -> int:
        return len(self.degrees) - 1

    @property
    def d(self) -> int:
        return sum(self.degrees)

    @property
    def d0(self) -> int:
        return self.degrees[0]

    @property
    def dbar(self) -> Exponent:
        return self.degrees[1:]

    def tensor(self) -> SymTensor:
        return SymTensor.from_dict(self.n, self.d, {self.dbar: 1.0})

    def exceed(self, gamma: Exponent) -> int:
        """Number of coordinates with gamma_i > d_i."""
        return sum(g > b for g, b in zip(gamma, self.dbar))

    def grade(self, gamma: Exponent) -> int:
        excess = sum(gamma) - self.d
        return -(-excess // (self.d0 + 1))


def monomial_basis(spec: MonomialSpec) -> MonomialBasis:
    box = product(*(range(b + 1) for b in spec.dbar))
    return MonomialBasis(spec.n, tuple(sorted(box, key=glex_key)))


def monomial_rank(spec: MonomialSpec) -> int:
    out = 1
    for b in spec.dbar:
        out *= b + 1
    return out


@dataclass(frozen=True)
class GradedVarSet:
    Y: tuple[Exponent, ...]
    grades: dict
    exceed: dict

    @property
    def params(self) -> tuple[Exponent, ...]:
        return tuple(g for g in self.Y if self.exceed[g] == 1)

    @property
    def max_grade(self) -> int:
        return max(self.grades.values(), default=0)

    def layer(self, k: int, ell: int | None = None) -> list[Exponent]:
        return [g for g in self.Y if self.grades[g] == k and (ell is None or self.exceed[g] == ell)]


def parameter_set(spec: MonomialSpec) -> GradedVarSet:
    B = monomial_basis(spec)
    Y = tuple(moment_variables(B, spec.n, spec.d))
    return GradedVarSet(Y, {g: spec.grade(g) for g in Y}, {g: spec.exceed(g) for g in Y})


def _h_ideal(degs: tuple[int, ...], t: int) -> int:
    """Monomials of degree t in a0..an with a_i^{d_i+1} excluded for i >= 1."""
    if t < 0:
        return 0
    count = 0
    for e in product(*(range(min(b, t) + 1) for b in degs)):
        if sum(e) <= t:
            count += 1
    return count


def vsp_dimension(spec: MonomialSpec) -> int:
    yp = len(parameter_set(spec).params)
    dual = sum(_h_ideal(spec.dbar, dj - spec.d0) for dj in spec.dbar)
    if yp != dual:
        raise InternalMismatch(f"|Y_P| = {yp} but the Hilbert-function count gives {dual}")
    return yp


def canonical_params(spec: MonomialSpec) -> dict[Exponent, complex]:
    out = {g: 0j for g in parameter_set(spec).params}
    for i, di in enumerate(spec.dbar):
        g = list(spec.dbar)
        g[i] = 2 * di + 1
        out[tuple(g)] = 1.0 + 0j
    return out


def random_params(spec: MonomialSpec, seed: int) -> dict[Exponent, complex]:
    P = parameter_set(spec).params
    vals = complex_gaussian(np.random.default_rng(seed), len(P))
    return dict(zip(P, vals))


# ----------------------------------------------------------- graded solve

def representations(spec: MonomialSpec, B: MonomialBasis, gamma: Exponent):
    """All (alpha, i, beta, j), i != j, with alpha+beta+e_i+e_j = gamma and both shifts outside B."""
    n = spec.n
    for alpha in B:
        for i in range(1, n + 1):
            ai = shift(alpha, i)
            if ai in B:
                continue
            for j in range(1, n + 1):
                if j == i:
                    continue
                beta = tuple(g - a - (k + 1 == i) - (k + 1 == j)
                             for k, (g, a) in enumerate(zip(gamma, alpha)))
                if min(beta) < 0 or beta not in B or shift(beta, j) in B:
                    continue
                yield alpha, i, beta, j


def _bordered(H: HankelMatrix, B: MonomialBasis, eta: Exponent, theta: Exponent,
              assignment: Mapping) -> np.ndarray:
    exps = list(B)
    return H.block(exps + [eta], exps + [theta], assignment, missing=0.0)


def graded_solve(spec: MonomialSpec, params: Mapping[Exponent, complex]) -> dict[Exponent, complex]:
    """Fill every non-parameter moment from its graded-lex-least bordered determinant."""
    gv = parameter_set(spec)
    B = monomial_basis(spec)
    H = hankel(spec.tensor())
    missing = [g for g in gv.params if g not in params]
    if missing:
        raise DimensionMismatch(f"parameters missing for {missing}")
    A: dict[Exponent, complex] = {g: complex(params[g]) for g in gv.params}
    exps = list(B)
    for k in range(1, gv.max_grade + 1):
        for gamma in gv.layer(k):
            if gv.exceed[gamma] == 1:
                continue
            rep = next(representations(spec, B, gamma), None)
            if rep is None:
                raise Unreachable(f"no bordered determinant isolates y_{gamma}")
            alpha, i, beta, j = rep
            M = _bordered(H, B, shift(alpha, i), shift(beta, j), A)
            M[-1, -1] = 0.0
            lead = np.linalg.det(H.block(exps, exps, A, missing=0.0))
            A[gamma] = complex(-np.linalg.det(M) / lead)
    return {g: A[g] for g in gv.Y}


def representation_residuals(spec: MonomialSpec, assignment: Mapping) -> float:
    """Largest |D| over every representation of every non-parameter moment."""
    B = monomial_basis(spec)
    H = hankel(spec.tensor())
    gv = parameter_set(spec)
    worst = 0.0
    for gamma in gv.Y:
        if gv.exceed[gamma] == 1:
            continue
        for alpha, i, beta, j in representations(spec, B, gamma):
            M = H.block(list(B) + [shift(alpha, i)], list(B) + [shift(beta, j)], assignment, missing=0.0)
            worst = max(worst, abs(np.linalg.det(M)))
    return worst


def canonical_points(spec: MonomialSpec) -> np.ndarray:
    """Grid (1, zeta_1^{a_1}, ..., zeta_n^{a_n}) with zeta_i = exp(2 pi i / (d_i + 1))."""
    roots = [np.exp(2j * np.pi * np.arange(b + 1) / (b + 1)) for b in spec.dbar]
    grid = list(product(*roots))
    pts = np.ones((len(grid), spec.n + 1), dtype=complex)
    pts[:, 1:] = np.array(grid)
    return pts


def monomial_decompose(spec: MonomialSpec, params: Mapping | None = None, seed: int = 0,
                       canonical: bool = False, tols: Tolerances = DEFAULT) -> Decomposition:
    phi = spec.tensor()
    if canonical:
        pts = canonical_points(spec)
        lam, _ = solve_weights(phi, pts)
        return Decomposition(pts, lam)
    if params is None:
        params = random_params(spec, seed)
    A = graded_solve(spec, params)
    B = monomial_basis(spec)
    M = multiplication_matrices(hankel(phi), B, A, tols.rank)
    dec = extract_decomposition(M, seed, tols.eig)
    lam, _ = solve_weights(phi, dec.points)
    return Decomposition(dec.points, lam)


# ------------------------------------------------------------------ torus

@dataclass(frozen=True)
class TorusResult:
    equivalent: bool
    tau: np.ndarray | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def _integer_echelon(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unimodular U (integer) with U W in row echelon form."""
    R = [list(map(int, row)) for row in W]
    m = len(R)
    ncol = len(R[0]) if m else 0
    U = [[int(p == q) for q in range(m)] for p in range(m)]
    top = 0
    for c in range(ncol):
        if top >= m:
            break
        while True:
            nz = [p for p in range(top, m) if R[p][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda p: abs(R[p][c]))
            R[top], R[piv] = R[piv], R[top]
            U[top], U[piv] = U[piv], U[top]
            done = True
            for p in range(top + 1, m):
                if R[p][c]:
                    q = R[p][c] // R[top][c]
                    R[p] = [x - q * y for x, y in zip(R[p], R[top])]
                    U[p] = [x - q * y for x, y in zip(U[p], U[top])]
                    if R[p][c]:
                        done = False
            if done:
                break
        if any(R[p][c] for p in range(top, m)):
            top += 1
    return np.array(U, dtype=np.int64).reshape(m, m), np.array(R, dtype=np.int64).reshape(m, ncol)


def torus_equivalent(spec: MonomialSpec, p1: Mapping, p2: Mapping,
                     tol: float = 1e-9) -> TorusResult:
    """Scalars tau with tau^gamma p1(gamma) = tau^dbar p2(gamma) on every parameter, if any."""
    P = parameter_set(spec).params
    rows, logs = [], []
    for g in P:
        a, b = complex(p1[g]), complex(p2[g])
        za, zb = abs(a) <= tol, abs(b) <= tol
        if za and zb:
            continue
        if za != zb:
            return TorusResult(False)
        rows.append([x - y for x, y in zip(g, spec.dbar)])
        logs.append(np.log(b / a))
    if not rows:
        return TorusResult(True, np.ones(spec.n, dtype=complex))
    W = np.array(rows, dtype=np.int64)
    L = np.array(logs, dtype=complex)
    U, R = _integer_echelon(W)
    ULog = U @ L
    nz = np.any(R != 0, axis=1)
    # relations among the rows must hold multiplicatively (mod 2 pi i)
    for val in ULog[~nz]:
        if abs(np.exp(val) - 1) > tol * 1e3:
            return TorusResult(False)
    rho, *_ = np.linalg.lstsq(R[nz].astype(float), ULog[nz], rcond=None)
    tau = np.exp(rho)
    lhs = np.exp(W.astype(float) @ rho)
    ratios = np.exp(L)
    if np.abs(lhs - ratios).max() > 1e3 * tol * max(1.0, np.abs(ratios).max()):
        return TorusResult(False)
    return TorusResult(True, tau)
