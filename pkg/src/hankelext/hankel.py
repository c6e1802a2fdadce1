"""Hankel matrices with moment variables and eigenvector recovery of points.

Entries of the Hankel matrix indexed by (alpha, beta) are the tensor values
phi_{alpha+beta} when |alpha+beta| <= d and unknown moments y_{alpha+beta}
otherwise. A moment assignment is a plain dict from exponent to value.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    Defective,
    DimensionMismatch,
    EigenvalueMismatch,
    NormalizationFailure,
    OutOfRange,
    SingularPrincipalBlock,
    Unreachable,
)
from .jennrich import solve_weights
from .tensor import (
    Decomposition,
    Exponent,
    SymTensor,
    add,
    catalecticant,
    complex_gaussian,
    glex_key,
    monomial_index,
    monomials_up_to,
    shift,
    unit,
)

MomentAssignment = Mapping[Exponent, complex]


@dataclass(frozen=True)
class Known:
    value: complex


@dataclass(frozen=True)
class Moment:
    exponent: Exponent


# ------------------------------------------------------------------- basis

@dataclass(frozen=True)
class MonomialBasis:
    """Ordered exponent set B, closed under removing one variable at a time."""

    n: int
    exponents: tuple[Exponent, ...]

    def __post_init__(self):
        exps = tuple(tuple(int(x) for x in a) for a in self.exponents)
        if any(len(a) != self.n for a in exps):
            raise DimensionMismatch("exponent length differs from n")
        if len(set(exps)) != len(exps):
            raise DimensionMismatch("repeated exponent in basis")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "_index", {a: p for p, a in enumerate(exps)})
        if not self.connected():
            raise OutOfRange("basis is not connected to 1")

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self.index

    @property
    def index(self) -> dict[Exponent, int]:
        return self._index

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.exponents), default=0)

    def sizes_by_degree(self) -> list[int]:
        out = [0] * (self.degree + 1)
        for a in self.exponents:
            out[sum(a)] += 1
        return out

    def shifted(self, i: int) -> list[Exponent]:
        """B_i = {alpha + e_i : alpha in B}."""
        return [shift(a, i) for a in self.exponents]

    def connected(self) -> bool:
        s = set(self.exponents)
        for a in s:
            if sum(a) == 0:
                continue
            if not any(a[j] > 0 and tuple(x - (k == j) for k, x in enumerate(a)) in s
                       for j in range(self.n)):
                return False
        return not s or (0,) * self.n in s


# ------------------------------------------------------------------ Hankel

@dataclass(frozen=True)
class HankelMatrix:
    """Rows |alpha| <= d, columns |beta| <= d+1; entries looked up lazily."""

    phi: SymTensor

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def d(self) -> int:
        return self.phi.d

    @property
    def rows(self) -> tuple[Exponent, ...]:
        return monomials_up_to(self.n, self.d)

    @property
    def cols(self) -> tuple[Exponent, ...]:
        return monomials_up_to(self.n, self.d + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def entry(self, alpha: Exponent, beta: Exponent) -> Known | Moment:
        g = add(alpha, beta)
        if sum(g) <= self.d:
            return Known(self.phi[g])
        return Moment(g)

    def value(self, gamma: Exponent, assignment: MomentAssignment | None = None,
              missing: complex | None = None) -> complex:
        if sum(gamma) <= self.d:
            return self.phi.data[monomial_index(self.n, self.d)[gamma]]
        if assignment is not None and gamma in assignment:
            return assignment[gamma]
        if missing is None:
            raise Unreachable(f"moment y_{gamma} is not assigned")
        return missing

    def block(self, R: Sequence[Exponent], C: Sequence[Exponent],
              assignment: MomentAssignment | None = None,
              missing: complex | None = None) -> np.ndarray:
        out = np.empty((len(R), len(C)), dtype=complex)
        for p, a in enumerate(R):
            for q, b in enumerate(C):
                out[p, q] = self.value(add(a, b), assignment, missing)
        return out

    def moment_exponents(self) -> list[Exponent]:
        """Every exponent alpha+beta of size > d over the full row/column range."""
        seen = {add(a, b) for a in self.rows for b in self.cols}
        return sorted((g for g in seen if sum(g) > self.d), key=glex_key)


def hankel(phi: SymTensor) -> HankelMatrix:
    return HankelMatrix(phi)


def moment_variables(B: MonomialBasis, n: int, d: int) -> list[Exponent]:
    """Y = {alpha + alpha' + e_i : alpha, alpha' in B, |.| >= d+1}, graded-lex."""
    out = set()
    exps = list(B)
    for p, a in enumerate(exps):
        for b in exps[p:]:
            ab = add(a, b)
            if sum(ab) + 1 < d + 1:
                continue
            for i in range(1, n + 1):
                out.add(shift(ab, i))
    return sorted(out, key=glex_key)


# -------------------------------------------------------------- find_basis

def find_basis(phi: SymTensor, tol: float = DEFAULT.rank) -> MonomialBasis:
    """Greedy connected-to-1 column selection in the middle catalecticant.

    Degree by degree, candidates x_i * B_{k-1} are scanned in graded-lex order
    and kept when independent of the columns already chosen, until |B_{<=k}|
    equals the rank of the catalecticant restricted to degree <= k columns.
    """
    n, d = phi.n, phi.d
    k0 = d // 2
    C = catalecticant(phi, k0)
    cols = monomials_up_to(n, k0)
    cidx = monomial_index(n, k0)
    sv = np.linalg.svd(C, compute_uv=False)
    smax = sv[0] if sv.size else 0.0
    if smax == 0:
        return MonomialBasis(n, ())
    thr = tol * smax

    def rank_upto(k: int) -> int:
        m = sum(1 for b in cols if sum(b) <= k)
        s = np.linalg.svd(C[:, :m], compute_uv=False)
        return int(np.sum(s > thr))

    targets = [rank_upto(k) for k in range(k0 + 1)]
    if targets[0] == 0:
        raise SingularPrincipalBlock(
            f"the column of the monomial 1 vanishes (rank Cat_{k0} = {targets[-1]}); "
            "for monomial tensors use the monomial module, otherwise retry with --randomize",
            stage="find_basis")
    chosen: list[Exponent] = [(0,) * n]
    Q = C[:, [0]] / np.linalg.norm(C[:, 0])
    prev = list(chosen)
    for k in range(1, k0 + 1):
        need = targets[k] - len(chosen)
        if need <= 0:
            break
        cands = sorted({shift(a, i) for a in prev for i in range(1, n + 1)}, key=glex_key)
        layer = []
        for c in cands:
            if need == 0:
                break
            v = C[:, cidx[c]]
            r = v - Q @ (Q.conj().T @ v)
            r = r - Q @ (Q.conj().T @ r)
            nr = np.linalg.norm(r)
            if nr > thr:
                Q = np.column_stack([Q, r / nr])
                layer.append(c)
                need -= 1
        if need > 0:
            raise SingularPrincipalBlock(
                f"degree {k} columns reach only {targets[k] - need} of rank {targets[k]}",
                stage="find_basis")
        chosen.extend(layer)
        prev = layer
    B = MonomialBasis(n, tuple(sorted(chosen, key=glex_key)))
    H = hankel(phi).block(B.exponents, B.exponents)
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise SingularPrincipalBlock("principal Hankel block is numerically singular",
                                     stage="find_basis")
    return B


# ------------------------------------------------------ determinantal forms

def _relation_pairs(B: MonomialBasis, n: int):
    exps = list(B)
    for a, b in combinations(exps, 2):
        for i, j in combinations(range(1, n + 1), 2):
            yield a, b, i, j


def determinantal_residuals(H: HankelMatrix, B: MonomialBasis,
                            A: MomentAssignment) -> tuple[np.ndarray, float]:
    """|D(a+e_i, b+e_j) - D(a+e_j, b+e_i)| over a < b in B and i < j.

    D(eta, theta) is the determinant of the Hankel block bordered by row eta
    and column theta. The corner y_{a+b+e_i+e_j} is shared by both terms with
    the same cofactor, so an unassigned corner is set to 0. Returns the
    residuals and the largest |det| seen, for relative comparisons.
    """
    n = H.n
    base = list(B)
    rel = list(_relation_pairs(B, n))
    if not rel:
        return np.zeros(0), 0.0
    out = np.empty(len(rel))
    scale = 0.0
    chunk = 1024
    for start in range(0, len(rel), chunk):
        part = rel[start:start + chunk]
        m1 = np.stack([H.block(base + [shift(a, i)], base + [shift(b, j)], A, missing=0.0)
                       for a, b, i, j in part])
        m2 = np.stack([H.block(base + [shift(a, j)], base + [shift(b, i)], A, missing=0.0)
                       for a, b, i, j in part])
        d1 = np.linalg.det(m1)
        d2 = np.linalg.det(m2)
        out[start:start + len(part)] = np.abs(d1 - d2)
        scale = max(scale, float(np.abs(d1).max()), float(np.abs(d2).max()))
    return out, scale


# --------------------------------------------------- multiplication matrices

@dataclass(frozen=True)
class MultiplicationMatrices:
    B: MonomialBasis
    mats: tuple[np.ndarray, ...]


def multiplication_matrices(H: HankelMatrix, B: MonomialBasis, A: MomentAssignment,
                            tol: float = DEFAULT.rank) -> MultiplicationMatrices:
    """M_i = H_{B,B_i} H_{B,B}^{-1} by a linear solve against the symmetric block."""
    exps = list(B)
    HBB = H.block(exps, exps, A)
    s = np.linalg.svd(HBB, compute_uv=False)
    if s.size == 0 or s[-1] <= tol * s[0]:
        raise SingularPrincipalBlock("principal Hankel block is numerically singular",
                                     stage="multiplication")
    mats = []
    for i in range(1, H.n + 1):
        HBi = H.block(exps, B.shifted(i), A)
        mats.append(np.linalg.solve(HBB.T, HBi.T).T)
    return MultiplicationMatrices(B, tuple(mats))


def commuting_residuals(M: MultiplicationMatrices) -> float:
    worst = 0.0
    for P, Q in combinations(M.mats, 2):
        worst = max(worst, float(np.abs(P @ Q - Q @ P).max()))
    return worst


def extract_decomposition(M: MultiplicationMatrices, seed: int = 0,
                          tol: float = DEFAULT.eig) -> Decomposition:
    """Joint eigenvectors z^B of the multiplication matrices, read as points."""
    B = M.B
    n = B.n
    idx = B.index
    one = (0,) * n
    if one not in idx:
        raise NormalizationFailure("basis lacks the monomial 1", stage="extract")
    rng = np.random.default_rng(seed)
    a = complex_gaussian(rng, n)
    G = sum(ai * Mi for ai, Mi in zip(a, M.mats))
    _, V = np.linalg.eig(G)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond >= 1.0 / tol:
        raise Defective(f"eigenvector matrix condition {cond:.3g} exceeds {1 / tol:.3g}",
                        stage="extract")
    head = V[idx[one]]
    if np.any(np.abs(head) <= tol * np.linalg.norm(V, axis=0)):
        raise NormalizationFailure(
            "an eigenvector vanishes at the monomial 1; retry after a random change of basis",
            stage="extract")
    V = V / head
    s = V.shape[1]
    pts = np.ones((s, n + 1), dtype=complex)
    for j in range(1, n + 1):
        ej = unit(n, j)
        Mj = M.mats[j - 1]
        if ej in idx:
            pts[:, j] = V[idx[ej]]
        else:
            pts[:, j] = np.einsum("ik,ij,jk->k", V.conj(), Mj, V) / np.einsum("ik,ik->k", V.conj(), V)
        err = np.linalg.norm(Mj @ V - V * pts[:, j], axis=0)
        bound = tol * max(1.0, np.linalg.norm(Mj, 2)) * np.linalg.norm(V, axis=0)
        if np.any(err > bound):
            raise EigenvalueMismatch(f"x{j} coordinate disagrees with its eigenvalue",
                                     stage="extract")
    return Decomposition(pts)


# ------------------------------------------------------------------ binary

def binary_free_variables(s: int, d: int) -> list[Exponent]:
    return [(k,) for k in range(d + 1, 2 * s)]


def binary_decompose(phi: SymTensor, s: int, params: MomentAssignment | None = None,
                     seed: int = 0, tols: Tolerances = DEFAULT) -> Decomposition:
    """Size-s decomposition of a binary tensor with free moments as parameters."""
    if phi.n != 1:
        raise DimensionMismatch("binary_decompose needs n = 1")
    if s < 1:
        raise OutOfRange("size must be positive")
    B = MonomialBasis(1, tuple((k,) for k in range(s)))
    free = binary_free_variables(s, phi.d)
    if params is None:
        rng = np.random.default_rng(seed)
        vals = complex_gaussian(rng, len(free))
        params = dict(zip(free, vals))
    missing = [g for g in free if g not in params]
    if missing:
        raise DimensionMismatch(f"parameters missing for {missing}")
    H = hankel(phi)
    M = multiplication_matrices(H, B, params, tols.rank)
    dec = extract_decomposition(M, seed, tols.eig)
    lam, _ = solve_weights(phi, dec.points)
    return Decomposition(dec.points, lam)
