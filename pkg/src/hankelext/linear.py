"""Linear subsystem of the determinantal relations for even-order tensors.

With W = H_BB^{-1} and h_eta the column (eta + b)_{b in B}, the bordered
determinant factors as D(eta, theta) = det(H_BB) (y_{eta+theta} - h_eta' W h_theta).
For |alpha| = d/2 and |beta| = d/2 - 1, h_{beta+e_j} is fully known, so the
relation D(alpha+e_i, beta+e_j) - D(alpha+e_j, beta+e_i) = 0 is affine in the
moments. Relations with |alpha| = |beta| = d/2 are quadratic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .config import DEFAULT, Tolerances
from .errors import (
    ArtifactError,
    DimensionMismatch,
    ExtensionFailed,
    OrderUnsupported,
    OutOfRange,
    ResidualTooLarge,
    SingularPrincipalBlock,
    Unverifiable,
)
from .hankel import (
    MonomialBasis,
    extract_decomposition,
    find_basis,
    hankel,
    moment_variables,
    multiplication_matrices,
)
from .jennrich import solve_weights
from .tensor import (
    Decomposition,
    Exponent,
    SymTensor,
    add,
    complex_gaussian,
    dehomogenize,
    glex_key,
    monomials_up_to,
    random_gl,
    apply_gl,
    shift,
)

Pair = tuple[Exponent, Exponent]


# --------------------------------------------------------- classification

def _check_order(d: int, experimental: bool = False) -> None:
    if d % 2:
        raise OrderUnsupported(f"the linear path needs even d, got {d}")
    if d != 4 and not experimental:
        raise OrderUnsupported(f"the linear path is validated for d = 4 only, got {d}")


def classify_equation(B: MonomialBasis, d: int, alpha: Exponent, i: int,
                      beta: Exponent, j: int) -> str:
    """'zero', 'linear' or 'quadratic' for the relation indexed by (alpha, i, beta, j)."""
    _check_order(d)
    if i == j or alpha not in B or beta not in B:
        raise DimensionMismatch("need alpha, beta in B and i != j")
    h = d // 2
    if sum(alpha) + sum(beta) <= d - 2 or alpha == beta:
        return "zero"
    if sum(alpha) < sum(beta):
        alpha, beta = beta, alpha
    if sum(alpha) == h and sum(beta) == h - 1:
        if shift(beta, i) in B and shift(beta, j) in B:
            return "zero"
        return "linear"
    return "quadratic"


def equation_index(B: MonomialBasis, d: int) -> tuple[list[Pair], list[tuple[Pair, Pair]]]:
    """Structural E1 pairs (eta, theta) and E2 pair-differences, deduplicated.

    E1: beta+e_j outside B and beta+e_i inside, so only D(alpha+e_i, beta+e_j)
    survives. E2: both shifts of beta outside B, i < j.
    """
    n = B.n
    h = d // 2
    top = [a for a in B if sum(a) == h]
    low = [b for b in B if sum(b) == h - 1]
    e1: set[Pair] = set()
    e2: set[frozenset] = set()
    e2_order: dict[frozenset, tuple[Pair, Pair]] = {}
    for a in top:
        for b in low:
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i == j:
                        continue
                    bi, bj = shift(b, i), shift(b, j)
                    if bj not in B and bi in B:
                        e1.add((shift(a, i), bj))
                    elif i < j and bi not in B and bj not in B:
                        p1, p2 = (shift(a, i), bj), (shift(a, j), bi)
                        if p1 == p2:
                            continue
                        key = frozenset((p1, p2))
                        if key not in e2:
                            e2.add(key)
                            e2_order[key] = (p1, p2)
    pair_key = lambda p: (glex_key(p[0]), glex_key(p[1]))
    e1_list = sorted(e1, key=pair_key)
    e2_list = sorted(e2_order.values(), key=lambda q: (pair_key(q[0]), pair_key(q[1])))
    return e1_list, e2_list


# --------------------------------------------------------------- assembly

@dataclass(frozen=True)
class LinSystem:
    A: np.ndarray
    b: np.ndarray
    var_index: tuple[Exponent, ...]
    eq_index: tuple
    B: MonomialBasis
    det_hbb: complex

    @property
    def n_e1(self) -> int:
        return sum(1 for e in self.eq_index if e[0] == "E1")


class _Schur:
    """Known pieces of the bordered-determinant expansion around H_BB."""

    def __init__(self, phi: SymTensor, B: MonomialBasis, tol: float):
        self.phi = phi
        self.B = B
        self.H = hankel(phi)
        self.exps = list(B)
        HBB = self.H.block(self.exps, self.exps)
        sv = np.linalg.svd(HBB, compute_uv=False)
        if sv.size == 0 or sv[-1] <= tol * sv[0]:
            raise SingularPrincipalBlock("principal Hankel block is numerically singular",
                                         stage="assemble")
        self.HBB = HBB
        self.det = complex(np.linalg.det(HBB))
        self._v: dict[Exponent, np.ndarray] = {}

    def v(self, theta: Exponent) -> np.ndarray:
        """W h_theta for a fully known column theta."""
        if theta not in self._v:
            h = self.H.block(self.exps, [theta])[:, 0]
            self._v[theta] = np.linalg.solve(self.HBB, h)
        return self._v[theta]

    def row(self, eta: Exponent, theta: Exponent, col: dict[Exponent, int],
            corner: bool = True):
        """Coefficients and constant of y_{eta+theta} - h_eta' W h_theta = 0.

        corner=False drops y_{eta+theta}, which cancels inside E2 differences
        and need not belong to Y.
        """
        d = self.phi.d
        a = np.zeros(len(col), dtype=complex)
        rhs = 0j
        vt = self.v(theta)
        if corner:
            a[col[add(eta, theta)]] += 1.0
        for p, bexp in enumerate(self.exps):
            g = add(eta, bexp)
            if sum(g) > d:
                a[col[g]] -= vt[p]
            else:
                rhs += self.H.value(g) * vt[p]
        return a, rhs


def assemble_linear_system(phi: SymTensor, B: MonomialBasis, tol: float = DEFAULT.rank,
                           scaling: str = "unit", e1_only: bool = False,
                           experimental: bool = False) -> LinSystem:
    """Rows for every linear relation: E1 first, then E2 differences.

    scaling='unit' normalizes the coefficient of the corner moment to 1;
    scaling='det' multiplies through by det(H_BB), giving the signed minors of
    the Laplace expansion.
    """
    _check_order(phi.d, experimental)
    if scaling not in ("unit", "det"):
        raise DimensionMismatch(f"unknown scaling {scaling!r}")
    sch = _Schur(phi, B, tol)
    Y = moment_variables(B, phi.n, phi.d)
    col = {g: p for p, g in enumerate(Y)}
    e1, e2 = equation_index(B, phi.d)
    if e1_only:
        e2 = []
    rows, rhs, labels = [], [], []
    for eta, theta in e1:
        a, r = sch.row(eta, theta, col)
        rows.append(a)
        rhs.append(r)
        labels.append(("E1", (eta, theta)))
    for p1, p2 in e2:
        a1, r1 = sch.row(*p1, col, corner=False)
        a2, r2 = sch.row(*p2, col, corner=False)
        rows.append(a1 - a2)
        rhs.append(r1 - r2)
        labels.append(("E2", (p1, p2)))
    A = np.array(rows, dtype=complex).reshape(len(rows), len(Y))
    b = np.array(rhs, dtype=complex)
    if scaling == "det":
        A = A * sch.det
        b = b * sch.det
    return LinSystem(A, b, tuple(Y), tuple(labels), B, sch.det)


# --------------------------------------------------------------- quadratics

def _quadratic_index(B: MonomialBasis, d: int):
    h = d // 2
    top = [a for a in B if sum(a) == h]
    for a, b in combinations(top, 2):
        for i, j in combinations(range(1, B.n + 1), 2):
            yield a, b, i, j


def _affine_column(sch: _Schur, eta: Exponent, y0: dict, N: np.ndarray, col: dict):
    """h_eta = a + C t under y = y0 + N t."""
    d = sch.phi.d
    k = N.shape[1]
    a = np.empty(len(sch.exps), dtype=complex)
    C = np.zeros((len(sch.exps), k), dtype=complex)
    for p, bexp in enumerate(sch.exps):
        g = add(eta, bexp)
        if sum(g) > d:
            a[p] = y0[g]
            C[p] = N[col[g]]
        else:
            a[p] = sch.H.value(g)
    return a, C


def quadratic_forms(sch: _Schur, Y: Sequence[Exponent], y0: np.ndarray, N: np.ndarray):
    """Each quadratic relation as (c, g, Q, scale) in the free coordinates t.

    Q(y) = -h_{a+e_i}' W h_{b+e_j} + h_{a+e_j}' W h_{b+e_i}; the shared corner
    moment cancels. `scale` bounds the size of the terms being cancelled.
    """
    col = {g: p for p, g in enumerate(Y)}
    ymap = dict(zip(Y, y0))
    Winv = np.linalg.inv(sch.HBB)
    wn = np.linalg.norm(Winv, 2)
    cache: dict = {}

    def hc(eta):
        if eta not in cache:
            cache[eta] = _affine_column(sch, eta, ymap, N, col)
        return cache[eta]

    out = []
    for a, b, i, j in _quadratic_index(sch.B, sch.phi.d):
        terms = ((-1.0, shift(a, i), shift(b, j)), (1.0, shift(a, j), shift(b, i)))
        c = 0j
        g = np.zeros(N.shape[1], dtype=complex)
        Q = np.zeros((N.shape[1],) * 2, dtype=complex)
        scale = 0.0
        for sgn, e1, e2 in terms:
            a1, C1 = hc(e1)
            a2, C2 = hc(e2)
            Wa2, WC2 = Winv @ a2, Winv @ C2
            c += sgn * (a1 @ Wa2)
            g += sgn * (C1.T @ Wa2 + WC2.T @ a1)
            Q += sgn * (C1.T @ WC2)
            scale += wn * (np.linalg.norm(a1) + np.linalg.norm(C1)) * (np.linalg.norm(a2) + np.linalg.norm(C2))
        out.append((c, g, Q, scale))
    return out


# ------------------------------------------------------------ extension

@dataclass(frozen=True)
class ExtensionResult:
    rank: int
    n_vars: int
    n_rows: int
    residual: float

    @property
    def kind(self) -> str:
        return type(self).__name__.lower()


@dataclass(frozen=True)
class Unique(ExtensionResult):
    assignment: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Family(ExtensionResult):
    particular: dict = field(default_factory=dict)
    nullspace: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    var_index: tuple = ()

    def member(self, t: np.ndarray) -> dict:
        y = np.array([self.particular[g] for g in self.var_index]) + self.nullspace @ t
        return dict(zip(self.var_index, y))

    def sample(self, seed: int) -> dict:
        rng = np.random.default_rng(seed)
        return self.member(complex_gaussian(rng, self.nullspace.shape[1]))


@dataclass(frozen=True)
class Fail(ExtensionResult):
    reason: str = ""


def _null_split(A: np.ndarray, b: np.ndarray, tol: float):
    """Least-norm particular solution, nullspace basis and rank via SVD."""
    m, k = A.shape
    if k == 0:
        return np.zeros(0, dtype=complex), np.zeros((0, 0), dtype=complex), 0
    if m == 0:
        return np.zeros(k, dtype=complex), np.eye(k, dtype=complex), 0
    U, sv, Vh = np.linalg.svd(A)
    rank = int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0
    coef = (U[:, :rank].conj().T @ b) / sv[:rank]
    y = Vh[:rank].conj().T @ coef
    return y, Vh[rank:].conj().T, rank


def solve_extension(phi: SymTensor, B: MonomialBasis, seed: int = 0,
                    tols: Tolerances = DEFAULT, max_rounds: int = 4,
                    system: LinSystem | None = None,
                    experimental: bool = False) -> ExtensionResult:
    sys_ = system or assemble_linear_system(phi, B, tols.rank, experimental=experimental)
    A, b, Y = sys_.A, sys_.b, sys_.var_index
    sch = _Schur(phi, B, tols.rank)
    y0, N, rank = _null_split(A, b, tols.rank)
    res = float(np.linalg.norm(A @ y0 - b) / max(np.linalg.norm(b), np.linalg.norm(A) * np.linalg.norm(y0), 1e-300)) if A.size else 0.0
    info = dict(rank=rank, n_vars=len(Y), n_rows=A.shape[0], residual=res)
    if res > tols.residual:
        return Fail(**info, reason=f"linear system inconsistent (residual {res:.3g})")
    for _round in range(max_rounds + 1):
        forms = quadratic_forms(sch, Y, y0, N)
        if N.shape[1] == 0:
            bad = [abs(c) / max(s, 1e-300) for c, _, _, s in forms if abs(c) > tols.quad * max(s, 1e-300)]
            if bad:
                return Fail(**info, reason=f"quadratic relations violated (max relative {max(bad):.3g})")
            return Unique(**info, assignment=dict(zip(Y, y0)))
        live, affine = [], []
        for c, g, Q, s in forms:
            s = max(s, 1e-300)
            qz = np.abs(Q).max(initial=0.0) <= tols.quad * s
            gz = np.abs(g).max(initial=0.0) <= tols.quad * s
            cz = abs(c) <= tols.quad * s
            if qz and gz and cz:
                continue
            if qz and not gz:
                affine.append((g, -c))
            else:
                live.append((c, g, Q))
        if not live and not affine:
            fam = Family(**info, particular=dict(zip(Y, y0)), nullspace=N, var_index=tuple(Y))
            _check_family_member(sch, fam, seed, tols)
            return fam
        if not affine:
            return Fail(**info, reason="quadratic relations remain")
        G = np.array([g for g, _ in affine])
        r = np.array([v for _, v in affine])
        t0, Nt, rk = _null_split(G, r, tols.rank)
        if np.linalg.norm(G @ t0 - r) > tols.residual * max(np.linalg.norm(r), 1.0):
            return Fail(**info, reason="rewritten relations inconsistent")
        y0 = y0 + N @ t0
        N = N @ Nt
        info["rank"] = len(Y) - N.shape[1]
    return Fail(**info, reason=f"no convergence in {max_rounds} rounds")


def _check_family_member(sch: _Schur, fam: Family, seed: int, tols: Tolerances) -> None:
    y = fam.sample(seed)
    Y = fam.var_index
    forms = quadratic_forms(sch, Y, np.array([y[g] for g in Y]), np.zeros((len(Y), 0)))
    for c, _, _, s in forms:
        if abs(c) > tols.quad * max(s, 1e-300):
            raise ExtensionFailed("sampled family member violates a quadratic relation",
                                  stage="solve")


# ---------------------------------------------------------- end to end

@dataclass(frozen=True)
class Certificate:
    n: int
    r: int
    y_count: int
    e_lin: int
    rank_a: int
    unique: bool
    residual: float
    first_r: bool = True

    def line(self) -> str:
        out = (f"format n={self.n} r={self.r} |Y|={self.y_count} |E_lin|={self.e_lin} "
               f"rankA={self.rank_a} unique={'true' if self.unique else 'false'} "
               f"residual={self.residual:.3e}")
        if not self.first_r:
            out += " counts=n/a (non-canonical basis)"
        return out


def _staged(stage: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except ArtifactError as exc:
        if exc.stage is None:
            exc.stage = stage
        raise


def decompose4(phi: SymTensor, seed: int = 0, tols: Tolerances = DEFAULT,
               randomize: bool = False, family_seed: int | None = None,
               experimental: bool = False) -> tuple[Decomposition, Certificate]:
    """find_basis, linear solve, multiplication matrices, eigenvectors, weights."""
    _check_order(phi.d, experimental)
    rng = np.random.default_rng(seed)
    work = phi
    if randomize:
        Mgl = random_gl(rng, phi.n)
        work = apply_gl(phi, Mgl)
    B = _staged("find_basis", find_basis, work, tols.rank)
    system = _staged("assemble", assemble_linear_system, work, B, tols.rank,
                     experimental=experimental)
    result = _staged("solve", solve_extension, work, B, seed, tols, system=system,
                     experimental=experimental)
    if isinstance(result, Fail):
        raise ExtensionFailed(result.reason, stage="solve")
    if isinstance(result, Unique):
        assignment = result.assignment
    else:
        assignment = result.sample(seed if family_seed is None else family_seed)
    H = hankel(work)
    M = _staged("multiplication", multiplication_matrices, H, B, assignment, tols.rank)
    dec = _staged("extract", extract_decomposition, M, seed, tols.eig)
    pts = dec.points
    if randomize:
        back = np.linalg.solve(Mgl, pts.T).T
        pts, _ = _staged("extract", dehomogenize, back, np.ones(len(back)), phi.d)
    lam, res = solve_weights(phi, pts)
    if res > tols.residual:
        raise ResidualTooLarge(f"reconstruction residual {res:.3g} exceeds {tols.residual:.3g}",
                               stage="weights")
    cert = Certificate(phi.n, len(B), len(system.var_index), system.A.shape[0],
                       result.rank, isinstance(result, Unique), res,
                       first_r=B.exponents == monomials_up_to(phi.n, 2)[:len(B)])
    return Decomposition(pts, lam), cert


# ---------------------------------------------------------------- counts

def format_rank(n: int, c: int) -> int:
    """r = sum_{j=0..c} (n - j + 1) for the first-r graded-lex basis."""
    return sum(n - j + 1 for j in range(c + 1))


def first_r_basis(n: int, r: int) -> MonomialBasis:
    mons = monomials_up_to(n, 2)
    if not n + 1 <= r <= len(mons):
        raise OutOfRange(f"r={r} outside {n + 1}..{len(mons)}")
    return MonomialBasis(n, mons[:r])


def count_Y_E1(n: int, c: int) -> tuple[int, int]:
    if not 1 <= c <= n:
        raise OutOfRange(f"need 1 <= c <= n, got n={n}, c={c}")
    y = (comb(c + 4, 5) + (n - c) * comb(c + 3, 4) + comb(n - c + 1, 2) * comb(c + 2, 3)
         + comb(n - c + 2, 3) * comb(c + 1, 2))
    e1 = comb(n - c + 1, 2) * (comb(c + 2, 3) + (n - c) * comb(c + 1, 2))
    return y, e1


def count_Y_E1_bruteforce(n: int, c: int) -> tuple[int, int]:
    B = first_r_basis(n, format_rank(n, c))
    e1, _ = equation_index(B, 4)
    return len(moment_variables(B, n, 4)), len(e1)


def _poly_binom(x: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for m in range(k):
        out *= (x - m)
    for m in range(2, k + 1):
        out /= m
    return out


def count_gap(n: int, c: Fraction) -> Fraction:
    """|E1| - |Y| with the binomials read as polynomials in a real c."""
    C = _poly_binom
    y = C(c + 4, 5) + (n - c) * C(c + 3, 4) + C(n - c + 1, 2) * C(c + 2, 3) + C(n - c + 2, 3) * C(c + 1, 2)
    e1 = C(n - c + 1, 2) * (C(c + 2, 3) + (n - c) * C(c + 1, 2))
    return e1 - y


def count_threshold(t: float, horizon: int = 64, cap: int = 100_000) -> int:
    """Smallest n after which |E1| - |Y| >= 0 at c = t n over the next `horizon` n."""
    tt = Fraction(str(t))
    if not 0 < tt < Fraction(str(tstar())):
        raise OutOfRange(f"t={t} outside (0, t*)")
    ok_run = 0
    for n in range(1, cap + horizon + 1):
        if count_gap(n, tt * n) >= 0:
            ok_run += 1
            if ok_run > horizon:
                return n - horizon
        else:
            ok_run = 0
    raise Unverifiable(f"no threshold found below n={cap}")


def tstar_poly(t: float) -> float:
    return -(2 / 15) * t ** 3 + (11 / 24) * t ** 2 - t / 2 + 1 / 6


def tstar() -> float:
    return bisect(tstar_poly, 1e-9, 1.0, xtol=1e-13)
