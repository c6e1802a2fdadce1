"""Exact rank certificates for the order-4 linear system over a prime field.

Points are drawn in F_p^{n+1}, the tensor is sum z_i^{(x)4} with unit
weights, and the linear rows are assembled exactly as in the float path with
H_BB^{-1} computed mod p. Full column rank mod p implies full column rank of
the same integer matrix over C, hence for generic complex tensors.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DimensionMismatch, NotEnoughEquations, NotPrime, ParseError, SingularPrincipalBlock
from .hankel import MonomialBasis, moment_variables
from .linear import equation_index, first_r_basis
from .tensor import Exponent, add, monomial_index, monomials_up_to

DEFAULT_PRIME = 2147483647
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin for p < 3.3e24 (covers all 64-bit integers)."""
    if p < 2:
        return False
    for q in _MR_BASES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p >= 2 ** 31:
        raise NotPrime(f"p={p} too large for int64 products; use p < 2^31")


@dataclass(frozen=True)
class FFMatrix:
    p: int
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64) % self.p
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def ff_rank(M: FFMatrix) -> int:
    """Rank by row reduction with modular inverses; stops once every column is pivoted."""
    _check_prime(M.p)
    p = M.p
    A = np.array(M.entries, dtype=np.int64)
    if A.ndim != 2 or A.size == 0:
        return 0
    m, k = A.shape
    rank = 0
    for c in range(k):
        if rank == m:
            break
        col = A[rank:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), p - 2, p)
        A[rank, c:] = A[rank, c:] * inv % p
        below = rank + 1 + np.flatnonzero(A[rank + 1:, c])
        if below.size:
            f = A[below, c][:, None]
            A[below, c:] = (A[below, c:] - f * A[rank, c:]) % p
        rank += 1
    return rank


def _inverse_det(H: np.ndarray, p: int) -> tuple[np.ndarray, int]:
    """Gauss-Jordan inverse and determinant mod p; det 0 returns (None, 0)."""
    r = H.shape[0]
    A = np.concatenate([H % p, np.eye(r, dtype=np.int64)], axis=1)
    det = 1
    for c in range(r):
        nz = np.flatnonzero(A[c:, c])
        if nz.size == 0:
            return None, 0
        piv = c + int(nz[0])
        if piv != c:
            A[[c, piv]] = A[[piv, c]]
            det = -det
        a = int(A[c, c])
        det = det * a % p
        A[c] = A[c] * pow(a, p - 2, p) % p
        others = np.flatnonzero(A[:, c])
        others = others[others != c]
        if others.size:
            f = A[others, c][:, None]
            A[others] = (A[others] - f * A[c]) % p
    return A[:, r:], det % p


def _modmatvec(M: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """(M @ v) mod p without overflow: split v into 16-bit halves."""
    lo = v & 0xFFFF
    hi = v >> 16
    acc_lo = np.zeros(M.shape[0], dtype=np.int64)
    acc_hi = np.zeros(M.shape[0], dtype=np.int64)
    # each product < 2^31 * 2^16; sum in chunks so partial sums stay < 2^63
    step = 1 << 14
    for s in range(0, M.shape[1], step):
        acc_lo = (acc_lo + (M[:, s:s + step] * lo[s:s + step]).sum(axis=1)) % p
        acc_hi = (acc_hi + (M[:, s:s + step] * hi[s:s + step]).sum(axis=1)) % p
    return (acc_lo + (acc_hi << 16) % p) % p


def ff_moments(points: np.ndarray, p: int, d: int = 4) -> np.ndarray:
    """phi_alpha = sum_i z_i^alpha mod p for |alpha| <= d, graded-lex."""
    pts = np.asarray(points, dtype=np.int64) % p
    r, n1 = pts.shape
    n = n1 - 1
    mons = monomials_up_to(n, d)
    V = np.ones((r, len(mons)), dtype=np.int64)
    E = np.array(mons, dtype=np.int64)
    for j in range(n):
        pw = np.ones((d + 1, r), dtype=np.int64)
        for e in range(1, d + 1):
            pw[e] = pw[e - 1] * pts[:, j + 1] % p
        V = V * pw[E[:, j]].T % p
    return V.sum(axis=0) % p


def ff_assemble(n: int, r: int, points: np.ndarray, p: int = DEFAULT_PRIME,
                e1_only: bool = False, scaling: str = "unit",
                B: MonomialBasis | None = None) -> FFMatrix:
    """The linear-relation matrix over Y for the first-r basis, mod p."""
    _check_prime(p)
    pts = np.asarray(points, dtype=np.int64)
    if pts.shape != (r, n + 1):
        raise DimensionMismatch(f"expected {r} x {n + 1} points, got {pts.shape}")
    d = 4
    B = B or first_r_basis(n, r)
    exps = list(B)
    phi = ff_moments(pts, p, d)
    idx = monomial_index(n, d)
    val = lambda g: int(phi[idx[g]])
    HBB = np.array([[val(add(a, b)) for b in exps] for a in exps], dtype=np.int64)
    W, det = _inverse_det(HBB, p)
    if det == 0:
        raise SingularPrincipalBlock("det H_BB vanishes mod p; redraw points", stage="ff_assemble")
    Y = moment_variables(B, n, d)
    col = {g: q for q, g in enumerate(Y)}
    vcache: dict[Exponent, np.ndarray] = {}

    def v(theta):
        if theta not in vcache:
            h = np.array([val(add(theta, b)) for b in exps], dtype=np.int64)
            vcache[theta] = _modmatvec(W, h, p)
        return vcache[theta]

    def row(eta, theta, corner=True):
        a = np.zeros(len(Y), dtype=np.int64)
        vt = v(theta)
        if corner:
            a[col[add(eta, theta)]] += 1
        for q, b in enumerate(exps):
            g = add(eta, b)
            if sum(g) > d:
                a[col[g]] = (a[col[g]] - vt[q]) % p
        return a

    e1, e2 = equation_index(B, d)
    rows = [row(eta, theta) for eta, theta in e1]
    if not e1_only:
        rows += [(row(*p1, corner=False) - row(*p2, corner=False)) % p for p1, p2 in e2]
    A = np.array(rows, dtype=np.int64).reshape(len(rows), len(Y))
    if scaling == "det":
        A = A * det % p
    elif scaling != "unit":
        raise DimensionMismatch(f"unknown scaling {scaling!r}")
    return FFMatrix(p, A)


def ff_shape(n: int, r: int, e1_only: bool = False) -> tuple[int, int]:
    """(rows, |Y|) from the structure alone."""
    B = first_r_basis(n, r)
    e1, e2 = equation_index(B, 4)
    rows = len(e1) + (0 if e1_only else len(e2))
    return rows, len(moment_variables(B, n, 4))


def random_ff_points(rng: np.random.Generator, n: int, r: int, p: int) -> np.ndarray:
    while True:
        pts = rng.integers(0, p, size=(r, n + 1), dtype=np.int64)
        pts[:, 0] = 1
        if len({tuple(x) for x in pts}) == r:
            return pts


# ------------------------------------------------------------ verification

@dataclass(frozen=True)
class FFResult:
    status: str            # "full", "deficient" or "short"
    n: int
    r: int
    p: int
    rank: int
    columns: int
    rows: int
    points: np.ndarray | None = None
    trials: int = 0

    @property
    def full(self) -> bool:
        return self.status == "full"

    def certificate(self) -> str:
        if not self.full:
            raise DimensionMismatch("only full-column-rank results carry a certificate")
        lines = ["ffcert v1", f"p={self.p} n={self.n} r={self.r}"]
        lines += [" ".join(str(int(x)) for x in row) for row in self.points]
        lines.append(f"rank={self.rank} columns={self.columns}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        if self.status == "full":
            return (f"FullColumnRank n={self.n} r={self.r} rank={self.rank} columns={self.columns}: "
                    f"({self.n}, {self.r}) is an efficient format")
        if self.status == "short":
            return (f"NotEnoughEquations n={self.n} r={self.r}: not enough linear equations "
                    f"({self.rows} rows < {self.columns} moment variables)")
        return (f"Deficient n={self.n} r={self.r} best rank={self.rank} of {self.columns} "
                f"over {self.trials} trials; this certifies nothing")


def verify_format(n: int, r: int, p: int = DEFAULT_PRIME, seed: int = 0, trials: int = 3,
                  points: np.ndarray | None = None, e1_only: bool = False,
                  raise_short: bool = False) -> FFResult:
    _check_prime(p)
    if n < 2 or not n + 1 < r <= comb(n + 2, 2):
        raise DimensionMismatch(f"need n >= 2 and n+1 < r <= {comb(n + 2, 2)}, got n={n}, r={r}")
    rows, cols = ff_shape(n, r, e1_only)
    if rows < cols:
        if raise_short:
            raise NotEnoughEquations(f"not enough linear equations: {rows} rows < {cols} moment variables")
        return FFResult("short", n, r, p, 0, cols, rows)
    best = 0
    for trial in range(trials if points is None else 1):
        rng = np.random.default_rng([seed, trial])
        pts = points if points is not None else random_ff_points(rng, n, r, p)
        try:
            A = ff_assemble(n, r, pts, p, e1_only)
        except SingularPrincipalBlock:
            if points is not None:
                raise
            pts = random_ff_points(rng, n, r, p)
            A = ff_assemble(n, r, pts, p, e1_only)
        rk = ff_rank(A)
        if rk == cols:
            return FFResult("full", n, r, p, rk, cols, rows, np.array(pts), trial + 1)
        best = max(best, rk)
    return FFResult("deficient", n, r, p, best, cols, rows, None, trials)


def parse_certificate(text: str) -> tuple[int, int, int, np.ndarray, int, int]:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != "ffcert v1":
        raise ParseError("line 1: expected 'ffcert v1'")
    try:
        hdr = dict(kv.split("=") for kv in lines[1].split())
        p, n, r = int(hdr["p"]), int(hdr["n"]), int(hdr["r"])
        pts = np.array([[int(x) for x in ln.split()] for ln in lines[2:2 + r]], dtype=np.int64)
        tail = dict(kv.split("=") for kv in lines[2 + r].split())
        rank, cols = int(tail["rank"]), int(tail["columns"])
    except (KeyError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed certificate: {exc}") from exc
    return p, n, r, pts, rank, cols


def check_certificate(text: str) -> bool:
    """Recompute the rank from (p, points) alone."""
    p, n, r, pts, rank, cols = parse_certificate(text)
    A = ff_assemble(n, r, pts, p)
    return A.shape[1] == cols and ff_rank(A) == rank == cols


# ------------------------------------------------------------------ tables

def max_full_rank_r(n: int, p: int = DEFAULT_PRIME, seed: int = 0, trials: int = 3) -> int:
    """Largest r with a full-column-rank witness."""
    best = n + 1
    for r in range(n + 2, comb(n + 2, 2) + 1):
        rows, cols = ff_shape(n, r)
        if rows < cols:
            continue
        if verify_format(n, r, p, seed, trials).full:
            best = r
    return best


def max_full_rank_c(n: int, p: int = DEFAULT_PRIME, seed: int = 0, trials: int = 3) -> tuple[int, int]:
    """Largest c whose E1-only matrix is full column rank, with r' = format_rank(n, c)."""
    from .linear import format_rank

    best = 0
    for c in range(1, n + 1):
        r = format_rank(n, c)
        rows, cols = ff_shape(n, r, e1_only=True)
        if rows < cols:
            break
        if verify_format(n, r, p, seed, trials, e1_only=True).full:
            best = c
        else:
            break
    return best, format_rank(n, best)


def reproduce_table(n_min: int, n_max: int, p: int = DEFAULT_PRIME, seed: int = 0,
                    trials: int = 3) -> list[dict]:
    if not 2 <= n_min <= n_max <= 17:
        raise DimensionMismatch("need 2 <= n_min <= n_max <= 17")
    out = []
    for n in range(n_min, n_max + 1):
        c, rp = max_full_rank_c(n, p, seed, trials)
        out.append({"n": n, "r": max_full_rank_r(n, p, seed, trials), "c": c, "r_prime": rp})
    return out
