"""Symmetric tensors in dehomogenized (moment) coordinates.

A tensor phi in S^d C^{n+1} is stored by its entries phi_alpha, one per
exponent alpha in N^n with |alpha| <= d; the power of x0 is implicit. The
stored value is the tensor entry itself, not a polynomial coefficient, so
phi = sum_i lam_i z_i^{(x)d} gives phi_alpha = sum_i lam_i z_i^alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT
from .errors import DimensionMismatch, OutOfRange, Singular, Unreachable

Exponent = tuple[int, ...]


# ---------------------------------------------------------------- exponents

def size(alpha: Exponent) -> int:
    return sum(alpha)


def glex_key(alpha: Exponent) -> tuple:
    """Sort key: total degree first, then larger leading exponents first."""
    return (sum(alpha), tuple(-a for a in alpha))


def add(alpha: Exponent, beta: Exponent) -> Exponent:
    return tuple(a + b for a, b in zip(alpha, beta))


def unit(n: int, i: int) -> Exponent:
    """e_i for 1 <= i <= n; e_0 is the zero exponent."""
    e = [0] * n
    if i > 0:
        e[i - 1] = 1
    return tuple(e)


def shift(alpha: Exponent, i: int) -> Exponent:
    """alpha + e_i (variables numbered 1..n; i = 0 leaves alpha unchanged)."""
    if i == 0:
        return alpha
    a = list(alpha)
    a[i - 1] += 1
    return tuple(a)


@lru_cache(maxsize=None)
def monomials_of_degree(n: int, k: int) -> tuple[Exponent, ...]:
    out = []
    for combo in combinations_with_replacement(range(n), k):
        e = [0] * n
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_up_to(n: int, k: int) -> tuple[Exponent, ...]:
    """All exponents of size <= k in graded-lex order; length C(n+k, n)."""
    if n < 1 or k < 0:
        raise OutOfRange(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    out: list[Exponent] = []
    for j in range(k + 1):
        out.extend(monomials_of_degree(n, j))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, k: int) -> dict[Exponent, int]:
    return {a: p for p, a in enumerate(monomials_up_to(n, k))}


@lru_cache(maxsize=None)
def _sum_index(n: int, d: int, k: int) -> np.ndarray:
    idx = monomial_index(n, d)
    rows = monomials_up_to(n, d - k)
    cols = monomials_up_to(n, k)
    out = np.empty((len(rows), len(cols)), dtype=np.intp)
    for p, a in enumerate(rows):
        for q, b in enumerate(cols):
            out[p, q] = idx[add(a, b)]
    out.setflags(write=False)
    return out


# ------------------------------------------------------------------ tensors

@dataclass(frozen=True)
class SymTensor:
    n: int
    d: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex)
        if arr.shape != (comb(self.n + self.d, self.n),):
            raise DimensionMismatch(
                f"expected {comb(self.n + self.d, self.n)} coefficients, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_dict(cls, n: int, d: int, coeffs: Mapping[Exponent, complex]) -> "SymTensor":
        idx = monomial_index(n, d)
        data = np.zeros(len(idx), dtype=complex)
        for a, v in coeffs.items():
            a = tuple(int(x) for x in a)
            if len(a) != n or min(a, default=0) < 0:
                raise DimensionMismatch(f"bad exponent {a} for n={n}")
            if sum(a) > d:
                raise OutOfRange(f"exponent {a} has size > d={d}")
            data[idx[a]] = v
        return cls(n, d, data)

    @classmethod
    def zero(cls, n: int, d: int) -> "SymTensor":
        return cls(n, d, np.zeros(comb(n + d, n), dtype=complex))

    def __getitem__(self, alpha: Exponent) -> complex:
        return complex(self.data[monomial_index(self.n, self.d)[tuple(alpha)]])

    def to_dict(self, tol: float = 0.0) -> dict[Exponent, complex]:
        mons = monomials_up_to(self.n, self.d)
        return {a: complex(v) for a, v in zip(mons, self.data) if abs(v) > tol}

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


@dataclass(frozen=True)
class Decomposition:
    """Points z_i (rows, z_i0 = 1) and weights lam_i; weights may be unset."""

    points: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=complex))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.weights is not None:
            w = np.array(self.weights, dtype=complex).reshape(-1)
            if len(w) != len(pts):
                raise DimensionMismatch("weights and points differ in length")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return 0 if self.points.size == 0 else self.points.shape[0]

    def tensor(self, d: int) -> SymTensor:
        return tensor_from_points(self.points, self.weights, d)


# ------------------------------------------------------------- constructors

def vandermonde(points: np.ndarray, S: Sequence[Exponent]) -> np.ndarray:
    """Entry (i, alpha) = z_i^alpha; the first column of points is ignored."""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    s, n1 = pts.shape
    E = np.array(S, dtype=np.intp).reshape(len(S), n1 - 1)
    V = np.ones((s, len(S)), dtype=complex)
    if len(S) == 0:
        return V
    for j in range(n1 - 1):
        top = int(E[:, j].max())
        if top == 0:
            continue
        pw = np.ones((top + 1, s), dtype=complex)
        for e in range(1, top + 1):
            pw[e] = pw[e - 1] * pts[:, j + 1]
        V *= pw[E[:, j]].T
    return V


def tensor_from_points(points: np.ndarray, weights: Sequence[complex], d: int) -> SymTensor:
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    w = np.asarray(weights, dtype=complex).reshape(-1)
    if len(w) != pts.shape[0]:
        raise DimensionMismatch(f"{len(w)} weights for {pts.shape[0]} points")
    n = pts.shape[1] - 1
    V = vandermonde(pts, monomials_up_to(n, d))
    return SymTensor(n, d, w @ V)


def catalecticant(phi: SymTensor, k: int) -> np.ndarray:
    """Cat_k: rows |alpha| <= d-k, columns |beta| <= k, entry phi_{alpha+beta}."""
    if not 0 <= k <= phi.d:
        raise OutOfRange(f"k={k} outside 0..{phi.d}")
    return phi.data[_sum_index(phi.n, phi.d, k)]


def numerical_rank(M: np.ndarray, tol: float = 0.0) -> int:
    """Singular values above tol * sigma_max (tol = 0: max(m,n) * eps * sigma_max)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    thr = tol * sv[0] if tol > 0 else max(M.shape) * np.finfo(float).eps * sv[0]
    return int(np.sum(sv > thr))


def hilbert_function(phi: SymTensor, tol: float = DEFAULT.rank) -> list[int]:
    return [numerical_rank(catalecticant(phi, k), tol) for k in range(phi.d + 1)]


def regularity(points: np.ndarray, tol: float = DEFAULT.rank) -> int:
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    s, n1 = pts.shape
    for k in range(s + 1):
        if numerical_rank(vandermonde(pts, monomials_up_to(n1 - 1, k)), tol) == s:
            return k
    raise Unreachable("Vandermonde rank never reaches the point count (duplicate points?)")


# ---------------------------------------------------------------- GL action

_FULL_ARRAY_LIMIT = 20_000_000


def _full_index(n: int, d: int) -> np.ndarray:
    """Graded-lex position of every multi-index in (n+1)^d."""
    grid = np.indices((n + 1,) * d).reshape(d, -1)
    base = d + 1
    codes = np.zeros(grid.shape[1], dtype=np.int64)
    for j in range(1, n + 1):
        codes += (grid == j).sum(axis=0).astype(np.int64) * base ** (j - 1)
    mons = monomials_up_to(n, d)
    mcodes = np.array([sum(a[j] * base ** j for j in range(n)) for a in mons], dtype=np.int64)
    order = np.argsort(mcodes)
    return order[np.searchsorted(mcodes[order], codes)]


def _sorted_multi_index(alpha: Exponent, d: int, m: int) -> int:
    """Flat index in (m)^d of the multi-index (0^(d-|a|), 1^a1, 2^a2, ...)."""
    idx = [0] * (d - sum(alpha))
    for j, a in enumerate(alpha, start=1):
        idx += [j] * a
    return int(np.ravel_multi_index(tuple(idx), (m,) * d)) if d else 0


def apply_linear(phi: SymTensor, M: np.ndarray) -> SymTensor:
    """Induced action of an m x (n+1) matrix: sum lam z^{(x)d} -> sum lam (Mz)^{(x)d}."""
    M = np.asarray(M, dtype=complex)
    n, d = phi.n, phi.d
    m = M.shape[0]
    if M.shape[1] != n + 1 or m < 2:
        raise DimensionMismatch(f"matrix shape {M.shape} incompatible with n={n}")
    if max(m, n + 1) ** d > _FULL_ARRAY_LIMIT:
        raise OutOfRange("tensor too large for the dense GL action")
    if d == 0:
        return SymTensor(m - 1, 0, phi.data.copy())
    T = phi.data[_full_index(n, d)].reshape((n + 1,) * d)
    for ax in range(d):
        T = np.moveaxis(np.tensordot(M, T, axes=([1], [ax])), 0, ax)
    flat = T.reshape(-1)
    out = [flat[_sorted_multi_index(a, d, m)] for a in monomials_up_to(m - 1, d)]
    return SymTensor(m - 1, d, np.array(out))


def apply_gl(phi: SymTensor, M: np.ndarray, tol: float = DEFAULT.rank) -> SymTensor:
    M = np.asarray(M, dtype=complex)
    if M.shape != (phi.n + 1, phi.n + 1):
        raise DimensionMismatch(f"need a {(phi.n + 1,) * 2} matrix, got {M.shape}")
    if numerical_rank(M, tol) < phi.n + 1:
        raise Singular("change of basis is numerically singular")
    return apply_linear(phi, M)


def essential_vars(phi: SymTensor, tol: float = DEFAULT.rank):
    """(count, basis, reduced): basis rows span the row space of Cat_1."""
    C1 = catalecticant(phi, 1)
    count = numerical_rank(C1, tol)
    if count == phi.n + 1:
        return count, np.eye(phi.n + 1, dtype=complex), phi
    _, _, Vh = np.linalg.svd(C1)
    # a rank-1 Cat_1 still needs two coordinates (x0 plus one that stays 0)
    keep = Vh[:max(count, 2)]
    return count, Vh[:count], apply_linear(phi, keep.conj())


# ------------------------------------------------------------------- random

def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_points(rng: np.random.Generator, s: int, n: int) -> np.ndarray:
    pts = np.ones((s, n + 1), dtype=complex)
    pts[:, 1:] = complex_gaussian(rng, (s, n))
    return pts


def random_gl(rng: np.random.Generator, n: int) -> np.ndarray:
    return complex_gaussian(rng, (n + 1, n + 1))


def dehomogenize(points: np.ndarray, weights: np.ndarray, d: int,
                 tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Rescale rows to z0 = 1, absorbing the scale into the weights."""
    from .errors import NormalizationFailure

    pts = np.array(points, dtype=complex)
    z0 = pts[:, 0]
    if np.any(np.abs(z0) <= tol * np.linalg.norm(pts, axis=1)):
        raise NormalizationFailure("a point has zero x0 coordinate")
    return pts / z0[:, None], np.asarray(weights) * z0 ** d


def reconstruction_residual(phi: SymTensor, dec: Decomposition) -> float:
    """Relative 2-norm error of the reconstructed tensor."""
    if dec.size == 0:
        rec = np.zeros_like(phi.data)
    else:
        rec = tensor_from_points(dec.points, dec.weights, phi.d).data
    scale = max(phi.norm(), np.finfo(float).tiny)
    return float(np.linalg.norm(rec - phi.data) / scale) if phi.norm() else float(np.linalg.norm(rec))


def match_points(found: np.ndarray, truth: np.ndarray) -> float:
    """Max coordinate error after optimal matching (Hungarian)."""
    from scipy.optimize import linear_sum_assignment

    found = np.atleast_2d(found)
    truth = np.atleast_2d(truth)
    if found.shape != truth.shape:
        return float("inf")
    if found.size == 0:
        return 0.0
    cost = np.abs(found[:, None, :] - truth[None, :, :]).max(axis=2)
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def exponents_as_str(alpha: Iterable[int]) -> str:
    return " ".join(str(a) for a in alpha)
