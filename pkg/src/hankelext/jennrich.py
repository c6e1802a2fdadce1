"""Simultaneous diagonalization of the matricized slices of a symmetric tensor."""

from __future__ import annotations

import numpy as np

from .config import DEFAULT
from .errors import DefectiveSpectrum, NormalizationFailure, OrderTooSmall, ResidualTooLarge
from .tensor import (
    Decomposition,
    SymTensor,
    add,
    complex_gaussian,
    monomial_index,
    monomials_up_to,
    reconstruction_residual,
    shift,
    vandermonde,
)


def slices(phi: SymTensor) -> list[np.ndarray]:
    """phi_j(alpha, beta) = phi_{alpha+beta+e_j}, |alpha| <= D, |beta| <= d-1-D."""
    n, d = phi.n, phi.d
    if d < 3:
        raise OrderTooSmall(f"simultaneous diagonalization needs d >= 3, got {d}")
    D = (d - 1) // 2
    rows = monomials_up_to(n, D)
    cols = monomials_up_to(n, d - 1 - D)
    idx = monomial_index(n, d)
    sums = [[add(a, b) for b in cols] for a in rows]
    out = []
    for j in range(n + 1):
        pos = np.array([[idx[shift(g, j)] for g in row] for row in sums], dtype=np.intp)
        out.append(phi.data[pos])
    return out


def solve_weights(phi: SymTensor, points: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares weights for the given points and the relative residual."""
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    if pts.size == 0:
        return np.zeros(0, dtype=complex), (0.0 if phi.norm() == 0 else 1.0)
    V = vandermonde(pts, monomials_up_to(phi.n, phi.d))
    # equilibrate point rows: far-out points otherwise swamp the solve
    scale = np.linalg.norm(V, axis=1)
    mu, *_ = np.linalg.lstsq((V / scale[:, None]).T, phi.data, rcond=None)
    lam = mu / scale
    res = reconstruction_residual(phi, Decomposition(pts, lam))
    return lam, res


def _column_space(M: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    U, sv, Vh = np.linalg.svd(M)
    if sv.size == 0 or sv[0] == 0:
        return U[:, :0], sv[:0], Vh[:0], sv
    s = int(np.sum(sv > tol * sv[0]))
    return U[:, :s], sv[:s], Vh[:s], sv


def jennrich_decompose(phi: SymTensor, seed: int = 0, tol: float = DEFAULT.rank,
                       eig_tol: float = DEFAULT.eig,
                       residual_tol: float = DEFAULT.residual) -> Decomposition:
    """Unique decomposition when the middle catalecticant rank equals the tensor rank."""
    S = slices(phi)
    n = phi.n
    if phi.norm() == 0:
        return Decomposition(np.zeros((0, n + 1)), np.zeros(0))
    Ur, sv, Vh, _ = _column_space(S[0], tol)
    s = Ur.shape[1]
    # pseudoinverse of slice 0 restricted to its column space
    pinv0 = (Vh.conj().T / sv) @ Ur.conj().T
    R = [Ur.conj().T @ Sj @ pinv0 @ Ur for Sj in S[1:]]
    rng = np.random.default_rng(seed)
    last = None
    for _attempt in range(2):
        a = complex_gaussian(rng, n)
        G = sum(aj * Rj for aj, Rj in zip(a, R))
        evals, W = np.linalg.eig(G)
        cond = np.linalg.cond(W)
        if np.isfinite(cond) and cond < 1.0 / eig_tol:
            break
        last = cond
    else:
        raise DefectiveSpectrum(
            f"eigenvector matrix condition {last:.3g} exceeds {1 / eig_tol:.3g}; "
            "the tensor rank likely exceeds the catalecticant rank", stage="jennrich")
    V = Ur @ W
    head = V[0]
    if np.any(np.abs(head) <= eig_tol * np.linalg.norm(V, axis=0)):
        raise NormalizationFailure(
            "an eigenvector vanishes at the monomial 1; retry after a random change of basis",
            stage="jennrich")
    V = V / head
    pts = np.ones((s, n + 1), dtype=complex)
    pts[:, 1:] = V[1:n + 1].T
    # eigenvalues must agree with the coordinates read off the eigenvectors
    pred = pts[:, 1:] @ a
    scale = max(1.0, float(np.abs(evals).max()))
    if np.abs(pred - evals).max() > eig_tol * scale:
        # non-commuting slice operators: no joint eigenbasis exists
        raise DefectiveSpectrum("eigenvalues disagree with eigenvector coordinates", stage="jennrich")
    lam, res = solve_weights(phi, pts)
    if res > residual_tol:
        raise ResidualTooLarge(f"reconstruction residual {res:.3g} exceeds {residual_tol:.3g}",
                               stage="jennrich")
    return Decomposition(pts, lam)
