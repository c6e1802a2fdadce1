from __future__ import annotations

from math import comb

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from hankelext.errors import (
    Defective,
    EigenvalueMismatch,
    NormalizationFailure,
    OutOfRange,
    SingularPrincipalBlock,
    Unreachable,
)
from hankelext.hankel import (
    Known,
    Moment,
    MonomialBasis,
    MultiplicationMatrices,
    binary_decompose,
    binary_free_variables,
    commuting_residuals,
    determinantal_residuals,
    extract_decomposition,
    find_basis,
    hankel,
    moment_variables,
    multiplication_matrices,
)
from hankelext.linear import Unique, first_r_basis, solve_extension
from hankelext.monomial import MonomialSpec, canonical_params, graded_solve, monomial_basis
from hankelext.tensor import (
    apply_gl,
    catalecticant,
    complex_gaussian,
    match_points,
    monomials_up_to,
    numerical_rank,
    random_gl,
    random_points,
    reconstruction_residual,
    tensor_from_points,
    vandermonde,
)

from oracles import binary_example, generic_tensor, seeds


# ------------------------------------------------------------------ Hankel

def test_binary_example_hankel_display():
    H = hankel(binary_example())
    assert H.shape == (7, 8)
    y = lambda k: Moment((k,))
    display = [
        [0, 1, 1, 0, 0, 0, 0],
        [1, 1, 0, 0, 0, 0, y(7)],
        [1, 0, 0, 0, 0, y(7), y(8)],
        [0, 0, 0, 0, y(7), y(8), y(9)],
        [0, 0, 0, y(7), y(8), y(9), y(10)],
        [0, 0, y(7), y(8), y(9), y(10), y(11)],
        [0, y(7), y(8), y(9), y(10), y(11), y(12)],
    ]
    for p, row in enumerate(display):
        for q, want in enumerate(row):
            got = H.entry((p,), (q,))
            assert got == (want if isinstance(want, Moment) else Known(want))


def test_known_entries_match_tensor():
    phi, _, _ = generic_tensor(2, 4, 4, seed=0)
    H = hankel(phi)
    for a in H.rows:
        for b in H.cols:
            e = H.entry(a, b)
            g = tuple(x + y for x, y in zip(a, b))
            if sum(g) <= 4:
                assert e == Known(phi[g])
            else:
                assert e == Moment(g)


def test_moment_exponents_by_enumeration():
    phi, _, _ = generic_tensor(2, 4, 4, seed=0)
    H = hankel(phi)
    brute = {tuple(x + y for x, y in zip(a, b)) for a in H.rows for b in H.cols}
    brute = {g for g in brute if sum(g) > 4}
    assert set(H.moment_exponents()) == brute
    assert {sum(g) for g in brute} == set(range(5, 10))


def test_unassigned_moment_is_reported():
    H = hankel(binary_example())
    with pytest.raises(Unreachable):
        H.value((7,))
    assert H.value((7,), {(7,): 2.0}) == 2.0


# ------------------------------------------------------------------ bases

def test_basis_must_be_connected():
    with pytest.raises(OutOfRange):
        MonomialBasis(2, ((0, 0), (1, 1)))


def test_find_basis_binary():
    assert list(find_basis(binary_example())) == [(0,), (1,), (2,)]


def test_find_basis_generic_rank_four():
    phi, _, _ = generic_tensor(2, 4, 4, seed=3)
    assert list(find_basis(phi)) == [(0, 0), (1, 0), (0, 1), (2, 0)]


def test_find_basis_skips_degenerate_column():
    rng = np.random.default_rng(5)
    pts = random_points(rng, 7, 3)
    pts[:6, 3] = 0
    phi = tensor_from_points(pts, complex_gaussian(rng, 7), 4)
    B = find_basis(phi)
    assert list(B) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0), (1, 1, 0), (0, 2, 0)]
    # the first seven graded-lex monomials give a singular principal block
    H = hankel(phi)
    first7 = list(monomials_up_to(3, 2))[:7]
    assert numerical_rank(H.block(first7, first7), 1e-9) < 7


def test_find_basis_rejects_monomial():
    phi = MonomialSpec((1, 1, 2)).tensor()
    with pytest.raises(SingularPrincipalBlock, match="monomial module"):
        find_basis(phi)


@given(st.integers(1, 3), st.integers(3, 4), seeds(), st.data())
@settings(max_examples=30, deadline=None)
def test_basis_validity(n, d, seed, data):
    k0 = d // 2
    r = data.draw(st.integers(1, comb(n + k0, n)))
    phi, _, _ = generic_tensor(n, r, d, seed=seed)
    B = find_basis(phi)
    assert B.connected()
    C = catalecticant(phi, k0)
    cols = monomials_up_to(n, k0)
    sizes = B.sizes_by_degree()
    for k in range(k0 + 1):
        m = sum(1 for b in cols if sum(b) <= k)
        assert sum(sizes[:k + 1]) == min(len(B), numerical_rank(C[:, :m], 1e-9))
    assert len(B) == numerical_rank(C, 1e-9) == r


# -------------------------------------------------------- moment variables

def test_moment_variables_examples():
    B = MonomialBasis(2, ((0, 0), (1, 0), (0, 1)))
    assert moment_variables(B, 2, 3) == []
    B4 = first_r_basis(2, 4)
    assert moment_variables(B4, 2, 4) == [(5, 0), (4, 1)]
    for n in range(2, 8):
        assert len(moment_variables(first_r_basis(n, 2 * n + 1), n, 4)) == comb(n + 2, 3)


def test_moment_variables_by_enumeration():
    B = first_r_basis(3, 8)
    brute = set()
    for a in B:
        for b in B:
            for i in range(3):
                g = tuple(x + y + (k == i) for k, (x, y) in enumerate(zip(a, b)))
                if sum(g) >= 5:
                    brute.add(g)
    assert set(moment_variables(B, 3, 4)) == brute


# ---------------------------------------------------- determinantal relations

def test_no_unknowns_means_zero_residuals():
    phi, _, _ = generic_tensor(2, 3, 3, seed=1)
    B = find_basis(phi)
    assert moment_variables(B, 2, 3) == []
    res, scale = determinantal_residuals(hankel(phi), B, {})
    assert res.max() <= 1e-9 * max(1.0, scale)


def test_solved_versus_random_assignment():
    phi, _, _ = generic_tensor(3, 6, 4, seed=2)
    B = find_basis(phi)
    sol = solve_extension(phi, B)
    assert isinstance(sol, Unique)
    H = hankel(phi)
    res, scale = determinantal_residuals(H, B, sol.assignment)
    assert res.max() <= 1e-7 * scale
    rng = np.random.default_rng(0)
    rand = dict(zip(sol.assignment, complex_gaussian(rng, len(sol.assignment))))
    res_r, scale_r = determinantal_residuals(H, B, rand)
    assert res_r.max() > 1e-3 * scale_r


def test_determinantal_and_commuting_agree():
    phi, _, _ = generic_tensor(3, 6, 4, seed=6)
    B = find_basis(phi)
    H = hankel(phi)
    sol = solve_extension(phi, B).assignment
    M = multiplication_matrices(H, B, sol)
    norm = max(np.linalg.norm(m, 2) for m in M.mats)
    res, scale = determinantal_residuals(H, B, sol)
    assert res.max() <= 1e-7 * scale and commuting_residuals(M) <= 1e-7 * norm ** 2
    bumped = dict(sol)
    key = next(iter(bumped))
    bumped[key] += 0.1 * max(1.0, abs(bumped[key]))
    Mb = multiplication_matrices(H, B, bumped)
    res_b, scale_b = determinantal_residuals(H, B, bumped)
    assert res_b.max() > 1e-4 * scale_b and commuting_residuals(Mb) > 1e-4


# ---------------------------------------------------- multiplication matrices

def _binary_m1(y7, y8, y9):
    B = MonomialBasis(1, tuple((k,) for k in range(5)))
    M = multiplication_matrices(hankel(binary_example()), B, {(7,): y7, (8,): y8, (9,): y9})
    return M.mats[0]


def test_binary_multiplication_matrix_display():
    y7, y8, y9 = 0.7 - 0.2j, -1.3 + 0.5j, 0.4 + 1.1j
    M1 = _binary_m1(y7, y8, y9)
    top = np.eye(5, k=1)[:4]
    assert np.allclose(M1[:4], top, atol=1e-12)
    last = [y7, -y7, y7, y9 / y7 - y8 ** 2 / y7 ** 2, y8 / y7]
    assert np.allclose(M1[4], last, atol=1e-10)


def test_binary_eigenvectors_are_power_vectors():
    M1 = _binary_m1(0.7 - 0.2j, -1.3 + 0.5j, 0.4 + 1.1j)
    _, W = np.linalg.eig(M1)
    W = W / W[0]
    for t, w in zip(np.diag(np.linalg.inv(W) @ M1 @ W), W.T):
        assert np.allclose(w, t ** np.arange(5), atol=1e-8)


def test_rank_one_multiplication_matrices():
    z = np.array([1, 2.0, -0.5j])
    phi = tensor_from_points(z[None], [1.0], 4)
    M = multiplication_matrices(hankel(phi), MonomialBasis(2, ((0, 0),)), {})
    assert np.allclose(M.mats[0], [[2.0]]) and np.allclose(M.mats[1], [[-0.5j]])


def test_monomial_canonical_matrices_are_permutations():
    for degs in [(1, 1), (1, 1, 2), (2, 2, 2), (1, 1, 1, 1)]:
        spec = MonomialSpec(degs)
        A = graded_solve(spec, canonical_params(spec))
        M = multiplication_matrices(hankel(spec.tensor()), monomial_basis(spec), A)
        for Mi in M.mats:
            R = np.round(Mi.real, 9)
            assert np.allclose(Mi, R, atol=1e-9)
            assert set(np.unique(R)) <= {0.0, 1.0}
            assert all(np.count_nonzero(row) == 1 for row in R)


def test_commuting_residuals_examples():
    B1 = MonomialBasis(1, ((0,), (1,)))
    assert commuting_residuals(MultiplicationMatrices(B1, (np.arange(4.0).reshape(2, 2),))) == 0
    rng = np.random.default_rng(0)
    P, Q = rng.standard_normal((2, 3, 3))
    B2 = MonomialBasis(2, ((0, 0), (1, 0), (0, 1)))
    val = commuting_residuals(MultiplicationMatrices(B2, (P, Q)))
    assert 1e-2 * np.linalg.norm(P, 2) * np.linalg.norm(Q, 2) < val


# --------------------------------------------------------------- extraction

def test_extract_requires_nonzero_head():
    B = MonomialBasis(1, ((0,), (1,)))
    with pytest.raises(NormalizationFailure):
        extract_decomposition(MultiplicationMatrices(B, (np.diag([2.0, 3.0]),)))


def test_extract_rejects_non_commuting():
    B = MonomialBasis(2, ((0, 0), (1, 0), (0, 1)))
    rng = np.random.default_rng(1)
    M = MultiplicationMatrices(B, (np.diag([1.0, 2.0, 3.0]) + 0.5, rng.standard_normal((3, 3))))
    with pytest.raises(EigenvalueMismatch):
        extract_decomposition(M, seed=2)


def test_extract_binary_rank_three_is_defective():
    B = MonomialBasis(1, ((0,), (1,), (2,)))
    M = multiplication_matrices(hankel(binary_example()), B, {})
    with pytest.raises(Defective):
        extract_decomposition(M)


def test_extract_from_solved_assignment():
    phi, pts, _ = generic_tensor(4, 9, 4, seed=3)
    B = find_basis(phi)
    sol = solve_extension(phi, B).assignment
    M = multiplication_matrices(hankel(phi), B, sol)
    dec = extract_decomposition(M, seed=1)
    assert dec.size == 9 and match_points(dec.points, pts) < 1e-7
    for z in dec.points:
        v = vandermonde(z[None], list(B))[0]
        for j, Mj in enumerate(M.mats, start=1):
            assert np.linalg.norm(Mj @ v - z[j] * v) <= 1e-6 * np.linalg.norm(v) * max(1, np.linalg.norm(Mj, 2))


def test_hankel_consistency_with_output():
    phi, _, _ = generic_tensor(3, 6, 4, seed=4)
    B = find_basis(phi)
    sol = solve_extension(phi, B).assignment
    dec = extract_decomposition(multiplication_matrices(hankel(phi), B, sol), seed=0)
    from hankelext.jennrich import solve_weights
    lam, _ = solve_weights(phi, dec.points)
    H = hankel(phi)
    ZB = vandermonde(dec.points, list(B))
    for i in range(4):
        Bp = list(B) if i == 0 else B.shifted(i)
        lhs = H.block(list(B), Bp, sol)
        rhs = ZB.T @ np.diag(lam) @ vandermonde(dec.points, Bp)
        assert np.abs(lhs - rhs).max() <= 1e-8 * max(1.0, np.abs(rhs).max())


# ------------------------------------------------------------------ binary

def test_binary_ladder():
    phi = binary_example()
    with pytest.raises(Defective):
        binary_decompose(phi, 3)
    with pytest.raises(SingularPrincipalBlock):
        binary_decompose(phi, 4)
    assert len(binary_free_variables(5, 6)) == 3
    assert len(binary_free_variables(6, 6)) == 5
    for s in (5, 6):
        for seed in range(5):
            dec = binary_decompose(phi, s, seed=seed)
            assert dec.size == s
            assert reconstruction_residual(phi, dec) < 1e-8


def test_binary_ladder_after_change_of_basis():
    rng = np.random.default_rng(2024)
    phi = apply_gl(binary_example(), random_gl(rng, 1))
    from hankelext.tensor import hilbert_function
    assert hilbert_function(phi) == [1, 2, 3, 3, 3, 2, 1]
    with pytest.raises(Defective):
        binary_decompose(phi, 3)
    with pytest.raises(SingularPrincipalBlock):
        binary_decompose(phi, 4)
    for seed in range(5):
        assert reconstruction_residual(phi, binary_decompose(phi, 5, seed=seed)) < 1e-8


def test_binary_explicit_parameters():
    phi = binary_example()
    params = {(7,): 1.0, (8,): 0.5, (9,): -2.0}
    a = binary_decompose(phi, 5, params=params, seed=0)
    b = binary_decompose(phi, 5, params=params, seed=9)
    assert match_points(a.points, b.points) < 1e-8
