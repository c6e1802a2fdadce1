from __future__ import annotations

from itertools import combinations_with_replacement, product

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from hankelext.errors import DimensionMismatch, OutOfRange
from hankelext.hankel import hankel
from hankelext.monomial import (
    MonomialSpec,
    canonical_params,
    canonical_points,
    graded_solve,
    monomial_basis,
    monomial_decompose,
    monomial_rank,
    parameter_set,
    random_params,
    representation_residuals,
    torus_equivalent,
    vsp_dimension,
)
from hankelext.tensor import match_points, numerical_rank, reconstruction_residual

from oracles import all_exponents_in_box, cross_check_box, monomial_specs, seeds

SUITE = [(1, 1), (1, 1, 2), (2, 2, 2), (1, 1, 1, 1)]


def _exceed_count_params(spec: MonomialSpec, Y) -> set:
    """Y_P by direct counting of the coordinates above the degree bound."""
    return {g for g in Y if sum(a > b for a, b in zip(g, spec.dbar)) == 1}


def _h_oracle(dbar, t: int) -> int:
    """Degree-t monomials in a0..an with a_i <= d_i for i >= 1, by listing them."""
    n = len(dbar)
    return sum(1 for e in product(range(t + 1), repeat=n + 1)
               if sum(e) == t and all(e[i + 1] <= dbar[i] for i in range(n)))


# ------------------------------------------------------------------ spec

def test_spec_validation():
    with pytest.raises(OutOfRange):
        MonomialSpec((2, 1))
    with pytest.raises(OutOfRange):
        MonomialSpec((0, 1, 2))
    with pytest.raises(DimensionMismatch):
        MonomialSpec((3,))


def test_spec_derived_fields():
    s = MonomialSpec((1, 1, 2))
    assert (s.n, s.d, s.d0, s.dbar) == (2, 4, 1, (1, 2))
    assert s.tensor().to_dict() == {(1, 2): 1.0}


# ----------------------------------------------------------------- basis

def test_basis_examples():
    assert set(monomial_basis(MonomialSpec((1, 1, 2)))) == {(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)}
    assert monomial_basis(MonomialSpec((1, 1))).exponents == ((0,), (1,))
    assert len(monomial_basis(MonomialSpec((2, 2, 2)))) == 9


def test_rank_examples():
    assert monomial_rank(MonomialSpec((1, 1, 2))) == 6
    assert monomial_rank(MonomialSpec((1, 1))) == 2
    assert monomial_rank(MonomialSpec((2, 3, 4))) == 20


@given(monomial_specs())
@settings(max_examples=30, deadline=None)
def test_principal_block_is_anti_identity(degs):
    spec = MonomialSpec(degs)
    B = monomial_basis(spec)
    assert set(B) == set(all_exponents_in_box(spec.dbar))
    assert len(B) == monomial_rank(spec) == cross_check_box(spec.dbar)
    exps, N = list(B), len(B)
    H = hankel(spec.tensor())
    canon = H.block(exps, exps, graded_solve(spec, canonical_params(spec)))
    assert np.array_equal(canon, np.fliplr(np.eye(N)))
    # random parameters only fill the part below the antidiagonal
    G = np.fliplr(H.block(exps, exps, graded_solve(spec, random_params(spec, 0))))
    assert np.array_equal(np.diag(G), np.ones(N))
    assert np.array_equal(np.triu(G, 1), np.zeros((N, N)))
    assert numerical_rank(G) == N


# ------------------------------------------------------------ parameters

def test_parameter_set_example():
    spec = MonomialSpec((1, 1, 2))
    gv = parameter_set(spec)
    assert set(gv.Y) == {(3, 2), (2, 3), (1, 4), (0, 5), (3, 3), (2, 4), (1, 5), (3, 4), (2, 5)}
    assert set(gv.params) == {(3, 2), (1, 4), (0, 5), (1, 5)}


def test_equal_degrees_have_n_parameters():
    for degs in [(1, 1, 1), (2, 2, 2), (1, 1, 1, 1), (2, 2, 2, 2)]:
        spec = MonomialSpec(degs)
        assert len(parameter_set(spec).params) == spec.n


@given(monomial_specs())
@settings(max_examples=40, deadline=None)
def test_grading_is_a_partition(degs):
    spec = MonomialSpec(degs)
    gv = parameter_set(spec)
    assert set(gv.params) == _exceed_count_params(spec, gv.Y)
    layers = [g for k in range(1, gv.max_grade + 1) for g in gv.layer(k)]
    assert sorted(layers) == sorted(gv.Y)
    for g in gv.Y:
        k, excess = gv.grades[g], sum(g) - spec.d
        assert (k - 1) * (spec.d0 + 1) + 1 <= excess <= k * (spec.d0 + 1)
        assert sum(a == 2 * b + 1 for a, b in zip(g, spec.dbar)) <= 1


def test_vsp_examples():
    assert vsp_dimension(MonomialSpec((1, 1, 2))) == 4
    assert vsp_dimension(MonomialSpec((1, 1, 1))) == 2
    assert vsp_dimension(MonomialSpec((2, 2, 2))) == 2


def test_parameter_count_identity_exhaustive():
    checked = 0
    for n in range(1, 5):
        for degs in combinations_with_replacement(range(1, 12), n + 1):
            if sum(degs) > 12:
                continue
            spec = MonomialSpec(degs)
            dual = sum(_h_oracle(spec.dbar, dj - spec.d0) for dj in spec.dbar)
            assert vsp_dimension(spec) == dual, degs
            checked += 1
    assert checked > 150


# ---------------------------------------------------------- graded solve

def test_canonical_assignment_pattern():
    spec = MonomialSpec((1, 1, 2))
    A = graded_solve(spec, canonical_params(spec))
    assert {g for g, v in A.items() if v != 0} == {(3, 2), (1, 5)}
    assert A[(3, 2)] == 1 and A[(1, 5)] == 1


@given(monomial_specs())
@settings(max_examples=25, deadline=None)
def test_canonical_assignment_is_zero_off_parameters(degs):
    spec = MonomialSpec(degs)
    A = graded_solve(spec, canonical_params(spec))
    ones = {g for g, v in canonical_params(spec).items() if v == 1}
    assert len(ones) == spec.n
    assert all(abs(v) < 1e-12 for g, v in A.items() if g not in ones)


@given(monomial_specs(), seeds())
@settings(max_examples=25, deadline=None)
def test_graded_determinism(degs, seed):
    spec = MonomialSpec(degs)
    p = random_params(spec, seed)
    a, b = graded_solve(spec, p), graded_solve(spec, p)
    assert list(a) == list(b)
    assert all(a[g] == b[g] for g in a)


@given(monomial_specs(), seeds())
@settings(max_examples=25, deadline=None)
def test_grade_one_moments_above_one_bound_vanish(degs, seed):
    spec = MonomialSpec(degs)
    gv = parameter_set(spec)
    A = graded_solve(spec, random_params(spec, seed))
    assert all(abs(A[g]) < 1e-12 for g in gv.layer(1) if gv.exceed[g] > 1)


@given(monomial_specs(max_d=7), seeds())
@settings(max_examples=20, deadline=None)
def test_every_representation_agrees(degs, seed):
    spec = MonomialSpec(degs)
    A = graded_solve(spec, random_params(spec, seed))
    scale = max(1.0, max(abs(v) for v in A.values())) ** 2
    assert representation_residuals(spec, A) < 1e-9 * scale


def test_missing_parameter_rejected():
    spec = MonomialSpec((1, 1, 2))
    p = canonical_params(spec)
    del p[(0, 5)]
    with pytest.raises(DimensionMismatch):
        graded_solve(spec, p)


# -------------------------------------------------------- decompositions

def test_canonical_grid():
    spec = MonomialSpec((1, 1, 2))
    dec = monomial_decompose(spec, canonical=True)
    assert dec.size == 6
    assert np.allclose(dec.points[:, 0], 1)
    assert np.allclose(dec.points[:, 1] ** 2, 1)
    assert np.allclose(dec.points[:, 2] ** 3, 1)
    assert len({(round(z[1].real), round(np.angle(z[2]), 6)) for z in dec.points}) == 6
    assert reconstruction_residual(spec.tensor(), dec) < 1e-12


def test_difference_of_squares():
    dec = monomial_decompose(MonomialSpec((1, 1)), canonical=True)
    assert match_points(dec.points, np.array([[1, 1], [1, -1]])) < 1e-14
    order = np.argsort(dec.points[:, 1].real)
    # under the moment convention the entry at x is lam_1 - lam_2, so it takes +-1/2
    assert np.allclose(dec.weights[order], [-0.5, 0.5])


@pytest.mark.parametrize("degs", SUITE)
def test_graded_route_reproduces_grid(degs):
    spec = MonomialSpec(degs)
    grid = monomial_decompose(spec, canonical=True)
    solved = monomial_decompose(spec, params=canonical_params(spec))
    assert solved.size == monomial_rank(spec)
    assert match_points(solved.points, grid.points) < 1e-10
    for z, lam in zip(solved.points, solved.weights):
        k = np.argmin(np.abs(grid.points - z).max(axis=1))
        assert abs(lam - grid.weights[k]) < 1e-10


@pytest.mark.parametrize("degs", SUITE)
def test_random_parameters_reconstruct(degs):
    spec = MonomialSpec(degs)
    phi = spec.tensor()
    grid = canonical_points(spec)
    for seed in range(10):
        dec = monomial_decompose(spec, seed=seed)
        assert dec.size == monomial_rank(spec)
        assert reconstruction_residual(phi, dec) < 1e-9
        if spec.n > 1:
            assert match_points(dec.points, grid) > 1e-3


# ----------------------------------------------------------------- torus

def _torus_image(spec, p, tau):
    return {g: v * np.prod(tau ** (np.array(g) - np.array(spec.dbar))) for g, v in p.items()}


def test_torus_transitive_for_equal_degrees():
    spec = MonomialSpec((1, 1, 1))
    for k in range(5):
        p1, p2 = random_params(spec, 2 * k), random_params(spec, 2 * k + 1)
        res = torus_equivalent(spec, p1, p2)
        assert res
        assert all(abs(v - w) < 1e-9 for v, w in
                   zip(_torus_image(spec, p1, res.tau).values(), p2.values()))


def test_torus_identity():
    spec = MonomialSpec((1, 1, 2))
    p = random_params(spec, 1)
    res = torus_equivalent(spec, p, p)
    assert res and np.allclose(res.tau, 1)


def test_torus_perturbed_canonical_is_not_equivalent():
    spec = MonomialSpec((1, 1, 2))
    p1 = canonical_params(spec)
    p2 = dict(p1)
    p2[(0, 5)] = 1.0
    assert not torus_equivalent(spec, p1, p2)


@given(seeds(), st.lists(st.complex_numbers(min_magnitude=0.3, max_magnitude=3), min_size=2, max_size=2))
@settings(max_examples=25, deadline=None)
def test_torus_orbit_detected(seed, tau):
    spec = MonomialSpec((1, 1, 2))
    p1 = random_params(spec, seed)
    p2 = _torus_image(spec, p1, np.array(tau))
    res = torus_equivalent(spec, p1, p2)
    assert res
    back = _torus_image(spec, p1, res.tau)
    assert max(abs(back[g] - p2[g]) / max(1.0, abs(p2[g])) for g in p2) < 1e-8
    p3 = dict(p2)
    p3[(1, 5)] *= 1.5
    assert not torus_equivalent(spec, p1, p3)
