import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asframe.linalg import (
    DimensionMismatch,
    Functional,
    LinearMap,
    NotInvertible,
    PVector,
    Tolerances,
    UnsupportedExact,
    apply,
    compose,
    identity,
    invert,
    numerical_rank,
    operator_p_norm,
    outer,
    rank_factorization,
)
from asframe.sequence_spaces import shift_left, shift_right

from oracles import loop_matmul, loop_matvec, low_rank, max_column_sum, max_row_sum, uniform

TOL = Tolerances()


def test_apply_identity():
    y = apply(identity(3), PVector([1, 2, 3], p=3))
    np.testing.assert_array_equal(y.coords, [1, 2, 3])
    assert y.p == 3


def test_apply_shift_right_moves_e1_to_e2():
    y = apply(shift_right(4), PVector([1, 0, 0, 0]))
    np.testing.assert_array_equal(y.coords, [0, 1, 0, 0])


def test_apply_matches_loop_oracle():
    rng = np.random.default_rng(1)
    A, x = rng.uniform(-1, 1, (5, 5)), rng.uniform(-1, 1, 5)
    np.testing.assert_allclose(apply(A, PVector(x)).coords, loop_matvec(A, x), rtol=0, atol=1e-12)


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply(identity(3), PVector([1.0, 2.0]))


def test_compose_shifts():
    RL = compose(shift_right(4), shift_left(4)).entries
    np.testing.assert_array_equal(RL, np.diag([0, 1, 1, 1]))


def test_compose_with_identity_and_loop_oracle():
    rng = np.random.default_rng(2)
    A, B = rng.uniform(-1, 1, (4, 3)), rng.uniform(-1, 1, (3, 5))
    np.testing.assert_array_equal(compose(A, identity(3)).entries, A)
    np.testing.assert_allclose(compose(A, B).entries, loop_matmul(A, B), atol=1e-12)
    with pytest.raises(DimensionMismatch):
        compose(B, A)


def test_invert_diagonal():
    np.testing.assert_array_equal(invert(np.diag([2.0, 2.0])).entries, np.diag([0.5, 0.5]))


def test_invert_rank_one_update():
    e1 = np.eye(4)[0]
    A = np.eye(4) + outer(e1, e1).entries
    expected = np.eye(4) - 0.5 * np.outer(e1, e1)
    np.testing.assert_allclose(invert(A).entries, expected, atol=1e-15)


def test_invert_residual_on_random_map():
    rng = np.random.default_rng(3)
    A = rng.uniform(-1, 1, (6, 6)) + 3 * np.eye(6)
    inv = invert(A).entries
    assert np.abs(A @ inv - np.eye(6)).sum(axis=1).max() < 1e-10


def test_invert_rejects_singular_and_rectangular():
    with pytest.raises(NotInvertible):
        invert(np.diag([0.0, 1.0, 1.0]))
    with pytest.raises(NotInvertible):
        invert(np.diag([1.0, 1e-14]))
    with pytest.raises(DimensionMismatch):
        invert(np.ones((2, 3)))


def test_numerical_rank_examples():
    assert numerical_rank(np.zeros((4, 4))) == 0
    I_minus_RL = np.eye(5) - compose(shift_right(5), shift_left(5)).entries
    assert numerical_rank(I_minus_RL) == 1
    rng = np.random.default_rng(4)
    assert numerical_rank(low_rank(rng, 6, 6, 3)) == 3


def test_rank_factorization_examples():
    assert rank_factorization(np.zeros((3, 3))) == []

    I_minus_RL = np.eye(4) - compose(shift_right(4), shift_left(4)).entries
    (omega, g), = rank_factorization(I_minus_RL)
    np.testing.assert_array_equal(omega.coords, [1, 0, 0, 0])
    np.testing.assert_array_equal(g.coeffs, [1, 0, 0, 0])

    rng = np.random.default_rng(5)
    A = low_rank(rng, 5, 5, 2)
    terms = rank_factorization(A)
    assert len(terms) == 2
    rebuilt = sum(outer(w, h).entries for w, h in terms)
    assert np.abs(A - rebuilt).max() < 1e-10


def test_rank_factorization_rectangular_complex():
    rng = np.random.default_rng(6)
    A = low_rank(rng, 7, 4, 3, complex_=True)
    terms = rank_factorization(A)
    assert len(terms) == numerical_rank(A) == 3
    rebuilt = sum(outer(w, h).entries for w, h in terms)
    assert np.abs(A - rebuilt).sum(axis=1).max() <= TOL.residual_tol * (1 + np.abs(A).sum(axis=1).max())


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, math.inf])
def test_operator_norm_of_identity(p):
    assert operator_p_norm(identity(5), p).value == pytest.approx(1, abs=1e-12)
    assert operator_p_norm(identity(5), p, mode="estimate").value == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("p", [1, 1.25, 2, 3, 7, math.inf])
def test_shift_right_has_norm_one(p):
    R = shift_right(4).entries
    # every basis vector but the last is mapped isometrically
    basis_ratios = [np.linalg.norm(R[:, j], p) for j in range(4)]
    assert max(basis_ratios) == 1
    for mode in ("auto", "estimate"):
        value = operator_p_norm(R, p, mode=mode).value
        assert 1 - 1e-9 <= value <= 1 + 1e-9


def test_operator_norm_diag_and_modes():
    assert operator_p_norm(np.diag([3.0, 1.0]), 2) == (3.0, False)
    est = operator_p_norm(np.diag([3.0, 1.0]), 3)
    assert est.is_estimate and est.value == pytest.approx(3)
    with pytest.raises(UnsupportedExact):
        operator_p_norm(np.eye(2), 3, mode="exact")


def test_exact_norms_match_loop_formulas():
    rng = np.random.default_rng(7)
    A = uniform(rng, (4, 6), complex_=True)
    assert operator_p_norm(A, 1).value == pytest.approx(max_column_sum(A), rel=1e-12)
    assert operator_p_norm(A, "inf").value == pytest.approx(max_row_sum(A), rel=1e-12)


def test_tolerances_validation_and_env():
    with pytest.raises(ValueError):
        Tolerances(rank_tol=1.0)
    with pytest.raises(ValueError):
        Tolerances(residual_tol=-1)
    tol = Tolerances.from_env({"FRAMES_DEFAULT_TOL": "rank_tol=1e-9, residual_tol=1e-6"})
    assert (tol.rank_tol, tol.invert_tol, tol.residual_tol) == (1e-9, 1e-12, 1e-6)
    assert Tolerances.from_env({}) == Tolerances()
    with pytest.raises(ValueError):
        Tolerances.from_env({"FRAMES_DEFAULT_TOL": "bogus=1"})


def test_types_are_immutable_and_validated():
    v = PVector([1.0, 2.0])
    with pytest.raises(ValueError):
        v.coords[0] = 5
    with pytest.raises(ValueError):
        PVector([np.nan])
    with pytest.raises(ValueError):
        PVector([1.0], p=0.5)
    with pytest.raises(ValueError):
        LinearMap(np.zeros((0, 3)))
    assert Functional([1, 2j])(PVector([1, 1])) == 1 + 2j


# -- properties -------------------------------------------------------------

dims = st.integers(1, 8)
seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(dims, dims, dims, seeds, st.booleans())
def test_apply_compose_consistency(m, k, n, seed, complex_):
    rng = np.random.default_rng(seed)
    A, B, x = uniform(rng, (m, k), complex_), uniform(rng, (k, n), complex_), uniform(rng, n, complex_)
    lhs = apply(compose(A, B), PVector(x)).coords
    rhs = apply(A, apply(B, PVector(x))).coords
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * (1 + np.abs(rhs).max()))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), seeds, st.booleans())
def test_invert_round_trip(d, seed, complex_):
    rng = np.random.default_rng(seed)
    A = uniform(rng, (d, d), complex_)
    try:
        inv = invert(A, TOL).entries
    except NotInvertible:
        return
    eye = np.eye(d)
    residual = max(np.abs(A @ inv - eye).sum(axis=1).max(), np.abs(inv @ A - eye).sum(axis=1).max())
    assert residual <= TOL.residual_tol


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(0, 10), seeds, st.booleans())
def test_rank_factorization_minimality(m, n, r, seed, complex_):
    rng = np.random.default_rng(seed)
    A = low_rank(rng, m, n, min(r, m, n), complex_)
    terms = rank_factorization(A, TOL)
    assert len(terms) == numerical_rank(A, TOL)
    assert len(terms) == min(r, m, n)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), seeds, st.sampled_from([1.0, 2.0, math.inf]))
def test_estimate_never_exceeds_exact(m, n, seed, p):
    rng = np.random.default_rng(seed)
    A = uniform(rng, (m, n))
    exact = operator_p_norm(A, p, mode="exact").value
    est = operator_p_norm(A, p, mode="estimate", seed=seed).value
    assert est <= exact + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), seeds, st.sampled_from([1.0, 2.0, math.inf]))
def test_submultiplicative(d, seed, p):
    rng = np.random.default_rng(seed)
    A, B = uniform(rng, (d, d)), uniform(rng, (d, d))
    nab = operator_p_norm(A @ B, p).value
    assert nab <= operator_p_norm(A, p).value * operator_p_norm(B, p).value * (1 + 1e-12) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), seeds, st.booleans())
def test_two_norm_interpolation_bound(m, n, seed, complex_):
    rng = np.random.default_rng(seed)
    A = uniform(rng, (m, n), complex_)
    n1, n2, ninf = (operator_p_norm(A, p).value for p in (1, 2, math.inf))
    assert n2 <= math.sqrt(n1 * ninf) * (1 + 1e-9)


@pytest.mark.parametrize("p", [1.5, 3, 4])
@pytest.mark.parametrize("seed", range(5))
def test_estimate_close_to_grid_search_in_2d(p, seed):
    A = np.random.default_rng(seed).uniform(-1, 1, (2, 2))
    t = np.linspace(0, 2 * np.pi, 200_001)
    X = np.stack([np.cos(t), np.sin(t)])
    grid = (np.linalg.norm(A @ X, ord=p, axis=0) / np.linalg.norm(X, ord=p, axis=0)).max()
    est = operator_p_norm(A, p, mode="estimate").value
    # the estimate is attained by some x, so it cannot beat the true norm;
    # the grid is fine enough to sit within 1e-6 of it
    assert grid * (1 - 1e-6) <= est <= grid * (1 + 1e-6)
