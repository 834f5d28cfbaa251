from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from paramlp.errors import ShapeError, UnsupportedSize
from paramlp.linalg import (
    VOLUME_ORACLE_MAX,
    make_poly,
    nonzero_eigenvalues,
    numerical_rank,
    penrose_residuals,
    pinv_volume_oracle,
    poly_from_factors,
    product_ratio,
    pseudo_inverse,
    real_roots,
    real_roots_with_multiplicity,
    realization_pair,
    shift_poly,
    shifted_factor_coeffs,
    smaller_product_eigenvalues,
)

EX1_BA = np.array([[1.0, 1.0, 1.0, 0.0], [1.0, -1.0, 0.0, -1.0]])


def low_rank(rng, m, n, r):
    if r == 0:
        return np.zeros((m, n))
    return rng.normal(size=(m, r)) @ rng.normal(size=(r, n))


# ---------------------------------------------------------------- pseudo-inverse


def test_pinv_of_example1_matrix_is_transpose_over_three():
    # rows are orthogonal with squared norm 3, so the inverse is A^T / 3
    P = pseudo_inverse(EX1_BA)
    assert P.shape == (4, 2)
    np.testing.assert_allclose(P, EX1_BA.T / 3.0, atol=1e-12)
    np.testing.assert_allclose(EX1_BA @ P @ EX1_BA, EX1_BA, atol=1e-9)
    np.testing.assert_allclose(pinv_volume_oracle(EX1_BA), P, atol=1e-12)


def test_pinv_of_zero_matrix_is_zero_transpose():
    P = pseudo_inverse(np.zeros((2, 3)))
    assert P.shape == (3, 2)
    assert not np.any(P)


def test_pinv_of_nonsingular_is_inverse():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(5, 5)) + 5 * np.eye(5)
    np.testing.assert_allclose(pseudo_inverse(M), np.linalg.inv(M), atol=1e-10)


def test_pinv_rejects_non_matrix():
    with pytest.raises(ShapeError):
        pseudo_inverse(np.ones(3))


@pytest.mark.parametrize("seed", range(100))
def test_volume_oracle_matches_svd_on_full_column_rank(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(4, 3))
    np.testing.assert_allclose(pinv_volume_oracle(M), pseudo_inverse(M), atol=1e-8)


def test_volume_oracle_size_bound():
    with pytest.raises(UnsupportedSize):
        pinv_volume_oracle(np.ones((VOLUME_ORACLE_MAX + 1, 2)))


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(1, 8),
    n=st.integers(1, 8),
    rfrac=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**32 - 1),
)
def test_penrose_equations_hold(m, n, rfrac, seed):
    rng = np.random.default_rng(seed)
    r = int(round(rfrac * min(m, n)))
    M = low_rank(rng, m, n, r)
    X = pseudo_inverse(M)
    assert numerical_rank(M) == r
    assert max(penrose_residuals(M, X)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(m=st.integers(1, 5), n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_pinv_of_transpose_is_transpose_of_pinv(m, n, seed):
    M = low_rank(np.random.default_rng(seed), m, n, min(m, n, 2))
    np.testing.assert_allclose(pseudo_inverse(M.T), pseudo_inverse(M).T, atol=1e-9)


# ------------------------------------------------------------------- spectra


def test_nonzero_eigenvalues_drop_zeros_and_pad():
    M = np.diag([2.0, 0.0, -3.0])
    ev = nonzero_eigenvalues(M)
    assert sorted(ev.real) == [-3.0, 2.0]
    padded = nonzero_eigenvalues(M, pad_to=4)
    assert padded.size == 4 and np.sum(padded == 0) == 2


@pytest.mark.parametrize("seed", range(10))
def test_smaller_product_matches_both_orders(seed):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(5, 3))
    Q = rng.normal(size=(3, 5))
    big = np.sort_complex(nonzero_eigenvalues(T @ Q))
    small = np.sort_complex(nonzero_eigenvalues(Q @ T))
    got = np.sort_complex(smaller_product_eigenvalues(T, Q))
    np.testing.assert_allclose(got, small, atol=1e-8)
    np.testing.assert_allclose(big, small, atol=1e-8)


def _direct_realization(C, b, c, lam):
    n = C.shape[0]
    return 1.0 + lam * c @ np.linalg.solve(np.eye(n) + lam * C, b)


@pytest.mark.parametrize("seed", range(10))
def test_realization_identity_against_direct_inverse(seed):
    rng = np.random.default_rng(seed)
    C = rng.normal(size=(6, 6))
    b = rng.normal(size=6)
    c = rng.normal(size=6)
    den, num = realization_pair(C, b, c)
    for lam in rng.uniform(-0.3, 0.3, size=20):
        direct = _direct_realization(C, b, c, lam)
        prod = product_ratio(num, den, lam)
        assert abs(prod.imag) <= 1e-8 * max(1.0, abs(direct))
        assert abs(prod.real - direct) <= 1e-8 * max(1.0, abs(direct))


# --------------------------------------------------------------- polynomials


def test_shifted_factor_coeffs_expand_product():
    eigs = np.array([2.0, -0.5, 1 + 2j, 1 - 2j])
    coeffs = shifted_factor_coeffs(eigs)
    t = 0.37
    assert np.isclose(Polynomial(coeffs)(t), np.prod(1 + t * eigs).real)
    assert np.isrealobj(coeffs)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=0, max_size=6),
    st.floats(-2, 2, allow_nan=False),
    st.floats(-2, 2, allow_nan=False),
)
def test_poly_from_factors_matches_direct_product(eigs, lambda0, lam):
    p = poly_from_factors(np.array(eigs), lambda0)
    direct = np.prod([1 + (lam - lambda0) * a for a in eigs]) if eigs else 1.0
    assert abs(p(lam) - direct) <= 1e-8 * max(1.0, abs(direct))


def test_shift_poly_moves_origin():
    # 1 + 2t with t = lam - 3 is 2 lam - 5
    p = shift_poly([1.0, 2.0], 3.0)
    np.testing.assert_allclose(p.coef, [-5.0, 2.0])


def test_make_poly_trims_tiny_trailing_terms():
    assert make_poly([1.0, 2.0, 1e-15]).degree() == 1


def test_example2_denominator_has_no_real_roots():
    # lam^2 - lam + 1 has discriminant -3
    assert real_roots(Polynomial([1.0, -1.0, 1.0])) == []


def test_real_roots_with_multiplicity():
    p = Polynomial.fromroots([1.0, 1.0, -2.0, 3.0])
    roots = real_roots_with_multiplicity(p)
    assert [r for r, _ in roots] == pytest.approx([-2.0, 1.0, 3.0], abs=1e-7)
    assert [k for _, k in roots] == [1, 2, 1]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=5, unique=True))
def test_real_roots_recovers_separated_roots(roots):
    roots = sorted(roots)
    if min(np.diff(roots), default=1.0) < 1e-2:
        return
    got = real_roots(Polynomial.fromroots(roots))
    assert got == pytest.approx(roots, abs=1e-6)
