import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentkit.hankel import (MonomialBasis, build_hankel, dump_matrix,
                              hankel_determinants, kernel_polynomials,
                              numeric_rank, positivity_profile, psd_check)
from momentkit.moments import (AtomicMeasure, MomentSequence, moments_of_measure,
                               riesz_apply)
from momentkit.poly import ConstraintSet, Polynomial, monomials, poly_mul


def seq(v):
    return MomentSequence.univariate(v)


def test_build_examples():
    assert build_hankel(seq([1, 0, 1]), 1).data.tolist() == [[1, 0], [0, 1]]
    assert build_hankel(seq([0, 0, 1]), 1).data.tolist() == [[0, 0], [0, 1]]
    s = seq([1.0, 0.3, 0.5, 0.2])
    a = -0.5
    H = build_hankel(s, 1, Polynomial.univariate([-a, 1.0])).data
    expect = [[s[i + j + 1] - a * s[i + j] for j in range(2)] for i in range(2)]
    np.testing.assert_allclose(H, expect)


def test_build_needs_moments():
    with pytest.raises(ValueError):
        build_hankel(seq([1, 0, 1]), 2)


def test_psd_examples():
    assert psd_check(np.eye(2)) == (True, 1.0)
    assert psd_check(np.diag([0.0, 1.0])) == (True, 0.0)
    ok, lam = psd_check(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert not ok and abs(lam + 1) < 1e-12


def test_rank_examples():
    d0 = moments_of_measure(AtomicMeasure([[0.0]], [1.0]), 4)
    assert numeric_rank(build_hankel(d0, 2)) == 1
    two = moments_of_measure(AtomicMeasure([[0, 0], [1, 1]], [1.0, 1.0]), 2)
    assert numeric_rank(build_hankel(two, 1)) == 2
    assert numeric_rank(np.zeros((3, 3))) == 0


def test_determinants():
    d0 = moments_of_measure(AtomicMeasure([[0.0]], [1.0]), 4)
    np.testing.assert_allclose(hankel_determinants(d0, 2), [1, 0, 0], atol=1e-15)
    half = seq([1, 0, 1, 0, 1])
    np.testing.assert_allclose(hankel_determinants(half, 2), [1, 1, 0], atol=1e-15)


def test_kernel_examples():
    d0 = moments_of_measure(AtomicMeasure([[0.0]], [1.0]), 2)
    K = kernel_polynomials(d0, 1)
    assert len(K) == 1 and K.polys[0].allclose(Polynomial.monomial((1,)))
    assert len(kernel_polynomials(seq([1, 0, 1]), 1)) == 0
    K = kernel_polynomials(seq([1, 0, 1, 0, 1]), 2)
    assert len(K) == 1
    v = K.vectors[0] / K.vectors[0][2]
    np.testing.assert_allclose(v, [-1, 0, 1], atol=1e-12)


def test_positivity_profile():
    x = Polynomial.univariate([0.0, 1.0])
    d2 = moments_of_measure(AtomicMeasure([[2.0]], [1.0]), 4)
    assert all(ok for _, ok, _ in positivity_profile(d2, [x], 2))
    dm = moments_of_measure(AtomicMeasure([[-1.0]], [1.0]), 4)
    prof = positivity_profile(dm, ConstraintSet(1, (x,)), 2)
    assert prof[0][1] and not prof[1][1] and prof[1][2] < 0
    assert len(positivity_profile(d2, [], 2)) == 1


def test_dump_has_basis_line():
    txt = dump_matrix(build_hankel(seq([1, 0, 1]), 1))
    assert txt.splitlines() == ["basis 0 1", "1 0", "0 1"]


def _instance(seed, dim=2, n=2):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    mu = AtomicMeasure(rng.uniform(-1.5, 1.5, (k, dim)), rng.uniform(0.1, 2, k))
    return rng, mu, moments_of_measure(mu, 2 * n)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_bilinear_identity(seed):
    rng, mu, s = _instance(seed)
    H = build_hankel(s, 2)
    al = list(H.basis)
    p = Polynomial.from_coeffs(rng.normal(size=len(al)), al)
    q = Polynomial.from_coeffs(rng.normal(size=len(al)), al)
    lhs = riesz_apply(s, poly_mul(p, q))
    assert abs(lhs - H.quadratic_form(p, q)) <= 1e-12 * (1 + np.abs(H.data).max()) * 10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_atomic_representation(seed):
    _, mu, s = _instance(seed)
    H = build_hankel(s, 2)
    V = np.array([H.basis.evaluate(x) for x in mu.points])
    np.testing.assert_allclose(H.data, (V.T * mu.weights) @ V, atol=1e-12 * np.abs(H.data).max())
    assert numeric_rank(H) <= len(mu)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_kernel_ideal_property(seed):
    rng, mu, s = _instance(seed, dim=1, n=4)
    K = kernel_polynomials(s, 4)
    for p in K.polys:
        if p.degree > 2:
            continue
        for k in range(0, 4 - p.degree + 1):
            pq = poly_mul(p, Polynomial.monomial((k,)))
            H = build_hankel(s, 4)
            v = pq.coeff_vector(H.basis.alphas)
            assert np.abs(H.data @ v).max() <= 1e-7 * np.abs(H.data).max()


def test_basis_order_and_duplicates():
    B = MonomialBasis(2, [(0, 2), (1, 0), (0, 0)])
    assert B.alphas == ((0, 0), (1, 0), (0, 2))
    with pytest.raises(ValueError):
        MonomialBasis(1, [(1,), (1,)])
