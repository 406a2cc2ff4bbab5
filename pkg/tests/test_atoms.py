import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentkit.atoms import (AtomExtractionError, extract_atoms_flat,
                             flat_extension_search, multiplication_operators,
                             richter_reduce, verify_representation)
from momentkit.hankel import MonomialBasis, build_hankel, kernel_polynomials, numeric_rank
from momentkit.moments import AtomicMeasure, MomentSequence, moments_of_measure
from momentkit.poly import ConstraintSet, Polynomial, monomials, variables


def hausdorff(A, B):
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return max(D.min(axis=1).max(), D.min(axis=0).max())


def matched_weights(mu, nu):
    D = np.linalg.norm(mu.points[:, None, :] - nu.points[None, :, :], axis=2)
    return nu.weights[D.argmin(axis=1)]


# Richter reduction ------------------------------------------------------------

def test_richter_line():
    mu = AtomicMeasure([[-2.0], [-1.0], [0.0], [0.5], [1.5]], [1, 2, 1, 0.5, 1])
    B = MonomialBasis.full(1, 2)
    nu = richter_reduce(mu, B)
    assert len(nu) <= 3
    assert verify_representation(moments_of_measure(mu, 2), nu, B, 1e-10).ok


def test_richter_unchanged():
    mu = AtomicMeasure([[0.0], [1.0]], [1.0, 2.0])
    nu = richter_reduce(mu, MonomialBasis.full(1, 2))
    assert nu.points.tolist() == mu.points.tolist() and nu.weights.tolist() == mu.weights.tolist()


def test_richter_plane():
    mu = AtomicMeasure([[0, 0], [1, 0], [0, 1], [1, 1]], [1.0] * 4)
    B = MonomialBasis.full(2, 1)
    nu = richter_reduce(mu, B)
    # the diagonals share their midpoint, so two weights can vanish at once
    assert len(nu) <= 3
    assert verify_representation(moments_of_measure(mu, 1), nu, B, 1e-10).ok
    mu = AtomicMeasure([[0, 0], [1, 0], [0, 1], [2, 3]], [1.0] * 4)
    nu = richter_reduce(mu, B)
    assert len(nu) == 3
    assert verify_representation(moments_of_measure(mu, 1), nu, B, 1e-10).ok


def test_richter_zero_measure():
    assert len(richter_reduce(AtomicMeasure.empty(2), MonomialBasis.full(2, 1))) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_richter_random(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    al = monomials(d, 3)
    pick = sorted(rng.choice(len(al), size=int(rng.integers(1, min(len(al), 10) + 1)), replace=False))
    B = MonomialBasis(d, [al[i] for i in pick])
    k = 2 * len(B)
    mu = AtomicMeasure(rng.uniform(-2, 2, (k, d)), rng.uniform(0.1, 1, k))
    nu = richter_reduce(mu, B)
    assert len(nu) <= len(B)
    assert all(any(np.array_equal(p, q) for q in mu.points) for p in nu.points)
    assert verify_representation(moments_of_measure(mu, 3), nu, B, 1e-10).ok


# flat extraction --------------------------------------------------------------

def test_extract_two_atoms():
    s = moments_of_measure(AtomicMeasure([[0, 0], [1, 1]], [1.0, 1.0]), 4)
    mu = extract_atoms_flat(s, 2)
    assert hausdorff(mu.points, np.array([[0.0, 0.0], [1.0, 1.0]])) < 1e-8
    np.testing.assert_allclose(mu.weights, [1, 1], atol=1e-8)


def test_extract_single_atom():
    t = np.array([0.3, -1.2, 2.0])
    s = moments_of_measure(AtomicMeasure([t], [2.5]), 2)
    mu = extract_atoms_flat(s, 1)
    np.testing.assert_allclose(mu.points[0], t, atol=1e-10)
    assert mu.weights[0] == pytest.approx(2.5)


def test_extract_not_flat():
    with pytest.raises(AtomExtractionError):
        extract_atoms_flat(MomentSequence.univariate([0, 0, 1]), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_roundtrip_and_kernel(seed):
    rng = np.random.default_rng(seed)
    d, k = int(rng.integers(1, 4)), int(rng.integers(1, 5))
    pts = rng.uniform(-2, 2, (k, d))
    if k > 1 and min(np.linalg.norm(pts[i] - pts[j]) for i in range(k) for j in range(i)) < 0.2:
        return
    mu = AtomicMeasure(pts, rng.uniform(0.2, 2, k))
    n = k + 1
    s = moments_of_measure(mu, 2 * n)
    nu = extract_atoms_flat(s, n)
    al = monomials(d, 2 * n)
    t = moments_of_measure(nu, 2 * n)
    scale = max(abs(s[a]) for a in al)
    assert max(abs(s[a] - t[a]) for a in al) <= 1e-8 * scale
    # atoms lie on the zero set of the kernel
    for p in kernel_polynomials(s, n - 1).polys:
        assert max(abs(p(x)) for x in nu.points) <= 1e-6 * max(1.0, p.norm())
    H = build_hankel(s, n)
    assert numeric_rank(H) == len(nu)


def test_multiplication_operators_commute():
    s = moments_of_measure(AtomicMeasure([[0, 1], [1, 0], [2, 2]], [1, 2, 3]), 6)
    M = multiplication_operators(s, 3)
    assert M.commutator < 1e-7
    for A in M.mats:
        np.testing.assert_allclose(A, A.T)


# verification -------------------------------------------------------------------

def test_verify_representation():
    mu = AtomicMeasure([[1.0], [2.0]], [1.0, 1.0])
    s = moments_of_measure(mu, 4)
    B = MonomialBasis.full(1, 4)
    assert verify_representation(s, mu, B).residual == 0.0
    bumped = AtomicMeasure(mu.points, [1.001, 1.0])
    r = verify_representation(s, bumped, B)
    assert r.residual == pytest.approx(1e-3, rel=1e-6)
    wrong = AtomicMeasure([[1.0], [3.0]], [1.0, 1.0])
    assert not verify_representation(s, wrong, B).ok


# flat extension search ---------------------------------------------------------

def test_flat_extension_found():
    x = Polynomial.univariate([0, 1])
    s = MomentSequence.univariate([1.0, 1.0, 1.0])
    r = flat_extension_search(s, ConstraintSet(1, (x,)))
    assert r.verdict == "found"
    np.testing.assert_allclose(r.measure.points, [[1.0]], atol=1e-6)


def test_flat_extension_not_a_moment_sequence():
    for m in (1, 2, 3):
        assert flat_extension_search(MomentSequence.univariate([0, 0, 1]), None, m).verdict == "unknown"


def test_flat_extension_interval():
    x = Polynomial.univariate([0, 1])
    s = MomentSequence.univariate([1.0, 0.0, 1.0])
    r = flat_extension_search(s, ConstraintSet(1, (1 - x * x,)))
    assert r.verdict == "found"
    assert np.all(np.abs(r.measure.points) <= 1 + 1e-6)
    assert verify_representation(s, r.measure, MonomialBasis.full(1, 2), 1e-6).ok


def test_product_roots_gap():
    a, b = [-1.0, 0.5, 2.0], [-2.0, 0.0, 1.0]
    pts = [[u, v] for u in a for v in b]
    s = moments_of_measure(AtomicMeasure(pts, np.linspace(1, 2, 9)), 6)
    r = numeric_rank(build_hankel(s, 3))
    assert r <= 8 and len(pts) - r >= 1
    x1, x2 = variables(2)
    p = (x1 + 1) * (x1 - 0.5) * (x1 - 2)
    q = (x2 + 2) * x2 * (x2 - 1)
    for g in (p, q):
        v = g.coeff_vector(build_hankel(s, 3).basis.alphas)
        assert abs(v @ build_hankel(s, 3).data @ v) < 1e-9
