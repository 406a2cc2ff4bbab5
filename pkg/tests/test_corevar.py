from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import nnls

from momentkit.corevar import (FiniteX, Line1D, cone_membership, core_variety,
                               determinacy_via_core, existence_via_core,
                               facial_position, n1_cone, point_functional)
from momentkit.moments import evaluation_matrix
from momentkit.poly import Polynomial, monomials, robinson, robinson_zeros

LACUNARY = Line1D([0, 2, 4, 5, 6, 7, 8])


def lacunary_L(alpha=2.0):
    return point_functional(LACUNARY, [-1.0, 1.0, alpha])


def as_set(pts):
    return sorted(np.round(np.asarray(pts, float).ravel(), 6).tolist())


# the worked line example ---------------------------------------------------------

def test_lacunary_first_face():
    face = n1_cone(lacunary_L(), LACUNARY)
    assert not face.trivial
    np.testing.assert_allclose(np.sort(face.zeros), [-2, -1, 1, 2], atol=1e-4)
    x = Polynomial.univariate([0, 1])
    ref = ((x * x - 1) ** 2 * (x * x - 4) ** 2).coeff_vector([(e,) for e in LACUNARY.exponents])
    got = face.element / face.element[-1]
    np.testing.assert_allclose(got, ref / ref[-1], atol=1e-6)


def test_lacunary_core_variety():
    tr = core_variety(lacunary_L(), LACUNARY)
    assert tr.k == 2
    np.testing.assert_allclose(np.sort(tr.final.ravel()), [-1, 1, 2], atol=1e-4)
    ex = existence_via_core(lacunary_L(), LACUNARY)
    assert ex.verdict == "yes"
    mu = ex.measure.sorted()
    np.testing.assert_allclose(mu.points.ravel(), [-1, 1, 2], atol=1e-6)
    np.testing.assert_allclose(mu.weights, [1, 1, 1], atol=1e-6)
    assert determinacy_via_core(lacunary_L(), LACUNARY)["verdict"] == "determinate"
    fp = facial_position(lacunary_L(), LACUNARY)
    assert fp.position == "boundary" and fp.relative_interior is False


def test_not_a_moment_functional():
    X = Line1D([0, 2])
    L = np.array([-1.0, 0.0])
    tr = core_variety(L, X)
    np.testing.assert_allclose(tr.final.ravel(), [0.0], atol=1e-8)
    ex = existence_via_core(L, X)
    assert ex.verdict == "no" and ex.L_e < 0
    with pytest.raises(ValueError):
        determinacy_via_core(L, X)


def test_zero_functional():
    with pytest.raises(ValueError):
        n1_cone(np.zeros(3), Line1D([0, 1, 2]))
    ex = existence_via_core(np.zeros(3), Line1D([0, 1, 2]))
    assert ex.verdict == "yes" and len(ex.measure) == 0


def test_line_interior_and_single_atom():
    X = Line1D([0, 1, 2, 3, 4])
    L = np.array([1.0, 0.0, 1.0, 0.0, 3.0])
    assert facial_position(L, X).position == "interior"
    assert determinacy_via_core(L, X)["verdict"] == "indeterminate"
    one = point_functional(X, [0.7], [2.0])
    assert determinacy_via_core(one, X)["verdict"] == "determinate"


# finite ground sets ------------------------------------------------------------------

def grid_X(n=7, deg=2):
    pts = np.linspace(-1, 1, n)
    return FiniteX.from_monomials(pts, monomials(1, deg))


def test_strictly_positive_finite():
    X = grid_X()
    L = X.table.T @ np.linspace(1, 2, len(X))
    face = n1_cone(L, X)
    assert face.trivial
    tr = core_variety(L, X)
    assert tr.k == 0 and len(tr.final) == len(X)
    assert facial_position(L, X).position == "interior"
    assert determinacy_via_core(L, X)["verdict"] == "indeterminate"


def test_point_mass_finite():
    X = grid_X()
    L = X.table[3]
    fp = facial_position(L, X)
    assert fp.position == "boundary"
    tr = core_variety(L, X)
    assert tr.k == 1 and as_set(tr.final) == [0.0]
    assert determinacy_via_core(L, X)["verdict"] == "determinate"


def test_cone_membership_examples():
    X = grid_X(5)
    r = cone_membership(X.table[1], X)
    assert r.member and len(r.measure) == 1
    r = cone_membership(-X.table[1], X)
    assert not r.member
    assert np.all(X.table @ r.separator >= -1e-9) and r.separator @ -X.table[1] < 0
    v = X.table[[0, 2, 4]].T @ [0.5, 1.0, 2.0]
    r = cone_membership(v, X)
    assert r.member and len(r.measure) <= X.m and r.residual <= 1e-9


def brute_member(v, T):
    best = np.inf
    for k in range(1, T.shape[1] + 1):
        for S in combinations(range(T.shape[0]), k):
            _, res = nnls(T[list(S)].T, v)
            best = min(best, res)
    return best


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_cone_membership_brute_force(seed):
    rng = np.random.default_rng(seed)
    N, m = int(rng.integers(3, 13)), int(rng.integers(2, 5))
    pts = rng.uniform(-1, 1, (N, 2))
    al = monomials(2, 2)[:m]
    X = FiniteX.from_monomials(pts, al)
    if rng.uniform() < 0.5:
        idx = rng.choice(N, size=min(N, 3), replace=False)
        v = X.table[idx].T @ rng.uniform(0.1, 1, len(idx))
    else:
        v = rng.normal(size=m)
    res = brute_member(v, X.table)
    if 1e-9 < res < 1e-5:
        return
    got = cone_membership(v, X)
    assert got.member == (res <= 1e-9)
    if got.member:
        assert np.abs(X.table[[int(np.argmin(np.linalg.norm(pts - p, axis=1))) for p in got.measure.points]].T
                      @ got.measure.weights - v).max() <= 1e-8
    else:
        assert np.all(X.table @ got.separator >= -1e-9) and got.separator @ v < 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_permutation_invariance_and_support(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(4, 10))
    pts = np.sort(rng.choice(np.arange(-8, 9), size=N, replace=False) / 4.0)
    X = FiniteX.from_monomials(pts, monomials(1, 3))
    k = int(rng.integers(1, 4))
    L = X.table[rng.choice(N, size=k, replace=False)].T @ rng.uniform(0.5, 2, k)
    tr = core_variety(L, X)
    perm = rng.permutation(N)
    tr2 = core_variety(L, X.subset(perm))
    assert as_set(tr.final) == as_set(tr2.final)
    ex = existence_via_core(L, X)
    assert ex.verdict == "yes"
    assert ex.residual <= 1e-9 * max(1.0, np.abs(L).max())
    V = set(as_set(tr.final))
    assert set(as_set(ex.measure.points)) <= V
    sizes = [len(v) for _, _, v in tr.steps]
    assert sizes == sorted(sizes, reverse=True)


def test_trace_json():
    js = core_variety(lacunary_L(), LACUNARY).to_json()
    assert js["k"] == 2 and len(js["steps"]) >= 2


def test_robinson_zero_evaluations():
    Z = np.array(robinson_zeros(), dtype=float)
    al = [a for a in monomials(3, 6) if sum(a) == 6]
    assert len(al) == 28
    assert np.linalg.matrix_rank(evaluation_matrix(Z, al)) == 10
    assert all(robinson()(z) == 0 for z in Z)
