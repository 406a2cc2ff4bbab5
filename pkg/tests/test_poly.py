import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentkit.poly import (ConstraintSet, Polynomial, glex_key, homogeneous_part,
                            monomials, motzkin, poly_add, poly_eval, poly_mul,
                            poly_scale, robinson, robinson_zeros, variables)


def polys(dim, maxdeg=3):
    alpha = st.tuples(*[st.integers(0, maxdeg)] * dim)
    coef = st.floats(-5, 5, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
    return st.dictionaries(alpha, coef, max_size=6).map(lambda t: Polynomial(dim, t))


def test_eval_motzkin_zero():
    assert poly_eval(motzkin(), (1.0, 1.0)) == 0.0
    assert poly_eval(motzkin(), (0.0, 0.0)) == 1.0


def test_eval_constant():
    one = Polynomial.constant(3, 1.0)
    assert poly_eval(one, (0.3, -2.0, 7.0)) == 1.0


def test_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        poly_eval(motzkin(), (1.0, 2.0, 3.0))


@pytest.mark.parametrize("t", robinson_zeros())
def test_robinson_zeros(t):
    assert poly_eval(robinson(), t) == 0.0


def test_square_of_linear():
    x = Polynomial.univariate([1.0, 1.0])
    assert poly_mul(x, x) == Polynomial.univariate([1.0, 2.0, 1.0])


def test_times_zero_is_empty():
    p = motzkin()
    z = poly_mul(p, Polynomial(2))
    assert z.is_zero() and z.terms == {}
    assert z.degree == -np.inf


def test_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        poly_mul(motzkin(), robinson())


def test_robinson_identity():
    x, y, z = variables(3)
    lhs = (x ** 2 + y ** 2) * robinson()
    rhs = (x ** 2 * z ** 2 * (x ** 2 - z ** 2) ** 2
           + y ** 2 * z ** 2 * (y ** 2 - z ** 2) ** 2
           + (x ** 2 - y ** 2) ** 2 * (x ** 2 + y ** 2 - z ** 2) ** 2)
    assert lhs == rhs


def test_homogeneous_parts():
    x = Polynomial.univariate([1.0, 1.0, 1.0])
    assert homogeneous_part(x, 2) == Polynomial.monomial((2,))
    x1, x2 = variables(2)
    assert homogeneous_part(motzkin(), 6) == x1 ** 4 * x2 ** 2 + x1 ** 2 * x2 ** 4
    assert homogeneous_part(Polynomial(2), 3).is_zero()


@settings(max_examples=60, deadline=None)
@given(polys(2), polys(2), st.tuples(st.floats(-2, 2), st.floats(-2, 2)))
def test_mul_eval_homomorphism(p, q, x):
    lhs = poly_eval(poly_mul(p, q), x)
    rhs = poly_eval(p, x) * poly_eval(q, x)
    scale = 1.0 + poly_eval(Polynomial(2, {a: abs(c) for a, c in p.terms.items()}), np.abs(x)) * \
        poly_eval(Polynomial(2, {a: abs(c) for a, c in q.terms.items()}), np.abs(x))
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(polys(3, 4))
def test_homogeneous_parts_sum_back(p):
    total = Polynomial(3)
    for m in range(max(p.degree, 0) + 1):
        total = poly_add(total, homogeneous_part(p, m))
    assert total == p


@settings(max_examples=60, deadline=None)
@given(polys(2))
def test_json_roundtrip(p):
    q = Polynomial.from_json(json.loads(json.dumps(p.to_json())))
    assert q == p


def test_no_zero_terms_after_cancellation():
    x = Polynomial.monomial((1,))
    assert (x - x).terms == {}
    assert poly_scale(x, 0.0).is_zero()


def test_glex_order():
    alphas = monomials(2, 2)
    assert alphas == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert sorted(reversed(alphas), key=glex_key) == alphas


def test_constraint_set_checks():
    x, y = variables(2)
    f = ConstraintSet(2, (x, 1 - x - y))
    assert f.contains((0.2, 0.3)) and not f.contains((2.0, 0.0))
    assert len(f.products()) == 4
    with pytest.raises(ValueError):
        ConstraintSet(2, (Polynomial(2),))
    with pytest.raises(ValueError):
        ConstraintSet.from_json({"polys": [{"dim": 1}]})
