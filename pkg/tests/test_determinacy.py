import math

import numpy as np
import pytest

from momentkit.determinacy import (DETERMINATE, INCONCLUSIVE, INDETERMINATE,
                                   carleman_report, exp_abs_alpha_density,
                                   exp_abs_alpha_moments, gaussian_density,
                                   gaussian_moments, krein_report,
                                   lognormal_density, lognormal_family_moment,
                                   lognormal_moments, multivariate_carleman,
                                   product_moments, support_localization_check)
from momentkit.moments import AtomicMeasure, MomentSequence, moments_of_measure
from momentkit.poly import ConstraintSet, variables


def test_lognormal_carleman():
    r = carleman_report(lognormal_moments(), 30)
    assert r.verdict == INCONCLUSIVE
    # terms are e^(-n); the estimated sum is the geometric series
    assert r.evidence["terms"][0] == pytest.approx(math.exp(-1))
    assert r.evidence["estimated_sum"] == pytest.approx(1 / (math.e - 1), abs=1e-9)


def test_gaussian_carleman():
    r = carleman_report(gaussian_moments(), 30)
    assert r.verdict == DETERMINATE and r.evidence["M"] <= 1.0 + 1e-12


def test_factorial_stieltjes():
    fact = MomentSequence.from_generator(1, lambda a: float(math.factorial(a[0])),
                                         lambda a: math.lgamma(a[0] + 1))
    r = carleman_report(fact, 30, "stieltjes")
    assert r.verdict == DETERMINATE


def test_carleman_rejects_non_psd():
    with pytest.raises(ValueError):
        carleman_report(MomentSequence.univariate([1, 0, -1, 0, 1]), 2)


def test_krein_examples():
    assert krein_report(lognormal_density, "stieltjes").verdict == INDETERMINATE
    assert krein_report(exp_abs_alpha_density(0.5)).verdict == INDETERMINATE
    assert krein_report(gaussian_density).verdict == INCONCLUSIVE


def test_krein_negative_density():
    with pytest.raises(ValueError):
        krein_report(lambda x: np.sin(np.asarray(x, float)) - 2)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7, 1.0, 1.5, 2.0])
def test_never_both_fire(alpha):
    for mode in ("hamburger", "stieltjes"):
        c = carleman_report(exp_abs_alpha_moments(alpha, mode), 30, mode).verdict
        k = krein_report(exp_abs_alpha_density(alpha), mode).verdict
        assert not (c == DETERMINATE and k == INDETERMINATE)


def test_growth_fit_monotone_in_horizon():
    s = gaussian_moments()
    assert all(carleman_report(s, N).verdict == DETERMINATE for N in (5, 10, 20, 30))


@pytest.mark.parametrize("c", [-1.0, 0.5, 1.0])
def test_lognormal_family_moments(c):
    for n in range(6):
        exact = math.exp(n * n / 2)
        assert abs(lognormal_family_moment(c, n) - exact) <= 1e-6 * exact


def test_multivariate():
    r = multivariate_carleman(gaussian_moments(2), 20)
    assert r.verdict == DETERMINATE and len(r.axes) == 2
    mixed = product_moments([gaussian_moments(), lognormal_moments()])
    r = multivariate_carleman(mixed, 20)
    assert r.verdict == INCONCLUSIVE
    assert [a.verdict for a in r.axes] == [DETERMINATE, INCONCLUSIVE]
    one = multivariate_carleman(gaussian_moments(), 20)
    assert one.verdict == carleman_report(gaussian_moments(), 20).verdict


def test_support_localization():
    x1, x2 = variables(2)
    s = moments_of_measure(AtomicMeasure([[1.0, 1.0]], [1.0]), 8)
    assert support_localization_check(s, ConstraintSet(2, (x1, x2)), 2, N=4).verdict == "yes"
    s = moments_of_measure(AtomicMeasure([[-1.0, 1.0]], [1.0]), 8)
    r = support_localization_check(s, ConstraintSet(2, (x1,)), 2, N=4)
    assert r.verdict == "no verdict" and "positivity" in r.reason
    g = gaussian_moments()
    assert support_localization_check(g, ConstraintSet(1, ()), 2, N=10).verdict == "yes"
