"""Small-deviation curves and exponent fits."""

import math

import numpy as np
import pytest
from scipy.stats import norm

from conftest import synthetic_bank
from logchaos.errors import ParameterError
from logchaos.smalldev import (
    exact_curve,
    fit_laplace_exponent,
    fit_lognormal_exponent,
    laplace_vs_smalldev,
    smalldev_curve,
    smalldev_prob,
)


def test_prob_counts_and_exact_interval():
    bank = synthetic_bank(np.arange(1.0, 11.0))  # masses 1..10
    p, hw = smalldev_prob(bank, 3.5)
    assert p == 0.3
    # Clopper-Pearson 95% for k=3, n=10
    assert hw == pytest.approx(0.2928566694411314, abs=1e-12)


def test_prob_zero_count_one_sided():
    bank = synthetic_bank(np.arange(1.0, 11.0))
    p, hw = smalldev_prob(bank, 0.5)
    assert p == 0.0
    assert hw == pytest.approx(1.0 - 0.05 ** 0.1, abs=1e-12)


def test_prob_rejects_nonpositive_delta():
    bank = synthetic_bank(np.ones(5))
    with pytest.raises(ParameterError):
        smalldev_prob(bank, 0.0)


def test_curve_is_monotone_with_intervals(bank_d1):
    deltas = np.geomspace(0.02, 1.0, 10)
    curve = smalldev_curve(bank_d1, deltas)
    order = np.argsort(curve.deltas)
    probs = curve.probs[order]
    assert (np.diff(probs) >= 0.0).all()
    assert (curve.ci_half_widths > 0.0).all()
    assert curve.N == bank_d1.n_samples


def test_quadratic_fit_recovers_exact_coefficients():
    xs = np.linspace(1.0, 4.0, 12)
    true = 0.5 * xs**2 + 1.0 * xs + 0.25  # -ln of the transform
    fit = fit_laplace_exponent(xs, np.exp(-true), None)
    assert fit.c == pytest.approx(0.5, abs=1e-9)
    assert fit.linear == pytest.approx(1.0, abs=1e-8)
    assert fit.intercept == pytest.approx(0.25, abs=1e-8)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.lognormal_like


def test_fit_accepts_missing_errors_as_exact():
    # regression: a None error vector used to be folded into NaN weights
    xs = np.linspace(1.0, 3.0, 6)
    fit = fit_laplace_exponent(xs, np.exp(-(0.4 * xs**2)), None)
    assert fit.n_points == 6
    assert fit.c == pytest.approx(0.4, abs=1e-9)


def test_lognormal_exponent_from_exact_law():
    sigma = 1.0
    deltas = np.geomspace(1e-6, 0.05, 20)
    probs = norm.cdf(np.log(deltas) / sigma)
    fit = fit_lognormal_exponent(exact_curve(deltas, probs))
    # the quadratic coefficient approaches 1/(2 sigma^2) from below,
    # logarithmically slowly; this window sits within 5%
    assert 0.475 <= fit.c <= 0.525
    assert fit.lognormal_like
    assert fit.c_std_error < 0.02


def test_lognormal_exponent_needs_populated_bins(bank_d1):
    deltas = np.geomspace(1e-8, 1e-6, 8)  # far below any sampled mass
    curve = smalldev_curve(bank_d1, deltas)
    with pytest.raises(ParameterError):
        fit_lognormal_exponent(curve)


def test_exact_curve_marks_zero_width():
    curve = exact_curve([0.1, 0.2], [0.01, 0.05])
    assert (curve.ci_half_widths == 0.0).all()
    assert curve.N == 0
    # stored largest-to-smallest
    assert curve.deltas[0] > curve.deltas[1]


def test_sides_agree_on_real_bank(bank_d1):
    rep = laplace_vs_smalldev(bank_d1, np.linspace(1.2, 2.6, 6), stream_key=51)
    assert rep["directionOk"]
    assert math.isfinite(rep["gap"])
    assert rep["laplace"].c > 0.0
    assert rep["distribution"].c > 0.0
