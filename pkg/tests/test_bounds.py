"""Small-deviation exponent bounds: unit-ball cases, the radius
sandwich, and the transfer back to the unit ball."""

import math

import pytest

from logchaos.bounds import (
    bounds_report,
    exponent_sandwich,
    transfer_to_unit,
    unit_exponent_lower,
    unit_exponent_upper,
)
from logchaos.errors import ParameterError
from logchaos.params import ModelParams
from logchaos.potential import mean_split_exponent

P3 = ModelParams(3, 1.0, math.e / 2.0)


@pytest.mark.parametrize(
    "params, value, case",
    [
        (ModelParams(1, 1.0, 0.5), 0.5097727239116331, "single-ball shell (T<=2)"),
        (ModelParams(2, 1.0, 1.0), 0.6107754583135971, "2d-ball split (T<=1)"),
        (P3, 0.27303902734732177, "single-ball shell (T<=2)"),
    ],
)
def test_unit_lower_bound_cases(params, value, case):
    got = unit_exponent_lower(params)
    assert got.value == pytest.approx(value, rel=1e-9)
    assert got.case == case


def test_unit_lower_bound_positive_everywhere_tested():
    for d, T in [(1, 0.3), (1, 1.9), (2, 0.8), (3, 1.2)]:
        assert unit_exponent_lower(ModelParams(d, 1.0, T)).value > 0.0


def test_unit_upper_bound_is_the_mean_split_route():
    assert unit_exponent_upper(P3) == pytest.approx(mean_split_exponent(P3), rel=1e-12)
    assert unit_exponent_upper(P3) == pytest.approx(4.683987978212076, rel=1e-10)


def test_upper_exceeds_lower_d3():
    assert unit_exponent_lower(P3).value < unit_exponent_upper(P3)


def test_sandwich_formula():
    low, up = exponent_sandwich(0.7, 0.3)
    assert low == pytest.approx(0.7 * 0.3 / (0.7 + 0.3), rel=1e-14)
    assert up == 0.7


def test_sandwich_monotone_and_capped():
    a = 0.7213475204444817
    lows = [exponent_sandwich(a, c)[0] for c in (0.1, 0.5, 2.0, 50.0)]
    assert all(x < y for x, y in zip(lows, lows[1:]))
    assert lows[-1] < a  # harmonic combination never reaches the cap


def test_transfer_to_unit_formula_and_empty_branch():
    a = 1.0
    # comfortable hypothesis: formula value
    got = transfer_to_unit(2.0, a, 0.5)
    want = (4.0 * 2.0 - 2.0 * a * 1.25) / 0.25
    assert got == pytest.approx(want, rel=1e-14)
    # hypothesis short of the threshold: no conclusion
    assert transfer_to_unit(0.3, a, 0.5) is None


def test_transfer_to_unit_guards():
    with pytest.raises(ParameterError):
        transfer_to_unit(1.0, 1.0, 0.0)
    with pytest.raises(ParameterError):
        transfer_to_unit(1.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        transfer_to_unit(1.0, -1.0, 0.5)


def test_bounds_report_d3():
    rep = bounds_report(P3, 0.5)
    assert rep.cr_lower == pytest.approx(0.19806786988313185, rel=1e-9)
    assert rep.cr_upper == pytest.approx(0.7213475204444817, rel=1e-12)
    assert rep.cr_lower < rep.cr_upper
    assert rep.a == pytest.approx(1.0 / (2.0 * math.log(2.0)), rel=1e-13)
    assert rep.cbar1_lower < rep.cbar1_upper
    assert rep.consistent


def test_bounds_report_without_upper_route():
    # below three dimensions the mean-split route is unavailable
    rep = bounds_report(ModelParams(1, 1.0, 0.5), 0.5)
    assert rep.cbar1_upper is None
    assert rep.cr_lower < rep.cr_upper
    assert rep.consistent


def test_bounds_report_respects_supplied_unit_rate():
    base = bounds_report(P3, 0.5)
    wide = bounds_report(P3, 0.5, cbar1_input=50.0)
    # a larger unit-ball rate tightens the harmonic lower edge toward a
    assert wide.cr_lower > base.cr_lower
    assert wide.cr_lower < wide.a


def test_bounds_report_dict_keys():
    d = bounds_report(P3, 0.5).to_dict()
    for key in (
        "crLower",
        "crUpper",
        "cbar1Lower",
        "cbar1Upper",
        "cbar1LowerCase",
        "consistent",
        "notes",
    ):
        assert key in d
