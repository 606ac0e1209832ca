"""Kernel-scale thresholds and the log potential of the unit ball.

Everything in d = 1 reduces to elementary integrals, which gives exact
oracles; the higher-dimensional quadrature values are pinned digits that
were cross-checked against slow adaptive integration when first frozen.
"""

import math

import numpy as np
import pytest

from logchaos.errors import ParameterError
from logchaos.params import ModelParams
from logchaos.potential import (
    ball_volume,
    boundary_threshold,
    cap_area,
    log_potential_ball,
    mean_split_exponent,
    mean_weight_profile,
    pd_min_eigenvalue,
    pd_threshold,
    spatial_mean_variance,
    uniform_energy_threshold,
)

E = math.e

# closed forms for d = 1..8
CLOSED_T = {
    1: 0.5,
    2: 1.0,
    3: E / 2.0,
    4: math.exp(0.5),
    5: math.exp(4.0 / 3.0) / 2.0,
    6: math.exp(0.75),
    7: math.exp(23.0 / 15.0) / 2.0,
    8: math.exp(11.0 / 12.0),
}


@pytest.mark.parametrize("d", sorted(CLOSED_T))
def test_pd_threshold_closed_forms(d):
    assert pd_threshold(d) == pytest.approx(CLOSED_T[d], rel=1e-14)


def test_pd_threshold_rejects_nonpositive_dim():
    with pytest.raises(ParameterError):
        pd_threshold(0)


def test_boundary_threshold_d1_closed_form():
    # the d = 1 boundary value integrates in closed form to 2/e
    assert math.log(boundary_threshold(1)) == pytest.approx(math.log(2.0) - 1.0, abs=1e-9)


@pytest.mark.parametrize(
    "d, pinned",
    [(3, 0.10981384722661182), (4, 0.16666666666666977), (5, 0.2014805138932674)],
)
def test_boundary_threshold_pinned_logs(d, pinned):
    assert math.log(boundary_threshold(d)) == pytest.approx(pinned, abs=1e-10)


def test_boundary_threshold_d4_hits_one_sixth():
    # the quadrature lands on 1/6 to its own tolerance; kept as a check
    # that nothing drifts in the integrand
    assert math.log(boundary_threshold(4)) == pytest.approx(1.0 / 6.0, abs=5e-12)


def test_uniform_energy_threshold_d1_closed_form():
    assert math.log(uniform_energy_threshold(1)) == pytest.approx(
        math.log(2.0) - 1.5, abs=1e-9
    )


def test_uniform_energy_threshold_d2_pinned():
    assert math.log(uniform_energy_threshold(2)) == pytest.approx(-0.25, abs=1e-9)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_threshold_ordering(d):
    # uniform-energy scale below the boundary scale, in every dimension
    assert uniform_energy_threshold(d) < boundary_threshold(d)


def test_boundary_above_gram_scale_only_in_d1():
    assert boundary_threshold(1) > pd_threshold(1)
    for d in (3, 4, 5):
        assert boundary_threshold(d) < pd_threshold(d)


# ---------------------------------------------------------------- potential

def u1_exact(x: float) -> float:
    # ball average of ln|x - y| over y in [-1, 1]:
    # ((1-x) ln|1-x| + (1+x) ln|1+x|) / 2 - 1, with 0 ln 0 = 0
    def t_ln(t):
        return 0.0 if t == 0.0 else t * math.log(abs(t))

    return (t_ln(1.0 - x) + t_ln(1.0 + x)) / 2.0 - 1.0


@pytest.mark.parametrize("x", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_log_potential_d1_matches_antiderivative(x):
    assert log_potential_ball(1, x) == pytest.approx(u1_exact(x), abs=1e-10)


def test_log_potential_rejects_points_outside_ball():
    with pytest.raises(ParameterError):
        log_potential_ball(1, 1.5)
    with pytest.raises(ParameterError):
        log_potential_ball(2, 3.0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_log_potential_center_value(d):
    # at the center the average of ln|y| over the ball is -1/d
    assert log_potential_ball(d, 0.0) == pytest.approx(-1.0 / d, abs=1e-10)


def test_log_potential_increases_towards_boundary():
    # the average log distance grows with the distance from the center
    vals = [log_potential_ball(2, x) for x in (0.0, 0.3, 0.6, 0.9)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_ball_volumes():
    assert ball_volume(1) == pytest.approx(2.0)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


@pytest.mark.parametrize("r", [0.3, 1.0, 1.7])
def test_cap_area_closed_forms(r):
    # the sphere {|x - e| = r} around a boundary point meets the unit ball
    # in a cap of half-angle acos(r/2): an arc 2 r acos(r/2) in the plane,
    # area 2 pi r^2 (1 - r/2) in space
    assert cap_area(2, r) == pytest.approx(2.0 * r * math.acos(r / 2.0), rel=1e-10)
    assert cap_area(3, r) == pytest.approx(2.0 * math.pi * r * r * (1.0 - r / 2.0), rel=1e-9)


def test_cap_area_vanishes_at_the_ends():
    assert cap_area(2, 0.0) == 0.0
    assert cap_area(3, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_cap_area_needs_two_dims():
    with pytest.raises(ParameterError):
        cap_area(1, 1.0)


def test_mean_weight_profile_decreasing_from_center():
    p = ModelParams(1, 1.0, 0.5)
    xs = [0.0, 0.3, 0.6, 1.0]
    vals = [mean_weight_profile(p, x) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(1.3493298241945528, abs=1e-9)


def test_spatial_mean_variance_pinned():
    assert spatial_mean_variance(ModelParams(1, 1.0, 0.5)) == pytest.approx(
        0.4548225555204377, abs=1e-9
    )


# ----------------------------------------------------------- gram matrices

def test_gram_positive_at_reference_model():
    rep = pd_min_eigenvalue(ModelParams(1, 1.0, 0.5), 64)
    assert rep.min_eigenvalue > 0.13  # comfortably positive, not borderline
    assert rep.violating_density is None
    assert rep.repair_magnitude == 0.0
    assert rep.cells == 64


def test_gram_fails_below_scale_with_witness():
    rep = pd_min_eigenvalue(ModelParams(1, 1.0, 0.2), 64)
    assert rep.min_eigenvalue < -1e-8
    assert rep.violating_density is not None
    assert np.linalg.norm(rep.violating_density) == pytest.approx(1.0, abs=1e-12)


def test_gram_positive_at_d2_closed_form_scale():
    rep = pd_min_eigenvalue(ModelParams(2, 1.0, 1.0), 100)
    assert rep.min_eigenvalue >= -1e-8


def test_gram_needs_at_least_two_cells():
    with pytest.raises(ParameterError):
        pd_min_eigenvalue(ModelParams(1, 1.0, 0.5), 1)


def test_mean_split_needs_three_dims():
    with pytest.raises(ParameterError):
        mean_split_exponent(ModelParams(2, 1.0, 1.0))


def test_mean_split_pinned_d3():
    p = ModelParams(3, 1.0, E / 2.0)
    assert mean_split_exponent(p) == pytest.approx(4.683987978212076, rel=1e-10)
