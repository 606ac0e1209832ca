"""Box-averaged logarithm tables.

The oracle here is written independently of the package: in d = 1 the
double box average of ln|x - y + a| is the second difference of
g(t) = t^2 ln|t|/2 - 3 t^2/4 (g'' = ln|t|), which is exact arithmetic.
Higher dimensions are checked table-against-quadrature.
"""

import math

import numpy as np
import pytest

from logchaos.boxlog import (
    pair_log_mean_table,
    self_log_mean,
    unit_pair_log_mean,
    unit_pair_log_mean_real,
)


def g(t: float) -> float:
    if t == 0.0:
        return 0.0
    return t * t * math.log(abs(t)) / 2.0 - 0.75 * t * t


def pair_mean_1d(a: float) -> float:
    return g(a + 1.0) - 2.0 * g(a) + g(a - 1.0)


@pytest.mark.parametrize("k", [0.0, 0.5, 1.0, 2.0, 3.0, 7.5])
def test_second_difference_oracle_d1(k):
    assert unit_pair_log_mean_real((k,)) == pytest.approx(pair_mean_1d(k), abs=1e-11)


def test_self_mean_d1_exact():
    assert self_log_mean(1) == pytest.approx(-1.5, abs=1e-12)


@pytest.mark.parametrize(
    "d, pinned",
    [(2, -0.8050867219500815), (3, -0.501813730207497)],
)
def test_self_mean_pinned(d, pinned):
    assert self_log_mean(d) == pytest.approx(pinned, abs=1e-9)


def test_self_mean_equals_zero_offset():
    assert self_log_mean(2) == pytest.approx(
        unit_pair_log_mean_real((0.0, 0.0)), abs=1e-10
    )


def test_table_matches_oracle_d1():
    t = pair_log_mean_table((5,))
    assert t.shape == (5,)
    for k in range(5):
        assert t[k] == pytest.approx(pair_mean_1d(float(k)), abs=1e-11)


def test_table_matches_quadrature_d2():
    t = pair_log_mean_table((3, 2))
    for i in range(3):
        for j in range(2):
            assert t[i, j] == pytest.approx(
                unit_pair_log_mean_real((float(i), float(j))), abs=5e-11
            )


def test_table_matches_quadrature_d3_spot():
    t = pair_log_mean_table((2, 2, 2))
    assert t[1, 1, 0] == pytest.approx(
        unit_pair_log_mean_real((1.0, 1.0, 0.0)), abs=5e-11
    )


def test_vectorized_matches_real():
    offs = np.array([[0.0, 1.0], [2.0, 0.0], [1.0, 1.0], [3.0, 2.0]])
    got = unit_pair_log_mean(offs)
    for row, val in zip(offs, got):
        assert val == pytest.approx(unit_pair_log_mean_real(tuple(row)), abs=5e-11)


def test_symmetry_under_sign_and_permutation():
    a = unit_pair_log_mean(np.array([[1.0, 2.0]]))[0]
    # axis permutation in the fast path, sign flip in the quadrature
    # (the fast path's contract is nonnegative lattice offsets)
    assert unit_pair_log_mean(np.array([[2.0, 1.0]]))[0] == pytest.approx(a, abs=1e-12)
    assert unit_pair_log_mean_real((-1.0, 2.0)) == pytest.approx(a, abs=5e-11)


def test_far_offsets_approach_point_logs():
    # boxes far apart: the average tends to ln(distance)
    k = 200.0
    assert unit_pair_log_mean_real((k,)) == pytest.approx(math.log(k), abs=1e-4)
