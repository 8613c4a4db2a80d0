import math

import pytest

from ugc_platforms.model import (
    EMPTY,
    AdProfile,
    ModelError,
    ModelParams,
    UserType,
    interval_avg_quality,
    quality_schedule,
    user_utility,
)

from oracles import mean_quality


@pytest.mark.parametrize(
    "lam, beta, expected",
    [(0.1, 0.0, 1.0), (0.1, 1.0, 0.9), (0.2, 0.5, 0.9)],
)
def test_quality_schedule_values(lam, beta, expected):
    assert quality_schedule(ModelParams(lam), beta) == pytest.approx(expected, abs=1e-15)


def test_quality_schedule_rejects_out_of_range_beta():
    with pytest.raises(ModelError):
        quality_schedule(ModelParams(0.1), 1.2)
    with pytest.raises(ModelError):
        quality_schedule(ModelParams(0.1), -0.01)


@pytest.mark.parametrize("lam", [0.0, -0.1, 0.25, 0.3])
def test_params_reject_lambda_outside_window(lam):
    with pytest.raises(ModelError):
        ModelParams(lam)


def test_params_require_qm_above_lambda():
    with pytest.raises(ModelError):
        ModelParams(0.2, q_m=0.2)


def test_ads_nonnegative():
    with pytest.raises(ModelError):
        AdProfile(-0.01, 0.0)
    assert AdProfile(0.3, 0.1).gap == pytest.approx(0.2)


def test_full_interval_mean():
    assert interval_avg_quality(ModelParams(0.1), 0.0, 1.0) == pytest.approx(0.95, abs=1e-15)


def test_lower_upper_gap_is_half_lambda():
    p = ModelParams(0.1)
    gap = interval_avg_quality(p, 0.0, 0.5) - interval_avg_quality(p, 0.5, 1.0)
    assert gap == pytest.approx(0.05, abs=1e-15)


def test_interval_mean_against_quadrature():
    # lambda = 1/4 is outside the admissible window, so use 0.2.
    p = ModelParams(0.2)
    value = interval_avg_quality(p, 0.2, 0.6)
    assert value == pytest.approx(0.92, abs=1e-14)
    assert value == pytest.approx(mean_quality(0.2, 1.0, 0.2, 0.6), abs=1e-12)


def test_degenerate_interval_rejected():
    with pytest.raises(ModelError):
        interval_avg_quality(ModelParams(0.1), 0.4, 0.4)


def test_utility_values():
    p = ModelParams(0.1)
    assert user_utility(p, 0.0, 0.95, 0.5, 0.1) == pytest.approx(0.85)
    assert user_utility(p, 1.0, 0.9, 1.0, 0.0) == pytest.approx(1.9)


def test_empty_platform_is_dominated():
    p = ModelParams(0.1)
    empty = user_utility(p, 0.5, EMPTY, 0.0, 0.0)
    assert empty is EMPTY
    for other in (-1e300, -5.0, 0.0, 2.0):
        assert empty < other
        assert other > empty
        assert not other <= empty
    assert max(empty, -1e9) == -1e9
    assert EMPTY == EMPTY and EMPTY != -math.inf


def test_empty_sentinel_refuses_arithmetic():
    with pytest.raises(TypeError):
        EMPTY + 1.0  # noqa: B018


def test_user_type_quality():
    assert UserType(0.5).quality(ModelParams(0.2)) == pytest.approx(0.9)
    with pytest.raises(ModelError):
        UserType(1.5)
