import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from seadist.distnorm import (
    DEFAULT_D_MAX,
    DEFAULT_EPSILON,
    LossGains,
    NormalizationConfig,
    Strategy,
    composite_loss,
    denormalize,
    distance_loss,
    normalize,
    output_range,
)
from seadist.errors import (
    EmptyInput,
    InvalidConfig,
    LengthMismatch,
    NegativeComponent,
    NegativeDistance,
)

# high-precision decimal evaluations, frozen
LOG_100_OF_500 = 0.7423858680761309865827709417425567655357  # ln(101)/ln(501)
LOG_NEG_MIDPOINT_M = 21.38302928559939136103937617656365775064  # exp(ln(501)/2) - 1

LIN = NormalizationConfig(Strategy.LINEAR, 500.0)
LOG = NormalizationConfig(Strategy.LOG, 500.0, 1.0)
LIN_NEG = NormalizationConfig(Strategy.LINEAR_NEG, 500.0)
LOG_NEG = NormalizationConfig(Strategy.LOG_NEG, 500.0, 1.0)


def test_defaults():
    cfg = NormalizationConfig()
    assert cfg.d_max == DEFAULT_D_MAX == 500.0
    assert cfg.epsilon == DEFAULT_EPSILON == 1.0


def test_normalize_examples():
    assert normalize(250, LIN) == 0.5
    assert normalize(0, LOG) == 0.0
    assert normalize(0, LIN_NEG) == -1.0
    assert normalize(500, LIN_NEG) == 1.0
    assert normalize(100, LOG) == pytest.approx(LOG_100_OF_500, rel=1e-15)


def test_denormalize_examples():
    assert denormalize(0.5, LIN) == 250.0
    assert denormalize(1.0, LOG) == pytest.approx(500.0, rel=1e-14)
    assert denormalize(0.0, LOG_NEG) == pytest.approx(LOG_NEG_MIDPOINT_M, rel=1e-13)


def test_clamping():
    assert normalize(900, LIN) == 1.0
    assert denormalize(1.7, LIN) == 500.0
    assert denormalize(-3.0, LIN_NEG) == 0.0


def test_normalize_rejects_negative_and_nan():
    for bad in (-0.1, math.nan):
        with pytest.raises(NegativeDistance):
            normalize(bad, LIN)
    with pytest.raises(NegativeDistance):
        normalize(np.array([1.0, -1.0]), LIN)


def test_vectorized_matches_scalar():
    d = np.linspace(0, 500, 7)
    for cfg in (LIN, LOG, LIN_NEG, LOG_NEG):
        vec = normalize(d, cfg)
        assert isinstance(vec, np.ndarray)
        assert list(vec) == [normalize(float(x), cfg) for x in d]


@pytest.mark.parametrize("kwargs", [
    dict(strategy="cubic"),
    dict(d_max=0.0),
    dict(d_max=math.inf),
    dict(epsilon=-1.0),
    dict(strategy=Strategy.LOG, epsilon=0.0),
    dict(strategy=Strategy.LOG_NEG, d_max=0.5, epsilon=0.4),
])
def test_invalid_configs(kwargs):
    with pytest.raises(InvalidConfig):
        NormalizationConfig(**kwargs)


def test_output_range_small_epsilon():
    # log(eps) < 0 when eps < 1, so the lower end dips below zero
    cfg = NormalizationConfig(Strategy.LOG, 500.0, 0.1)
    lo, hi = output_range(cfg)
    assert lo == pytest.approx(math.log(0.1) / math.log(500.1))
    assert lo < 0 and hi == 1.0
    assert output_range(LIN) == (0.0, 1.0)
    assert output_range(LOG) == (0.0, 1.0)
    assert output_range(LIN_NEG) == (-1.0, 1.0)
    assert output_range(LOG_NEG) == (-1.0, 1.0)


configs = st.builds(
    NormalizationConfig,
    strategy=st.sampled_from(list(Strategy)),
    d_max=st.floats(10.0, 2000.0),
    epsilon=st.sampled_from([0.1, 1.0, 10.0]),
)


@given(configs, st.floats(0.0, 1.0))
def test_round_trip(cfg, frac):
    d = frac * cfg.d_max
    assert abs(denormalize(normalize(d, cfg), cfg) - d) <= 1e-9 * max(1.0, d)


@given(configs, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_monotone(cfg, a, b):
    d1, d2 = sorted((a * cfg.d_max, b * cfg.d_max))
    assume(d2 - d1 > 1e-9 * max(1.0, d2))
    assert normalize(d1, cfg) < normalize(d2, cfg)


@given(configs, st.floats(0.0, 5000.0))
def test_range(cfg, d):
    lo, hi = output_range(cfg)
    assert lo <= normalize(d, cfg) <= hi


@given(configs, st.floats(-10.0, 10.0))
def test_denormalize_stays_in_domain(cfg, y):
    assert 0.0 <= denormalize(y, cfg) <= cfg.d_max


def test_distance_loss():
    assert distance_loss([0.5], [0.5]) == 0.0
    assert distance_loss([0.2, 0.8], [0.4, 0.4]) == pytest.approx(0.3, abs=1e-15)
    assert distance_loss([0.0], [1.0]) == 1.0
    with pytest.raises(LengthMismatch):
        distance_loss([0.1], [0.1, 0.2])
    with pytest.raises(EmptyInput):
        distance_loss([], [])


def test_composite_loss():
    gains = LossGains()
    assert (gains.box_gain, gains.cls_gain, gains.obj_gain) == (0.05, 0.3, 0.7)
    assert composite_loss(1, 1, 1, 1, LossGains(0.05, 0.3, 0.7, 0.01)) == pytest.approx(1.06, abs=1e-15)
    assert composite_loss(0, 0, 0, 0, LossGains(3, 4, 5, 6)) == 0.0
    assert composite_loss(1, 0, 0, 2, LossGains(0.05, 0.3, 0.7, 0.1)) == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(NegativeComponent):
        composite_loss(1, -1, 0, 0)
    with pytest.raises(InvalidConfig):
        LossGains(box_gain=-0.1)


def test_distance_gain_ablation_scales_only_distance_term():
    base = composite_loss(0.4, 0.2, 0.1, 0.5, LossGains(dist_gain=0.0))
    for g in (0.001, 0.01, 0.1):
        total = composite_loss(0.4, 0.2, 0.1, 0.5, LossGains(dist_gain=g))
        assert total - base == pytest.approx(g * 0.5, abs=1e-15)
