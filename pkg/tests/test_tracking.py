import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seadist.errors import InvalidConfig, NegativeDistance
from seadist.model import BOAT
from seadist.tracking import (
    RunningDistance,
    SmoothingMode,
    SortTracker,
    TrackerConfig,
    hungarian,
    kalman_init,
    kalman_predict,
    kalman_update,
    sort_step,
)
from seadist.tracking.kalman import (
    INITIAL_COVARIANCE,
    MEASUREMENT_NOISE,
    PROCESS_NOISE,
    bbox_to_z,
)
from seadist.tracking.sort import (
    DEFAULT_IOU_GATE,
    DEFAULT_MAX_AGE,
    DEFAULT_MIN_HITS,
    DEFAULT_SMOOTHING_MODE,
    DEFAULT_SMOOTHING_WINDOW,
    Track,
    smooth_distance,
)

from conftest import box, det
from oracles import brute_force_assignment_cost


def assignment_cost(cost, pairs):
    return math.fsum(cost[r][c] for r, c in pairs)


# -- Kalman ------------------------------------------------------------------

def test_noise_constants():
    assert np.array_equal(np.diag(MEASUREMENT_NOISE), [1, 1, 10, 10])
    assert np.array_equal(np.diag(INITIAL_COVARIANCE), [10, 10, 10, 10, 1e4, 1e4, 1e4])
    assert np.array_equal(np.diag(PROCESS_NOISE), [1, 1, 1, 1, 1e-2, 1e-2, 1e-4])


def test_kalman_init():
    s = kalman_init(box(0, 0, 10, 10))
    assert list(s.mean) == [5, 5, 100, 1, 0, 0, 0]
    assert np.array_equal(s.covariance, s.covariance.T)
    assert np.all(np.linalg.eigvalsh(s.covariance) >= 0)
    assert kalman_init(box(0, 0, 10, 10)) == s
    assert not s.mean.flags.writeable


def test_kalman_predict():
    s = kalman_init(box(0, 0, 10, 10))
    p = kalman_predict(s)
    assert list(p.mean[:4]) == [5, 5, 100, 1]
    assert np.trace(p.covariance) > np.trace(s.covariance)
    moving = type(s)(np.array([5, 5, 100, 1, 2, 0, 0.0]), s.covariance)
    m1 = kalman_predict(moving)
    m2 = kalman_predict(m1)
    assert m1.mean[0] == 7 and m2.mean[0] == 9


def test_kalman_predict_keeps_scale_positive():
    s = type(kalman_init(box(0, 0, 2, 2)))(np.array([1, 1, 4, 1, 0, 0, -10.0]), INITIAL_COVARIANCE)
    for _ in range(5):
        s = kalman_predict(s)
        assert s.mean[2] > 0


def test_kalman_update_zero_innovation():
    b = box(0, 0, 10, 10)
    s = kalman_predict(kalman_init(b))
    u = kalman_update(s, b)
    assert np.allclose(u.mean, s.mean, atol=0, rtol=0)
    assert np.all(np.diag(u.covariance)[:4] < np.diag(s.covariance)[:4])
    assert np.max(np.abs(u.covariance - u.covariance.T)) <= 1e-9


def test_kalman_update_converges_to_fixed_box():
    # without prediction the filter is a static estimator with a Gaussian prior;
    # after k updates the residual is (x0 - z) / (1 + k * P0 / R) per coordinate
    target = box(20, 30, 40, 45)
    x0 = bbox_to_z(box(0, 0, 10, 10))
    z = bbox_to_z(target)
    p0 = np.diag(INITIAL_COVARIANCE)[:4]
    r = np.diag(MEASUREMENT_NOISE)
    s = kalman_init(box(0, 0, 10, 10))
    for k in range(1, 201):
        s = kalman_update(s, target)
        if k in (1, 10, 200):
            expected = (x0 - z) / (1 + k * p0 / r)
            assert np.allclose(s.mean[:4] - z, expected, rtol=1e-9, atol=1e-12)
    assert np.all(np.abs(s.mean[:4] - z) <= 0.005 * np.abs(x0 - z))
    # with prediction in between the residual keeps shrinking too
    s = kalman_init(box(0, 0, 10, 10))
    gaps = []
    for _ in range(400):
        s = kalman_update(kalman_predict(s), target)
        gaps.append(np.max(np.abs(s.mean[:4] - z) / z))
    assert gaps[-1] < 1e-3 and gaps[-1] < gaps[199] < gaps[49]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 500), st.floats(0, 500), st.floats(1, 80), st.floats(1, 80)),
                min_size=1, max_size=15))
def test_kalman_covariance_stays_valid(boxes):
    s = kalman_init(box(10, 10, 20, 20))
    for x, y, w, h in boxes:
        s = kalman_update(kalman_predict(s), box(x, y, x + w, y + h))
        p = s.covariance
        assert np.max(np.abs(p - p.T)) <= 1e-9 * max(1.0, np.max(np.abs(p)))
        assert np.all(np.diag(p) >= 0)
        assert s.mean[2] > 0 and s.mean[3] > 0
        # posterior never exceeds the prior's observed-block variance
        assert np.all(np.diag(p)[:4] <= np.diag(kalman_predict(s).covariance)[:4])


# -- Hungarian ---------------------------------------------------------------

def test_hungarian_examples():
    c = [[1, 2], [2, 4]]
    pairs = hungarian(c)
    assert pairs == [(0, 1), (1, 0)] and assignment_cost(c, pairs) == 4
    diag = np.full((4, 4), 9.0)
    np.fill_diagonal(diag, 0.0)
    assert hungarian(diag) == [(i, i) for i in range(4)]
    row = [[5, 3, 8, 1, 7]]
    assert hungarian(row) == [(0, 3)]
    assert hungarian(np.zeros((0, 3))) == []


def test_hungarian_rectangular():
    tall = [[4, 1], [2, 8], [3, 3]]
    pairs = hungarian(tall)
    assert len(pairs) == 2 and assignment_cost(tall, pairs) == 3


def test_hungarian_rejects_bad_input():
    with pytest.raises(ValueError):
        hungarian([[1.0, math.nan]])
    with pytest.raises(ValueError):
        hungarian([1.0, 2.0])


def test_hungarian_matches_scipy_on_large_matrices():
    from scipy.optimize import linear_sum_assignment

    rng = np.random.default_rng(5)
    for _ in range(20):
        c = rng.normal(size=(int(rng.integers(1, 30)), int(rng.integers(1, 30))))
        r, k = linear_sum_assignment(c)
        assert assignment_cost(c, hungarian(c)) == pytest.approx(c[r, k].sum(), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_hungarian_brute_force(n, m, data):
    c = np.array(data.draw(st.lists(st.lists(st.integers(-20, 20), min_size=m, max_size=m),
                                    min_size=n, max_size=n)), dtype=float)
    pairs = hungarian(c)
    assert len(pairs) == min(n, m)
    assert len({r for r, _ in pairs}) == len({k for _, k in pairs}) == len(pairs)
    assert assignment_cost(c, pairs) == brute_force_assignment_cost(c)


# -- smoothing ---------------------------------------------------------------

def mean_window(w):
    return RunningDistance(w, SmoothingMode.MEAN)


def test_mean_smoothing_examples():
    r = mean_window(5)
    for x in (10, 20, 30):
        v = r.push(x)
    assert v == 20
    r = mean_window(4)
    assert [r.push(7.5) for _ in range(6)] == [7.5] * 6
    r = mean_window(3)
    for x in (10, 10, 10):
        r.push(x)
    assert r.push(70) == 30


def test_robust_smoothing_rejects_isolated_outlier():
    r = RunningDistance(3, SmoothingMode.ROBUST, 0.5)
    for x in (10, 10, 10):
        r.push(x)
    assert r.push(70) == 10
    r = RunningDistance(10, SmoothingMode.ROBUST, 0.5)
    for x in (10, 20, 30):
        v = r.push(x)
    assert v == 20


def test_robust_smoothing_follows_real_change():
    r = RunningDistance(5, SmoothingMode.ROBUST, 0.5)
    for x in (100, 100, 100, 300, 300, 300):
        v = r.push(x)
    assert v == 300


def test_smoothing_rejects_negative():
    with pytest.raises(NegativeDistance):
        RunningDistance().push(-1.0)
    with pytest.raises(NegativeDistance):
        RunningDistance().push(math.inf)


@given(st.sampled_from(list(SmoothingMode)), st.integers(1, 12), st.floats(0.05, 2.0),
       st.lists(st.floats(0.0, 1e4), min_size=1, max_size=40))
def test_smoothed_within_window_range(mode, window, reject, xs):
    r = RunningDistance(window, mode, reject)
    for x in xs:
        v = r.push(x)
        assert len(r.history) <= window
        assert min(r.history) <= v <= max(r.history)


def test_smooth_distance_records_raw():
    t = Track(1, kalman_init(box(0, 0, 1, 1)), BOAT, mean_window(3))
    assert smooth_distance(t, 12.0) == 12.0
    assert smooth_distance(t, 18.0) == 15.0
    assert t.raw_distance_m == 18.0 and t.distance_history == (12.0, 18.0)


# -- tracker -----------------------------------------------------------------

def test_defaults():
    cfg = TrackerConfig()
    assert (cfg.iou_gate, cfg.max_age, cfg.min_hits, cfg.smoothing_window) == (
        DEFAULT_IOU_GATE, DEFAULT_MAX_AGE, DEFAULT_MIN_HITS, DEFAULT_SMOOTHING_WINDOW) == (0.3, 3, 3, 10)
    assert cfg.smoothing_mode is DEFAULT_SMOOTHING_MODE


@pytest.mark.parametrize("kwargs", [
    dict(iou_gate=0.0), dict(iou_gate=1.0), dict(max_age=0), dict(min_hits=0),
    dict(smoothing_window=0), dict(smoothing_mode="median"), dict(reject_rel=0.0),
])
def test_invalid_tracker_config(kwargs):
    with pytest.raises(InvalidConfig):
        TrackerConfig(**kwargs)


STATIC = (100, 100, 140, 120)


def test_tentative_until_min_hits():
    tr = SortTracker()
    assert tr.step([det(STATIC)]) == []
    assert len(tr.tracks) == 1 and not tr.tracks[0].confirmed
    assert tr.step([det(STATIC)]) == []
    snap = tr.step([det(STATIC)])
    assert [s.track_id for s in snap] == [1]


def test_stationary_object_keeps_id():
    tr = SortTracker()
    ids = set()
    for _ in range(50):
        ids |= {s.track_id for s in tr.step([det(STATIC, dist=80.0)])}
    assert ids == {1}
    assert tr.tracks_created == 1


def test_moving_object_keeps_id():
    tr = SortTracker()
    ids = set()
    for k in range(60):
        ids |= {s.track_id for s in tr.step([det((100 + 3 * k, 100, 140 + 3 * k, 120))])}
    assert ids == {1}


def test_track_dropped_after_max_age():
    tr = SortTracker(TrackerConfig(max_age=3))
    for _ in range(5):
        tr.step([det(STATIC)])
    for _ in range(3):
        tr.step([])
    assert len(tr.tracks) == 1
    tr.step([])
    assert tr.tracks == []
    for _ in range(3):
        snap = tr.step([det(STATIC)])
    assert [s.track_id for s in snap] == [2]


def test_gap_within_max_age_keeps_id():
    tr = SortTracker()
    for _ in range(5):
        tr.step([det(STATIC)])
    tr.step([])
    tr.step([])
    snap = tr.step([det(STATIC)])
    assert [s.track_id for s in snap] == [1]


def test_dt_counts_as_missed_frames():
    tr = SortTracker(TrackerConfig(max_age=3))
    for _ in range(5):
        tr.step([det(STATIC)])
    tr.step([], dt=4)
    assert tr.tracks == []
    with pytest.raises(InvalidConfig):
        tr.step([], dt=0)


def test_two_objects_distinct_ids_and_distances():
    tr = SortTracker(TrackerConfig(smoothing_mode="mean"))
    a, b = (0, 0, 40, 20), (300, 0, 340, 20)
    for k in range(6):
        snap = tr.step([det(b, dist=200.0 + k), det(a, dist=50.0)])
    by_id = {s.track_id: s for s in snap}
    assert set(by_id) == {1, 2}
    assert by_id[1].smoothed_distance_m == pytest.approx(np.mean([200 + k for k in range(6)]))
    assert by_id[2].smoothed_distance_m == 50.0
    assert by_id[1].det_index == 0 and by_id[2].det_index == 1


def test_ids_never_reused():
    rng = np.random.default_rng(1)
    tr = SortTracker(TrackerConfig(max_age=1, min_hits=1))
    seen_alive = set()
    retired = set()
    for _ in range(200):
        dets = [det((x, 0, x + 30, 20)) for x in rng.choice(np.arange(0, 600, 50), 3, replace=False)
                if rng.random() < 0.6]
        before = {t.track_id for t in tr.tracks}
        tr.step(dets)
        after = {t.track_id for t in tr.tracks}
        retired |= before - after
        assert not (after & retired)
        seen_alive |= after
    assert len(seen_alive) == tr.tracks_created


def test_sort_step_functional_form():
    tr = SortTracker(TrackerConfig(min_hits=1))
    snap, tr2 = sort_step(tr, [det(STATIC)])
    assert tr2 is tr and len(snap) == 1


def test_dt_step_equals_empty_frames():
    for gap in range(1, 7):
        a, b = SortTracker(), SortTracker()
        for _ in range(4):
            a.step([det(STATIC)])
            b.step([det(STATIC)])
        for _ in range(gap - 1):
            a.step([])
        sa = a.step([det(STATIC)])
        sb = b.step([det(STATIC)], dt=gap)
        assert [s.track_id for s in sa] == [s.track_id for s in sb]
        assert a.tracks_created == b.tracks_created
