import time

import pytest

from seadist.model import BOAT, BBox, Detection, Frame, GroundTruthObject


def box(x1, y1, x2, y2):
    return BBox(float(x1), float(y1), float(x2), float(y2))


def det(b, conf=0.9, cls=BOAT, dist=None):
    return Detection(bbox=b if isinstance(b, BBox) else box(*b), cls=cls,
                     confidence=conf, distance_m=dist)


def gt(b, dist=100.0, cls=BOAT):
    return GroundTruthObject(bbox=b if isinstance(b, BBox) else box(*b), cls=cls,
                             distance_m=dist)


def frame(dets=(), gts=(), frame_id=0):
    return Frame(frame_id=frame_id, timestamp_s=float(frame_id),
                 detections=tuple(dets), ground_truth=tuple(gts))


@pytest.fixture
def tmp_seq_dir(tmp_path):
    return tmp_path


# -- acceptance bookkeeping ----------------------------------------------------

ACCEPTANCE_LINES = []
SESSION_START = []

LAST_TEST = "test_criterion_10_suite_wall_clock"


def pytest_sessionstart(session):
    SESSION_START.append(time.perf_counter())


def pytest_collection_modifyitems(session, config, items):
    # the wall-clock criterion has to observe every other test
    last = [it for it in items if it.name == LAST_TEST]
    items[:] = [it for it in items if it.name != LAST_TEST] + last


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
