import numpy as np
import pytest

from adawave.core import Dataset

# acceptance outcomes keyed by criterion number, filled by test_acceptance
ACCEPTANCE = {}


def record(number, title, passed, detail=""):
    ACCEPTANCE[number] = (title, passed, detail)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_blobs():
    """Two tight 2-D blobs far apart inside the unit square, plus corner anchors."""
    gen = np.random.default_rng(3)
    a = gen.normal((0.2, 0.2), 0.01, size=(300, 2))
    b = gen.normal((0.8, 0.75), 0.01, size=(300, 2))
    corners = np.array([[0.0, 0.0], [1.0, 1.0]])
    pts = np.vstack([a, b, corners])
    truth = np.concatenate([np.ones(300, int), np.full(300, 2), [0, 0]])
    return Dataset(pts, truth)


@pytest.fixture
def noisy_blobs():
    """Two round blobs of 500 points over 300 uniform noise points."""
    gen = np.random.default_rng(3)
    a = gen.normal((0.25, 0.25), 0.03, size=(500, 2))
    b = gen.normal((0.75, 0.7), 0.03, size=(500, 2))
    noise = gen.uniform(0, 1, size=(300, 2))
    truth = np.concatenate([np.ones(500, int), np.full(500, 2), np.zeros(300, int)])
    return Dataset(np.vstack([a, b, noise]), truth)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] criterion {number:>2}: {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
