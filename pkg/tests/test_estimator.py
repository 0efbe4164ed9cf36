import warnings

import numpy as np
import pytest
from sklearn.base import clone

from adawave import AdaWave
from adawave.exceptions import DegenerateCurveWarning, EmptyDataset, TooManyLevels


def test_params_round_trip():
    est = AdaWave(scale=64, basis="haar", levels=2)
    params = est.get_params()
    assert params["scale"] == 64 and params["basis"] == "haar" and params["levels"] == 2
    twin = clone(est)
    assert twin.get_params() == params and twin is not est


def test_defaults():
    p = AdaWave().get_params()
    assert p == {
        "scale": 128,
        "basis": "cdf22",
        "levels": 1,
        "threshold_mode": "robust",
        "threshold_override": None,
        "adjacency": "faces",
        "bounds": None,
    }


def test_fit_predict_noisy_blobs(noisy_blobs):
    est = AdaWave(scale=32)
    labels = est.fit_predict(noisy_blobs.points)
    assert est.n_clusters_ == 2
    first = np.bincount(labels[:500], minlength=3)
    second = np.bincount(labels[500:1000], minlength=3)
    # blob tails fall into noise cells; the cores must not mix
    assert first[1] >= 0.85 * 500 and first[2] == 0
    assert second[2] >= 0.85 * 500 and second[1] == 0
    assert np.count_nonzero(labels[1000:] == 0) >= 0.8 * 300
    assert set(est.timings_) == {"quantize", "transform", "threshold", "components", "label"}


def test_predict_reuses_fit(noisy_blobs):
    est = AdaWave(scale=32).fit(noisy_blobs.points)
    np.testing.assert_array_equal(est.predict(noisy_blobs.points), est.labels_)
    assert est.predict([[5.0, 5.0]]).tolist() == [0]
    with pytest.raises(ValueError):
        est.predict([[0.1, 0.2, 0.3]])


def test_override_without_levels_keeps_every_cell(rng):
    pts = rng.uniform(0, 1, size=(300, 2))
    est = AdaWave(scale=8, levels=0, threshold_override=0).fit(pts)
    assert (est.labels_ > 0).all()


def test_explicit_bounds(two_blobs):
    est = AdaWave(scale=32, bounds=[0, 1, 0, 1]).fit(two_blobs.points)
    np.testing.assert_array_equal(est.bbox_.lo, [0, 0])
    with pytest.raises(ValueError):
        AdaWave(bounds=[0, 1]).fit(two_blobs.points)


def test_constant_density_warns():
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.warns(DegenerateCurveWarning):
        est = AdaWave(scale=2, levels=0).fit(pts)
    assert est.degenerate_curve_ and est.threshold_ == 0.0
    assert est.n_clusters_ == 2


def test_bad_parameters(two_blobs):
    with pytest.raises(ValueError):
        AdaWave(basis="db4").fit(two_blobs.points)
    with pytest.raises(ValueError):
        AdaWave(levels=-1).fit(two_blobs.points)
    with pytest.raises(TooManyLevels):
        AdaWave(scale=4, levels=3).fit(two_blobs.points)
    with pytest.raises(EmptyDataset):
        AdaWave().fit(np.zeros((0, 2)))


def test_single_point():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCurveWarning)
        est = AdaWave().fit([[0.5, 0.5]])
    assert est.labels_.tolist() == [1]
