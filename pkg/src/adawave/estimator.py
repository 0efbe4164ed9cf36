"""scikit-learn compatible front end for the full clustering pipeline."""

from __future__ import annotations

import time
import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .clusterer import ADJACENCIES, build_lookup, connected_components, label_points
from .core import BoundingBox, Dataset, compute_bounds, validate
from .exceptions import DegenerateCurveWarning, EmptyDataset
from .quantizer import grid_indices, pack_many, quantize, resolve_dims
from .thresholder import ElbowConfig, filter_grids, find_knee, sort_densities
from .wavelet import BASES, decompose


class AdaWave(BaseEstimator, ClusterMixin):
    """Grid and wavelet based clustering for very noisy data.

    Points are binned into a sparse grid, the grid is smoothed with a
    wavelet lowpass, an elbow on the sorted smoothed densities separates
    cluster cells from noise cells, and connected groups of surviving cells
    become clusters. Points in discarded cells are labeled ``0`` (noise);
    clusters are numbered ``1..n_clusters_``.

    Parameters
    ----------
    scale : int or sequence of int, default=128
        Number of intervals per dimension (one value, or one per dimension).
    basis : {"cdf22", "haar"}, default="cdf22"
        Wavelet filter bank.
    levels : int, default=1
        Number of decomposition levels; ``0`` clusters the raw grid.
    threshold_mode : {"robust", "literal"}, default="robust"
        Elbow detector, see :class:`adawave.thresholder.ElbowConfig`.
    threshold_override : float or None, default=None
        Use this density threshold instead of searching for the elbow.
    adjacency : {"faces", "full"}, default="faces"
        Which neighbouring cells count as connected.
    bounds : BoundingBox, sequence or None, default=None
        Domain box as ``[lo1, hi1, lo2, hi2, ...]``; the data's own bounding
        box when ``None``.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
    n_clusters_ : int
    threshold_ : float
        Density threshold applied to the transformed grid.
    bbox_ : BoundingBox
    dims_ : tuple of int
        Interval count per dimension after degenerate dimensions collapse.
    grid_ : SparseGridMap
        Point counts per occupied cell.
    decomposition_ : DecompositionResult
    density_curve_ : DensityCurve or None
    grid_labels_ : GridLabeling
    lookup_ : LookupTable
    timings_ : dict
        Wall-clock seconds per stage of the last fit.
    """

    def __init__(
        self,
        scale=128,
        basis="cdf22",
        levels=1,
        threshold_mode="robust",
        threshold_override=None,
        adjacency="faces",
        bounds=None,
    ):
        self.scale = scale
        self.basis = basis
        self.levels = levels
        self.threshold_mode = threshold_mode
        self.threshold_override = threshold_override
        self.adjacency = adjacency
        self.bounds = bounds

    def _check_params(self):
        if self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")
        if self.adjacency not in ADJACENCIES:
            raise ValueError(f"adjacency must be one of {ADJACENCIES}")
        if int(self.levels) != self.levels or self.levels < 0:
            raise ValueError("levels must be a non-negative integer")
        if self.threshold_override is not None and self.threshold_override < 0:
            raise ValueError("threshold_override must be non-negative")
        return ElbowConfig(mode=self.threshold_mode)

    def _bbox(self, dataset: Dataset) -> BoundingBox:
        if self.bounds is None:
            return compute_bounds(dataset)
        if isinstance(self.bounds, BoundingBox):
            box = self.bounds
        else:
            box = BoundingBox.from_flat(self.bounds)
        if box.d != dataset.d:
            raise ValueError(f"bounds cover {box.d} dimensions, data has {dataset.d}")
        return box

    def fit(self, X, y=None):
        """Cluster ``X`` (array-like of shape (n_samples, n_features))."""
        cfg = self._check_params()
        dataset = validate(X)
        if dataset.n == 0:
            raise EmptyDataset("cannot cluster an empty dataset")
        timings = {}
        clock = time.perf_counter

        t0 = clock()
        self.bbox_ = self._bbox(dataset)
        self.dims_ = resolve_dims(self.bbox_, self.scale)
        self.grid_ = quantize(dataset, self.bbox_, self.dims_)
        timings["quantize"] = clock() - t0

        t0 = clock()
        self.decomposition_ = decompose(self.grid_, self.basis, int(self.levels))
        transformed = self.decomposition_.final
        timings["transform"] = clock() - t0

        t0 = clock()
        self.density_curve_ = sort_densities(transformed) if len(transformed) else None
        rank = None
        if self.threshold_override is None and self.density_curve_ is not None:
            rank = find_knee(self.density_curve_, cfg)
        self.degenerate_curve_ = self.threshold_override is None and rank is None
        if self.threshold_override is not None:
            self.threshold_ = float(self.threshold_override)
        elif rank is None:
            self.threshold_ = 0.0
            if self.density_curve_ is not None:
                warnings.warn(
                    "transformed densities have no elbow; keeping every cell",
                    DegenerateCurveWarning,
                    stacklevel=2,
                )
        else:
            self.threshold_ = float(self.density_curve_.values[rank])
        kept = filter_grids(transformed, self.threshold_)
        timings["threshold"] = clock() - t0

        t0 = clock()
        self.grid_labels_ = connected_components(kept, self.adjacency)
        timings["components"] = clock() - t0

        t0 = clock()
        self.lookup_ = build_lookup(self.dims_, self.decomposition_.shifts)
        labeling = label_points(dataset, self.bbox_, self.dims_, self.grid_labels_, self.lookup_)
        timings["label"] = clock() - t0

        self.labels_ = labeling.labels
        self.n_clusters_ = self.grid_labels_.n_clusters
        self.n_features_in_ = dataset.d
        self.timings_ = timings
        return self

    def predict(self, X):
        """Label new points with the fitted cell labels.

        Points outside the fitted bounding box are noise.
        """
        check_is_fitted(self, "grid_labels_")
        dataset = validate(X)
        if dataset.d != self.n_features_in_:
            raise ValueError(
                f"X has {dataset.d} features, the model was fitted on {self.n_features_in_}"
            )
        out = np.zeros(dataset.n, dtype=np.int64)
        inside = self.bbox_.contains(dataset.points) if dataset.n else np.zeros(0, bool)
        if inside.any():
            idx = self.lookup_.contract(
                grid_indices(dataset.points[inside], self.bbox_, self.dims_)
            )
            out[inside] = self.grid_labels_.lookup(pack_many(idx, self.lookup_.level_dims))
        return out
