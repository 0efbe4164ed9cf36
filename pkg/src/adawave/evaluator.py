"""Adjusted Mutual Information and nearest-centroid noise reassignment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import NOISE, Dataset, PointLabeling
from .exceptions import EmptyScope, LengthMismatch, NoClusters

SCOPES = ("all", "non-noise-truth")

# normalizers this close to zero are rounding residue of an exact zero
DENOM_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _labels(x) -> np.ndarray:
    if isinstance(x, PointLabeling):
        return np.asarray(x.labels)
    return np.asarray(x)


def contingency(a, b) -> ContingencyTable:
    a, b = _labels(a), _labels(b)
    if len(a) != len(b):
        raise LengthMismatch(f"labelings have lengths {len(a)} and {len(b)}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    counts = np.zeros((ai.max(initial=-1) + 1, bi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts)


def _entropy(marginal: np.ndarray, n: int) -> float:
    p = marginal[marginal > 0] / n
    return -math.fsum((p * np.log(p)).tolist())


def _mutual_info(table: ContingencyTable) -> float:
    n = table.total
    rows, cols = table.row_sums, table.col_sums
    i, j = np.nonzero(table.counts)
    nij = table.counts[i, j].astype(np.float64)
    # rows[i] * cols[j] commutes exactly, keeping the sum transpose-symmetric
    terms = nij / n * (np.log(nij) + math.log(n) - np.log(rows[i] * cols[j]))
    return math.fsum(terms.tolist())


def expected_mutual_info(rows: np.ndarray, cols: np.ndarray, n: int) -> float:
    """E[MI] under the hypergeometric (fixed-marginals permutation) model."""
    terms = []
    for a in rows.tolist():
        for b in cols.tolist():
            lo, hi = min(a, b), max(a, b)
            start = max(1, lo + hi - n)
            if start > lo:
                continue
            nij = np.arange(start, lo + 1, dtype=np.float64)
            log_p = (
                gammaln(lo + 1) + gammaln(hi + 1) + gammaln(n - lo + 1) + gammaln(n - hi + 1)
                - gammaln(n + 1) - gammaln(nij + 1) - gammaln(lo - nij + 1)
                - gammaln(hi - nij + 1) - gammaln(n - lo - hi + nij + 1)
            )
            mi = nij / n * (np.log(nij) + math.log(n) - math.log(lo * hi))
            terms.extend((mi * np.exp(log_p)).tolist())
    return math.fsum(terms)


def ami_from_table(table: ContingencyTable) -> float:
    n = table.total
    rows, cols = table.row_sums, table.col_sums
    h_a, h_b = _entropy(rows, n), _entropy(cols, n)
    mi = _mutual_info(table)
    emi = expected_mutual_info(rows, cols, n)
    denom = (h_a + h_b) / 2 - emi
    if abs(denom) < DENOM_ATOL or len(rows) == 1 or len(cols) == 1:
        # no room above chance (e.g. a single-class side): defined as 0
        return 0.0
    return (mi - emi) / denom


def ami(a, b, scope: str = "all", truth=None) -> float:
    """Adjusted Mutual Information with arithmetic-mean normalization.

    With ``scope="non-noise-truth"``, points whose ground-truth label is noise
    are dropped first. The ground truth is ``truth`` if given, else ``b``.
    Returns 0 when the normalizer vanishes (e.g. a constant labeling).
    """
    a, b = _labels(a), _labels(b)
    if len(a) != len(b):
        raise LengthMismatch(f"labelings have lengths {len(a)} and {len(b)}")
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}")
    if scope == "non-noise-truth":
        ref = b if truth is None else _labels(truth)
        if len(ref) != len(a):
            raise LengthMismatch("truth length differs from the labelings")
        keep = ref != NOISE
        a, b = a[keep], b[keep]
    if len(a) == 0:
        raise EmptyScope("no points left to score")
    return ami_from_table(contingency(a, b))


def reassign_noise(dataset, labels, anchored: bool = True, max_iter: int = 100) -> PointLabeling:
    """Move every noise point to the cluster with the nearest centroid.

    Centroids come from the points already in each cluster. With
    ``anchored=False`` centroids are recomputed from all members, newly
    assigned points included, and assignment repeats until stable.
    """
    points = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset, dtype=float)
    lab = _labels(labels).astype(np.int64)
    if len(lab) != len(points):
        raise LengthMismatch("labeling and dataset differ in length")
    noise = lab == NOISE
    k = int(lab.max(initial=0))
    if k == 0:
        raise NoClusters("no cluster to assign noise to")
    if not noise.any():
        return PointLabeling(lab.copy())

    def centroids(members):
        sums = np.zeros((k + 1, points.shape[1]))
        np.add.at(sums, members, points)
        counts = np.bincount(members, minlength=k + 1).astype(float)
        cent = sums[1:] / np.maximum(counts[1:, None], 1)
        cent[counts[1:] == 0] = np.inf
        return cent

    def nearest(cent):
        q = points[noise]
        d2 = ((q[:, None, :] - cent[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1) + 1

    out = lab.copy()
    cent = centroids(np.where(noise, 0, lab))
    out[noise] = nearest(cent)
    if not anchored:
        for _ in range(max_iter):
            new = nearest(centroids(out))
            if np.array_equal(new, out[noise]):
                break
            out[noise] = new
    return PointLabeling(out)
