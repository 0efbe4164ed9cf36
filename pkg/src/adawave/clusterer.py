"""Connected components over surviving cells and mapping back to points."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _csgraph_components

from .core import NOISE, BoundingBox, Dataset, PointLabeling
from .quantizer import SparseGridMap, grid_indices, pack_many, strides

ADJACENCIES = ("faces", "full")


@dataclass(frozen=True, eq=False)
class GridLabeling:
    """Cluster id (``1..n_clusters``) of each labeled cell, keyed by sorted id."""

    dims: Tuple[int, ...]
    ids: np.ndarray
    labels: np.ndarray
    n_clusters: int

    def __len__(self) -> int:
        return len(self.ids)

    def to_dict(self) -> dict:
        return dict(zip(self.ids.tolist(), self.labels.tolist()))

    def lookup(self, ids: np.ndarray) -> np.ndarray:
        """Cluster id of each packed id, ``0`` where the cell is unlabeled."""
        ids = np.asarray(ids, dtype=np.int64)
        out = np.full(ids.shape, NOISE, dtype=np.int64)
        if len(self.ids) == 0 or ids.size == 0:
            return out
        pos = np.searchsorted(self.ids, ids)
        pos_c = np.minimum(pos, len(self.ids) - 1)
        hit = self.ids[pos_c] == ids
        out[hit] = self.labels[pos_c[hit]]
        return out


def neighbor_offsets(d: int, adjacency: str = "faces") -> np.ndarray:
    """One offset from each +/- pair of neighbor directions."""
    if adjacency == "faces":
        return np.eye(d, dtype=np.int64)
    if adjacency == "full":
        offs = [
            o
            for o in itertools.product((-1, 0, 1), repeat=d)
            if any(o) and next(v for v in reversed(o) if v) > 0
        ]
        return np.array(offs, dtype=np.int64).reshape(-1, d)
    raise ValueError(f"adjacency must be one of {ADJACENCIES}, got {adjacency!r}")


def connected_components(grid: SparseGridMap, adjacency: str = "faces") -> GridLabeling:
    """Label connected groups of stored cells.

    ``faces`` joins cells whose indices differ by one in a single dimension;
    ``full`` also joins diagonal neighbours. Labels are numbered in order of
    each component's smallest packed id.
    """
    offsets = neighbor_offsets(grid.d, adjacency)
    n = len(grid)
    if n == 0:
        return GridLabeling(grid.dims, grid.ids, np.empty(0, dtype=np.int64), 0)

    idx = grid.indices()
    dims = np.asarray(grid.dims, dtype=np.int64)
    step = strides(grid.dims)
    src_all, dst_all = [], []
    for off in offsets:
        moved = idx + off
        ok = np.all((moved >= 0) & (moved < dims), axis=1)
        if not ok.any():
            continue
        src = np.flatnonzero(ok)
        target = grid.ids[src] + int(off @ step)
        pos = np.searchsorted(grid.ids, target)
        pos_c = np.minimum(pos, n - 1)
        hit = grid.ids[pos_c] == target
        src_all.append(src[hit])
        dst_all.append(pos_c[hit])

    if src_all:
        src = np.concatenate(src_all)
        dst = np.concatenate(dst_all)
    else:
        src = dst = np.empty(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    k, raw = _csgraph_components(graph, directed=False)

    # renumber so components appear in order of their smallest id (ids are sorted)
    _, first = np.unique(raw, return_index=True)
    rank = np.empty(k, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(1, k + 1)
    return GridLabeling(grid.dims, grid.ids, rank[raw], int(k))


@dataclass(frozen=True)
class LookupTable:
    """Maps transformed cells to the original cells they summarize.

    ``shifts[j]`` is the number of halvings applied to dimension ``j``.
    """

    dims: Tuple[int, ...]
    shifts: Tuple[int, ...]

    @property
    def level_dims(self) -> Tuple[int, ...]:
        return tuple(-(-m // (1 << s)) for m, s in zip(self.dims, self.shifts))

    def originals(self, dim: int, k: int) -> range:
        s = self.shifts[dim]
        lo = k << s
        hi = min((k + 1) << s, self.dims[dim])
        return range(lo, hi)

    def contract(self, idx: np.ndarray) -> np.ndarray:
        """Transformed index of each original index (``floor(i / 2**T)``)."""
        return np.asarray(idx, dtype=np.int64) >> np.asarray(self.shifts, dtype=np.int64)


def build_lookup(dims: Sequence[int], levels) -> LookupTable:
    """Lookup table for ``levels`` halvings (an int, or one count per dimension)."""
    dims = tuple(int(m) for m in dims)
    if np.ndim(levels) == 0:
        if int(levels) < 0:
            raise ValueError("levels must be >= 0")
        shifts = tuple(int(levels) if m > 1 else 0 for m in dims)
    else:
        shifts = tuple(int(s) for s in levels)
        if len(shifts) != len(dims) or min(shifts, default=0) < 0:
            raise ValueError("need one non-negative shift per dimension")
    return LookupTable(dims, shifts)


def label_points(
    dataset,
    bbox: BoundingBox,
    dims: Sequence[int],
    grid_labels: GridLabeling,
    lut: LookupTable,
) -> PointLabeling:
    """Give every point the cluster id of its transformed cell (or noise)."""
    points = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset)
    if len(points) == 0:
        return PointLabeling(np.empty(0, dtype=np.int64))
    idx = lut.contract(grid_indices(points, bbox, dims))
    ids = pack_many(idx, lut.level_dims)
    return PointLabeling(grid_labels.lookup(ids))
