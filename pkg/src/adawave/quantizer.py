"""Grid quantization into a sparse ``{packed id: density}`` map.

Only non-empty cells are stored. Cell ids use a mixed-radix encoding with
the first dimension varying fastest, so ``id = sum(idx[j] * prod(dims[:j]))``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .core import BoundingBox, Dataset, validate
from .exceptions import CapacityError, IdOutOfRange, PointOutOfBounds

# packed ids live in int64, so the last id (prod(dims) - 1) must fit there
MAX_CELLS = 2**63

# quantize with a dense bincount when the grid is at most this many cells
_DENSE_BINCOUNT_LIMIT = 1 << 22


def check_capacity(dims: Sequence[int]) -> int:
    """Return the total cell count, raising if ids would overflow int64."""
    total = 1
    for m in dims:
        if int(m) < 1:
            raise ValueError(f"interval counts must be >= 1, got {list(dims)}")
        total *= int(m)
    if total > MAX_CELLS:
        raise CapacityError(
            f"grid of {total} cells exceeds the 64-bit packed id space; "
            "lower the scale or the dimensionality"
        )
    return total


def strides(dims: Sequence[int]) -> np.ndarray:
    out = np.ones(len(dims), dtype=np.int64)
    for j in range(1, len(dims)):
        out[j] = out[j - 1] * int(dims[j - 1])
    return out


class SparseGridMap:
    """Associative map from packed cell id to a non-zero real density.

    Stored as two parallel arrays, ``ids`` (sorted, unique int64) and
    ``values`` (float64). Zero densities are never stored.
    """

    __slots__ = ("dims", "ids", "values")

    def __init__(self, dims, ids=None, values=None, *, _trusted=False):
        self.dims = tuple(int(m) for m in dims)
        if ids is None:
            ids = np.empty(0, dtype=np.int64)
            values = np.empty(0, dtype=np.float64)
        ids = np.asarray(ids, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if not _trusted:
            check_capacity(self.dims)
            if ids.shape != values.shape or ids.ndim != 1:
                raise ValueError("ids and values must be 1-D arrays of equal length")
            if len(ids):
                order = np.argsort(ids, kind="stable")
                ids, values = ids[order], values[order]
                if np.any(np.diff(ids) == 0):
                    raise ValueError("duplicate cell ids")
                if ids[0] < 0 or ids[-1] >= np.prod(self.dims, dtype=object):
                    raise IdOutOfRange("cell id outside the grid")
            keep = values != 0
            ids, values = ids[keep], values[keep]
        self.ids = ids
        self.values = values

    @classmethod
    def from_dict(cls, dims, cells: dict) -> "SparseGridMap":
        keys = np.fromiter(cells.keys(), dtype=np.int64, count=len(cells))
        vals = np.fromiter(cells.values(), dtype=np.float64, count=len(cells))
        return cls(dims, keys, vals)

    @classmethod
    def from_dense(cls, array: np.ndarray) -> "SparseGridMap":
        """Build from a dense array indexed ``array[i0, i1, ...]``."""
        array = np.asarray(array, dtype=np.float64)
        # first dimension fastest == Fortran order
        flat = array.ravel(order="F")
        ids = np.flatnonzero(flat)
        return cls(array.shape, ids, flat[ids])

    def to_dense(self) -> np.ndarray:
        flat = np.zeros(int(np.prod(self.dims)), dtype=np.float64)
        flat[self.ids] = self.values
        return flat.reshape(self.dims, order="F")

    def to_dict(self) -> dict:
        return dict(zip(self.ids.tolist(), self.values.tolist()))

    def indices(self) -> np.ndarray:
        """Unpacked grid indices of the stored cells, shape ``(len, d)``."""
        return unpack_many(self.ids, self.dims)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, cell_id) -> bool:
        pos = np.searchsorted(self.ids, cell_id)
        return bool(pos < len(self.ids) and self.ids[pos] == cell_id)

    def __getitem__(self, cell_id) -> float:
        pos = np.searchsorted(self.ids, cell_id)
        if pos < len(self.ids) and self.ids[pos] == cell_id:
            return float(self.values[pos])
        raise KeyError(cell_id)

    def get(self, cell_id, default=0.0) -> float:
        try:
            return self[cell_id]
        except KeyError:
            return default

    def items(self):
        return zip(self.ids.tolist(), self.values.tolist())

    def __iter__(self):
        return iter(self.ids.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseGridMap):
            return NotImplemented
        return (
            self.dims == other.dims
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseGridMap(dims={self.dims}, cells={len(self)})"

    def __add__(self, other: "SparseGridMap") -> "SparseGridMap":
        return merge([self, other])

    def __mul__(self, scalar: float) -> "SparseGridMap":
        return SparseGridMap(self.dims, self.ids.copy(), self.values * float(scalar))

    __rmul__ = __mul__

    def where(self, mask: np.ndarray) -> "SparseGridMap":
        return SparseGridMap(
            self.dims, self.ids[mask], self.values[mask], _trusted=True
        )


def merge(maps: Iterable[SparseGridMap]) -> SparseGridMap:
    """Sum maps cell-wise; the result does not depend on the input order."""
    maps = list(maps)
    if not maps:
        raise ValueError("nothing to merge")
    dims = maps[0].dims
    if any(m.dims != dims for m in maps):
        raise ValueError("cannot merge maps with different dims")
    ids = np.concatenate([m.ids for m in maps])
    values = np.concatenate([m.values for m in maps])
    return _reduce(dims, ids, values)


def _reduce(dims, ids: np.ndarray, values: np.ndarray) -> SparseGridMap:
    if len(ids) == 0:
        return SparseGridMap(dims)
    # stable sort on id keeps the summation order deterministic
    order = np.argsort(ids, kind="stable")
    ids, values = ids[order], values[order]
    starts = np.flatnonzero(np.r_[True, ids[1:] != ids[:-1]])
    sums = np.add.reduceat(values, starts)
    keep = sums != 0
    return SparseGridMap(dims, ids[starts][keep], sums[keep], _trusted=True)


def pack(idx: Sequence[int], dims: Sequence[int]) -> int:
    if len(idx) != len(dims):
        raise ValueError("index and dims differ in length")
    out, stride = 0, 1
    for i, m in zip(idx, dims):
        i, m = int(i), int(m)
        if not 0 <= i < m:
            raise IdOutOfRange(f"index {tuple(idx)} outside dims {tuple(dims)}")
        out += i * stride
        stride *= m
    return out


def unpack(cell_id: int, dims: Sequence[int]) -> tuple:
    cell_id = int(cell_id)
    total = 1
    for m in dims:
        total *= int(m)
    if not 0 <= cell_id < total:
        raise IdOutOfRange(f"id {cell_id} outside [0, {total})")
    idx = []
    for m in dims:
        cell_id, r = divmod(cell_id, int(m))
        idx.append(r)
    return tuple(idx)


def pack_many(idx: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Vectorized :func:`pack` over rows of ``idx`` (no bounds check)."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size == 0:
        return np.empty(len(idx), dtype=np.int64)
    return idx @ strides(dims)


def unpack_many(ids: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    out = np.empty((len(ids), len(dims)), dtype=np.int64)
    rest = ids.copy()
    for j, m in enumerate(dims):
        rest, out[:, j] = np.divmod(rest, int(m))
    return out


def resolve_dims(bbox: BoundingBox, scale) -> tuple:
    """Per-dimension interval counts; degenerate dimensions get one interval."""
    d = bbox.d
    if np.ndim(scale) == 0:
        dims = [int(scale)] * d
    else:
        dims = [int(m) for m in scale]
        if len(dims) != d:
            raise ValueError(f"got {len(dims)} interval counts for {d} dimensions")
    if any(m < 1 for m in dims):
        raise ValueError("interval counts must be >= 1")
    dims = tuple(1 if bbox.lo[j] == bbox.hi[j] else m for j, m in enumerate(dims))
    check_capacity(dims)
    return dims


def grid_indices(points, bbox: BoundingBox, dims: Sequence[int]) -> np.ndarray:
    """Grid index of every point, shape ``(n, d)``.

    Intervals are right-open except the last, which also takes points on
    the upper edge of the box.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    dims_arr = np.asarray(dims, dtype=np.int64)
    if points.shape[1] != len(dims_arr):
        raise ValueError("point dimensionality does not match dims")
    inside = (points >= bbox.lo) & (points <= bbox.hi)
    if not inside.all():
        row = int(np.argwhere(~inside.all(axis=1))[0, 0])
        raise PointOutOfBounds(f"point at row {row} lies outside the bounding box")
    span = bbox.hi - bbox.lo
    width = np.divide(span, dims_arr, out=np.ones_like(span), where=span > 0)
    idx = np.floor((points - bbox.lo) / width).astype(np.int64)
    np.clip(idx, 0, dims_arr - 1, out=idx)
    return idx


def grid_index_of(point, bbox: BoundingBox, dims: Sequence[int]) -> tuple:
    return tuple(int(i) for i in grid_indices([point], bbox, dims)[0])


def quantize(dataset, bbox: BoundingBox, dims: Sequence[int]) -> SparseGridMap:
    """Count points per non-empty grid cell."""
    dataset = dataset if isinstance(dataset, Dataset) else validate(dataset)
    dims = tuple(int(m) for m in dims)
    total = check_capacity(dims)
    if dataset.n == 0:
        return SparseGridMap(dims)
    ids = pack_many(grid_indices(dataset.points, bbox, dims), dims)
    if total <= max(_DENSE_BINCOUNT_LIMIT, 4 * len(ids)) and total < 2**31:
        counts = np.bincount(ids, minlength=total)
        occupied = np.flatnonzero(counts)
        return SparseGridMap(
            dims, occupied, counts[occupied].astype(np.float64), _trusted=True
        )
    uniq, counts = np.unique(ids, return_counts=True)
    return SparseGridMap(dims, uniq, counts.astype(np.float64), _trusted=True)
