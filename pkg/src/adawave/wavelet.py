"""Separable discrete wavelet transform on sparse grid maps.

A filter with taps ``h`` and alignment ``offset`` maps a signal ``x`` to

    y[k] = sum_t h[t] * x[2k + t - offset]

with absent cells read as zero. The transform scatters each stored cell
through the taps, so no dense array is ever built. Only the all-lowpass
(approximation) subband is carried from one level to the next.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import TooManyLevels, UnknownBasis
from .quantizer import SparseGridMap, _reduce, strides

# relative magnitude under which a coefficient counts as cancelled to zero
PRUNE_RTOL = 1e-12

# input cells per independently reduced block in a filtering pass
_CHUNK_CELLS = 1 << 15


@dataclass(frozen=True)
class FilterPair:
    """Analysis (and matching synthesis) filters of a two-channel bank.

    Offsets give the alignment of each filter: analysis output ``k`` reads
    inputs ``2k + t - offset``; synthesis input ``k`` writes outputs
    ``2k + t - offset``.
    """

    lowpass: Tuple[float, ...]
    highpass: Tuple[float, ...]
    lowpass_offset: int = 0
    highpass_offset: int = 0
    synthesis_lowpass: Tuple[float, ...] = ()
    synthesis_highpass: Tuple[float, ...] = ()
    synthesis_lowpass_offset: int = 0
    synthesis_highpass_offset: int = 0

    def __post_init__(self):
        for name in ("lowpass", "highpass"):
            taps = getattr(self, name)
            if len(taps) < 2 or not all(math.isfinite(c) for c in taps):
                raise ValueError(f"{name} needs at least two finite taps")


@dataclass(frozen=True)
class WaveletBasis:
    name: str
    filters: FilterPair = field(repr=False)


_R2 = math.sqrt(2.0)

_FILTERS = {
    "haar": FilterPair(
        lowpass=(1 / _R2, 1 / _R2),
        highpass=(1 / _R2, -1 / _R2),
        synthesis_lowpass=(1 / _R2, 1 / _R2),
        synthesis_highpass=(1 / _R2, -1 / _R2),
    ),
    # LeGall 5/3 biorthogonal pair, lowpass normalized to a DC gain of sqrt(2);
    # the 5-tap lowpass is centred on input 2k, the 3-tap highpass on 2k+1
    "cdf22": FilterPair(
        lowpass=tuple(_R2 * c for c in (-1 / 8, 1 / 4, 3 / 4, 1 / 4, -1 / 8)),
        highpass=tuple(c / _R2 for c in (-1 / 2, 1.0, -1 / 2)),
        lowpass_offset=2,
        highpass_offset=0,
        synthesis_lowpass=tuple(c / _R2 for c in (1 / 2, 1.0, 1 / 2)),
        synthesis_highpass=tuple(_R2 * c for c in (-1 / 8, -1 / 4, 3 / 4, -1 / 4, -1 / 8)),
        synthesis_lowpass_offset=1,
        synthesis_highpass_offset=1,
    ),
}

BASES = tuple(_FILTERS)


def filter_bank(name: str) -> FilterPair:
    try:
        return _FILTERS[name]
    except KeyError:
        raise UnknownBasis(
            f"unknown wavelet basis {name!r}; choose one of {', '.join(BASES)}"
        ) from None


def get_basis(basis) -> WaveletBasis:
    if isinstance(basis, WaveletBasis):
        return basis
    return WaveletBasis(basis, filter_bank(basis))


def output_extent(m: int) -> int:
    return -(-int(m) // 2)


def _filter_along(
    grid: SparseGridMap, dim: int, taps: Sequence[float], offset: int
) -> SparseGridMap:
    """Filter and downsample ``grid`` along one dimension."""
    dims = list(grid.dims)
    m = dims[dim]
    k_out = output_extent(m)
    dims[dim] = k_out
    dims = tuple(dims)
    if len(grid) == 0:
        return SparseGridMap(dims)

    stride = int(strides(grid.dims)[dim])
    rest = grid.ids // stride
    high = rest // m
    # cells that differ in a slower dimension never share an output cell, and
    # ids are sorted slowest-dimension first, so runs of equal ``high`` can be
    # reduced independently and simply concatenated
    bounds = [0, len(grid)]
    if len(grid) > _CHUNK_CELLS:
        cuts = np.flatnonzero(high[1:] != high[:-1]) + 1
        if len(cuts):
            wanted = np.arange(_CHUNK_CELLS, len(grid), _CHUNK_CELLS)
            picked = np.unique(cuts[np.minimum(np.searchsorted(cuts, wanted), len(cuts) - 1)])
            bounds = [0, *picked.tolist(), len(grid)]

    scale = np.abs(grid.values).max()
    parts_ids, parts_vals = [], []
    for a, b in zip(bounds[:-1], bounds[1:]):
        ids = grid.ids[a:b]
        coord = rest[a:b] % m
        base = ids % stride + high[a:b] * (stride * k_out)
        shifted = coord + offset
        out_ids, out_vals = [], []
        for t, c in enumerate(taps):
            if c == 0.0:
                continue
            pos = shifted - t
            ok = (pos >= 0) & (pos < 2 * k_out) & (pos % 2 == 0)
            out_ids.append(base[ok] + (pos[ok] // 2) * stride)
            out_vals.append(grid.values[a:b][ok] * c)
        part = _reduce(dims, np.concatenate(out_ids), np.concatenate(out_vals))
        part = _prune_cancelled(part, scale)
        parts_ids.append(part.ids)
        parts_vals.append(part.values)

    if len(parts_ids) == 1:
        return SparseGridMap(dims, parts_ids[0], parts_vals[0], _trusted=True)
    return SparseGridMap(
        dims, np.concatenate(parts_ids), np.concatenate(parts_vals), _trusted=True
    )


def _prune_cancelled(grid: SparseGridMap, scale: float) -> SparseGridMap:
    if len(grid) == 0:
        return grid
    keep = np.abs(grid.values) > PRUNE_RTOL * scale
    return grid if keep.all() else grid.where(keep)


def dwt_1d_sparse(
    grid: SparseGridMap, dim: int, filters: FilterPair
) -> Tuple[SparseGridMap, SparseGridMap]:
    """One analysis step along ``dim``, returning ``(approx, detail)``."""
    if not 0 <= dim < grid.d:
        raise ValueError(f"dim {dim} out of range for a {grid.d}-D map")
    approx = _filter_along(grid, dim, filters.lowpass, filters.lowpass_offset)
    detail = _filter_along(grid, dim, filters.highpass, filters.highpass_offset)
    return approx, detail


@dataclass
class DecompositionResult:
    """Approximation maps per level; ``levels[0]`` is the untransformed input.

    ``shifts[j]`` is how many times dimension ``j`` was halved to reach the
    last level (dimensions with a single interval are never transformed).
    """

    levels: List[SparseGridMap]
    basis: str
    shifts: Tuple[int, ...]

    @property
    def n_levels(self) -> int:
        return len(self.levels) - 1

    @property
    def final(self) -> SparseGridMap:
        return self.levels[-1]


def level_dims(dims: Sequence[int], levels: int) -> Tuple[int, ...]:
    out = list(dims)
    for _ in range(levels):
        out = [m if m == 1 else output_extent(m) for m in out]
    return tuple(out)


def decompose(grid: SparseGridMap, basis="cdf22", levels: int = 1) -> DecompositionResult:
    """Multi-level separable transform keeping the approximation subband.

    Each level filters every dimension with the lowpass, then drops cells
    whose value is not positive. Dimensions with a single interval pass
    through untouched; when every dimension has a single interval there is
    nothing to transform and the input is returned as the only level.
    """
    basis = get_basis(basis)
    levels = int(levels)
    if levels < 0:
        raise ValueError("levels must be >= 0")
    active = [j for j, m in enumerate(grid.dims) if m > 1]
    final_dims = level_dims(grid.dims, levels)
    if not active:
        return DecompositionResult([grid], basis.name, (0,) * grid.d)
    if any(final_dims[j] < 2 for j in active):
        raise TooManyLevels(
            f"{levels} levels would shrink dims {grid.dims} to {final_dims}; "
            "each transformed dimension must keep at least 2 cells"
        )

    fp = basis.filters
    out = [grid]
    current = grid
    for _ in range(levels):
        # slowest dimension first: it cannot be split into blocks, and the
        # map is smallest before any pass has spread it
        for j in reversed(active):
            current = _filter_along(current, j, fp.lowpass, fp.lowpass_offset)
        if len(current):
            scale = np.abs(current.values).max()
            current = current.where(current.values > PRUNE_RTOL * scale)
        out.append(current)
    shifts = tuple(levels if m > 1 else 0 for m in grid.dims)
    return DecompositionResult(out, basis.name, shifts)
