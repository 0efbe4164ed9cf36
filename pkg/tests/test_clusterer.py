import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adawave.core import BoundingBox, validate
from adawave.clusterer import (
    GridLabeling,
    build_lookup,
    connected_components,
    label_points,
    neighbor_offsets,
)
from adawave.quantizer import SparseGridMap, pack, pack_many, quantize
from adawave.thresholder import filter_grids, find_threshold, sort_densities
from adawave.wavelet import decompose

from oracles import flood_fill


def cells(dims, coords):
    return SparseGridMap.from_dict(dims, {pack(c, dims): 1.0 for c in coords})


def test_face_components():
    lab = connected_components(cells((8, 8), [(0, 0), (0, 1), (5, 5)]), "faces")
    assert lab.n_clusters == 2
    assert lab.to_dict() == {0: 1, 8: 1, 45: 2}


def test_diagonal_needs_full_adjacency():
    grid = cells((8, 8), [(0, 0), (1, 1)])
    assert connected_components(grid, "faces").n_clusters == 2
    assert connected_components(grid, "full").n_clusters == 1


def test_empty_map_has_no_components():
    lab = connected_components(SparseGridMap((4, 4)))
    assert lab.n_clusters == 0 and len(lab) == 0


def test_offsets_cover_each_direction_once():
    for d in (1, 2, 3):
        full = neighbor_offsets(d, "full")
        assert len(full) == (3**d - 1) // 2
        both = {tuple(o) for o in full} | {tuple(-o) for o in full}
        assert len(both) == 3**d - 1
        assert len(neighbor_offsets(d, "faces")) == d


def test_fifty_cells_match_flood_fill(rng):
    occ = np.zeros(64, bool)
    occ[rng.choice(64, 50, replace=False)] = True
    occ = occ.reshape(8, 8)
    for adjacency in ("faces", "full"):
        lab = connected_components(SparseGridMap.from_dense(occ.astype(float)), adjacency)
        ref, k = flood_fill(occ, adjacency)
        assert lab.n_clusters == k
        flat = np.zeros(64, int)
        flat[lab.ids] = lab.labels
        np.testing.assert_array_equal(flat.reshape((8, 8), order="F"), ref)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.floats(0.05, 0.7), st.integers(0, 2**32 - 1))
def test_components_match_flood_fill_any_d(d, p, seed):
    gen = np.random.default_rng(seed)
    shape = tuple(int(gen.integers(1, 7)) for _ in range(d))
    occ = gen.random(shape) < p
    grid = SparseGridMap.from_dense(occ.astype(float))
    faces = connected_components(grid, "faces")
    full = connected_components(grid, "full")
    for lab, adjacency in ((faces, "faces"), (full, "full")):
        ref, k = flood_fill(occ, adjacency)
        assert lab.n_clusters == k
        flat = ref.reshape(-1, order="F")
        assert lab.labels.tolist() == flat[lab.ids].tolist()
    assert full.n_clusters <= faces.n_clusters


def test_lookup_identity_and_dilation():
    lut = build_lookup((8,), 0)
    assert [list(lut.originals(0, k)) for k in range(8)] == [[k] for k in range(8)]
    assert list(build_lookup((8,), 1).originals(0, 3)) == [6, 7]
    lut = build_lookup((10,), 2)
    assert list(lut.originals(0, 2)) == [8, 9]
    assert lut.level_dims == (3,)


@pytest.mark.parametrize("m, t", [(10, 2), (8, 1), (13, 3), (5, 0)])
def test_lookup_ranges_partition(m, t):
    lut = build_lookup((m,), t)
    owners = {}
    for k in range(lut.level_dims[0]):
        for i in lut.originals(0, k):
            assert i not in owners
            owners[i] = k
    assert sorted(owners) == list(range(m))
    contracted = lut.contract(np.arange(m)[:, None])[:, 0]
    assert contracted.tolist() == [owners[i] for i in range(m)]


def test_single_interval_dimensions_are_not_contracted():
    lut = build_lookup((8, 1), 2)
    assert lut.shifts == (2, 0) and lut.level_dims == (2, 1)


UNIT = BoundingBox(np.zeros(2), np.ones(2))


def test_all_filtered_gives_all_noise(rng):
    ds = validate(rng.uniform(0, 1, size=(40, 2)))
    empty = GridLabeling((4, 4), np.empty(0, np.int64), np.empty(0, np.int64), 0)
    out = label_points(ds, UNIT, (4, 4), empty, build_lookup((4, 4), 0))
    assert out.labels.tolist() == [0] * 40


def test_single_cell_labels_everything():
    ds = validate([[0.1, 0.1], [0.2, 0.15], [0.05, 0.2]])
    dims = (4, 4)
    grid = quantize(ds, UNIT, dims)
    assert len(grid) == 1
    labels = connected_components(grid)
    out = label_points(ds, UNIT, dims, labels, build_lookup(dims, 0))
    assert out.labels.tolist() == [1, 1, 1]


def test_toy_two_blobs(two_blobs):
    ds = validate(two_blobs)
    dims = (16, 16)
    grid = quantize(ds, UNIT, dims)
    result = decompose(grid, "haar", 1)
    tau = find_threshold(sort_densities(result.final))
    labels = connected_components(filter_grids(result.final, tau))
    out = label_points(ds, UNIT, dims, labels, build_lookup(dims, result.shifts)).labels
    a, b = out[:300], out[300:600]
    assert len(set(a)) == 1 and len(set(b)) == 1
    assert a[0] != b[0] and 0 not in (a[0], b[0])


def test_label_points_order_insensitive(two_blobs, rng):
    ds = validate(two_blobs)
    dims = (16, 16)
    labels = connected_components(quantize(ds, UNIT, dims))
    lut = build_lookup(dims, 0)
    base = label_points(ds, UNIT, dims, labels, lut).labels
    perm = rng.permutation(ds.n)
    shuffled = label_points(validate(ds.points[perm]), UNIT, dims, labels, lut).labels
    np.testing.assert_array_equal(shuffled, base[perm])


def test_points_sharing_a_cell_share_a_label(rng):
    ds = validate(rng.uniform(0, 1, size=(500, 2)))
    dims = (8, 8)
    grid = quantize(ds, UNIT, dims)
    keep = filter_grids(grid, float(np.median(grid.values)))
    out = label_points(ds, UNIT, dims, connected_components(keep), build_lookup(dims, 0)).labels
    cell = pack_many(np.minimum((ds.points * 8).astype(int), 7), dims)
    for cid in np.unique(cell):
        assert len(set(out[cell == cid].tolist())) == 1
