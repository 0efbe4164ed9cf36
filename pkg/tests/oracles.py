"""Slow, independent reference implementations used to check the package.

Nothing here imports the code paths it checks; everything works on dense
arrays or plain Python loops.
"""

import itertools
import math
from collections import deque
from fractions import Fraction

import numpy as np


# ------------------------------------------------------------ quantization


def dense_histogram(points, lo, hi, dims):
    """Count points per cell by scanning each dimension's interval list."""
    dims = tuple(dims)
    hist = np.zeros(dims)
    for p in points:
        cell = []
        for j, m in enumerate(dims):
            if m == 1:
                cell.append(0)
                continue
            edges = [lo[j] + (hi[j] - lo[j]) * i / m for i in range(m + 1)]
            hits = [
                i
                for i in range(m)
                if edges[i] <= p[j] < edges[i + 1] or (i == m - 1 and p[j] == hi[j])
            ]
            assert len(hits) == 1, f"coordinate {p[j]} in {len(hits)} intervals"
            cell.append(hits[0])
        hist[tuple(cell)] += 1
    return hist


# ------------------------------------------------------------ wavelets


def dense_filter_axis(x, axis, taps, offset):
    """``y[k] = sum_t taps[t] * x[2k + t - offset]`` with zero padding."""
    x = np.moveaxis(np.asarray(x, dtype=float), axis, 0)
    m = x.shape[0]
    k_out = (m + 1) // 2
    y = np.zeros((k_out,) + x.shape[1:])
    for k in range(k_out):
        for t, c in enumerate(taps):
            i = 2 * k + t - offset
            if 0 <= i < m:
                y[k] += c * x[i]
    return np.moveaxis(y, 0, axis)


def dense_approximation(x, taps, offset, levels=1):
    """All-lowpass subband after ``levels`` rounds, non-positive cells zeroed."""
    x = np.asarray(x, dtype=float)
    for _ in range(levels):
        for axis in range(x.ndim):
            if x.shape[axis] > 1:
                x = dense_filter_axis(x, axis, taps, offset)
        x = np.where(x > 0, x, 0.0)
    return x


def periodic_analysis(x, taps, offset):
    n = len(x)
    return np.array(
        [sum(c * x[(2 * k + t - offset) % n] for t, c in enumerate(taps)) for k in range(n // 2)]
    )


def periodic_synthesis(coeffs, taps, offset, n):
    out = np.zeros(n)
    for k, v in enumerate(coeffs):
        for t, c in enumerate(taps):
            out[(2 * k + t - offset) % n] += c * v
    return out


def periodic_reconstruct(x, fp):
    a = periodic_analysis(x, fp.lowpass, fp.lowpass_offset)
    d = periodic_analysis(x, fp.highpass, fp.highpass_offset)
    return periodic_synthesis(
        a, fp.synthesis_lowpass, fp.synthesis_lowpass_offset, len(x)
    ) + periodic_synthesis(d, fp.synthesis_highpass, fp.synthesis_highpass_offset, len(x))


# ------------------------------------------------------------ components


def flood_fill(occupied, adjacency="faces"):
    """BFS labeling of a dense boolean grid.

    Components are numbered by their smallest Fortran-order flat index, which
    matches numbering by smallest packed id.
    """
    occupied = np.asarray(occupied, dtype=bool)
    shape = occupied.shape
    if adjacency == "faces":
        steps = []
        for j in range(len(shape)):
            for s in (-1, 1):
                v = [0] * len(shape)
                v[j] = s
                steps.append(tuple(v))
    else:
        steps = [v for v in itertools.product((-1, 0, 1), repeat=len(shape)) if any(v)]
    labels = np.zeros(shape, dtype=int)
    order = sorted(
        zip(*np.nonzero(occupied)), key=lambda c: np.ravel_multi_index(c, shape, order="F")
    )
    nxt = 0
    for start in order:
        if labels[start]:
            continue
        nxt += 1
        labels[start] = nxt
        queue = deque([start])
        while queue:
            cell = queue.popleft()
            for v in steps:
                nb = tuple(c + s for c, s in zip(cell, v))
                if all(0 <= c < m for c, m in zip(nb, shape)) and occupied[nb] and not labels[nb]:
                    labels[nb] = nxt
                    queue.append(nb)
    return labels, nxt


# ------------------------------------------------------------ elbow


def chord_argmax(values):
    """Index of the sorted-curve point farthest from its end-to-end chord."""
    m = len(values)
    vmax, vmin = values[0], values[-1]
    pts = [(i / (m - 1), (v - vmin) / (vmax - vmin)) for i, v in enumerate(values)]
    (x0, y0), (x1, y1) = pts[0], pts[-1]
    best, best_d = 0, -1.0
    for i, (x, y) in enumerate(pts):
        dist = abs((x1 - x0) * (y0 - y) - (x0 - x) * (y1 - y0)) / math.hypot(x1 - x0, y1 - y0)
        if dist > best_d:
            best, best_d = i, dist
    return best


# ------------------------------------------------------------ AMI


def _entropy(counts, n):
    return -sum(c / n * math.log(c / n) for c in counts if c)


def mutual_info(a, b):
    n = len(a)
    ca, cb = {}, {}
    joint = {}
    for x, y in zip(a, b):
        ca[x] = ca.get(x, 0) + 1
        cb[y] = cb.get(y, 0) + 1
        joint[x, y] = joint.get((x, y), 0) + 1
    return sum(
        nij / n * math.log(n * nij / (ca[x] * cb[y])) for (x, y), nij in joint.items()
    ), list(ca.values()), list(cb.values())


def expected_mi_enumerated(rows, cols, n):
    """E[MI] by summing over the hypergeometric support with exact binomials."""
    total = 0.0
    for ai in rows:
        for bj in cols:
            for nij in range(max(1, ai + bj - n), min(ai, bj) + 1):
                prob = Fraction(math.comb(bj, nij) * math.comb(n - bj, ai - nij), math.comb(n, ai))
                total += float(prob) * nij / n * math.log(n * nij / (ai * bj))
    return total


def ami_oracle(a, b):
    n = len(a)
    mi, ra, rb = mutual_info(a, b)
    if len(ra) == 1 or len(rb) == 1:
        return 0.0
    emi = expected_mi_enumerated(ra, rb, n)
    denom = (_entropy(ra, n) + _entropy(rb, n)) / 2 - emi
    return 0.0 if abs(denom) < 1e-12 else (mi - emi) / denom


def expected_mi_by_permutation(a, b):
    """Average MI over every reordering of ``b`` (tiny inputs only)."""
    perms = list(itertools.permutations(b))
    return sum(mutual_info(a, p)[0] for p in perms) / len(perms)
