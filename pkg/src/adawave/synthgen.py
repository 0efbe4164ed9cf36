"""Synthetic five-cluster benchmark with uniform background noise.

Clusters, all inside the unit square:

1. an anisotropic, rotated Gaussian ellipse;
2, 3. two rings whose x- and y-projections overlap;
4, 5. two parallel sloping line segments.

Noise is drawn uniformly over the square and makes up ``noise_pct`` percent
of the total. The geometry constants below are configuration; they only aim
at the layout described above, with the shapes kept several grid cells
apart at a scale of 128.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NOISE, Dataset
from .exceptions import InvalidConfig

N_CLUSTERS = 5

BASE_SIGMA = 0.005

ELLIPSE_CENTER = (0.2, 0.22)
ELLIPSE_SIGMAS = (8 * BASE_SIGMA, 3 * BASE_SIGMA)
ELLIPSE_ANGLE = math.radians(30)

RING_CENTERS = ((0.42, 0.55), (0.60, 0.73))
RING_RADIUS = 0.10
RING_JITTER = 2 * BASE_SIGMA

LINE_STARTS = ((0.55, 0.08), (0.66, 0.08))
LINE_DIRECTION = (1.0, 1.0)
LINE_LENGTH = 0.40
LINE_JITTER = 2 * BASE_SIGMA


@dataclass(frozen=True)
class SynthConfig:
    n_per_cluster: int = 5600
    noise_pct: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n_per_cluster) != self.n_per_cluster or self.n_per_cluster < 1:
            raise InvalidConfig("n_per_cluster must be a positive integer")
        if not 0 <= self.noise_pct < 100:
            raise InvalidConfig("noise_pct must lie in [0, 100)")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig("seed must fit in 64 unsigned bits")

    @property
    def n_noise(self) -> int:
        return int(round(N_CLUSTERS * self.n_per_cluster * self.noise_pct / (100 - self.noise_pct)))

    @property
    def n_total(self) -> int:
        return N_CLUSTERS * self.n_per_cluster + self.n_noise


def _rejection(rng, n, sampler):
    """Draw ``n`` points from ``sampler`` that fall inside the unit square."""
    out = np.empty((0, 2))
    while len(out) < n:
        batch = sampler(rng, 2 * (n - len(out)) + 16)
        inside = np.all((batch >= 0.0) & (batch <= 1.0), axis=1)
        out = np.vstack([out, batch[inside]])
    return out[:n]


def _ellipse(rng, n):
    c, s = math.cos(ELLIPSE_ANGLE), math.sin(ELLIPSE_ANGLE)
    rot = np.array([[c, -s], [s, c]])
    raw = rng.normal(size=(n, 2)) * ELLIPSE_SIGMAS
    return raw @ rot.T + ELLIPSE_CENTER


def _ring(center):
    def sample(rng, n):
        angle = rng.uniform(0.0, 2 * math.pi, size=n)
        radius = RING_RADIUS + rng.normal(0.0, RING_JITTER, size=n)
        return np.column_stack(
            [center[0] + radius * np.cos(angle), center[1] + radius * np.sin(angle)]
        )

    return sample


def _line(start):
    direction = np.asarray(LINE_DIRECTION) / math.hypot(*LINE_DIRECTION)
    normal = np.array([-direction[1], direction[0]])

    def sample(rng, n):
        along = rng.uniform(0.0, LINE_LENGTH, size=n)
        across = rng.normal(0.0, LINE_JITTER, size=n)
        return np.asarray(start) + along[:, None] * direction + across[:, None] * normal

    return sample


SAMPLERS = (
    _ellipse,
    _ring(RING_CENTERS[0]),
    _ring(RING_CENTERS[1]),
    _line(LINE_STARTS[0]),
    _line(LINE_STARTS[1]),
)


def generate(cfg: SynthConfig = SynthConfig()) -> Dataset:
    """Draw the benchmark; identical configs give identical datasets.

    Points are ordered cluster by cluster (labels 1..5) followed by noise
    (label 0).
    """
    if not isinstance(cfg, SynthConfig):
        raise InvalidConfig("expected a SynthConfig")
    rng = np.random.Generator(np.random.PCG64(int(cfg.seed)))
    n = cfg.n_per_cluster
    parts = [_rejection(rng, n, sampler) for sampler in SAMPLERS]
    parts.append(rng.uniform(0.0, 1.0, size=(cfg.n_noise, 2)))
    labels = np.concatenate(
        [np.full(n, k, dtype=np.int64) for k in range(1, N_CLUSTERS + 1)]
        + [np.full(cfg.n_noise, NOISE, dtype=np.int64)]
    )
    return Dataset(np.ascontiguousarray(np.vstack(parts)), labels)
