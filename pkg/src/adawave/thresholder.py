"""Adaptive noise threshold from the elbow of the sorted density curve."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateCurveWarning, EmptyMap
from .quantizer import SparseGridMap

MODES = ("robust", "literal")


@dataclass(frozen=True, eq=False)
class DensityCurve:
    """Densities sorted descending plus their unit-square normalization.

    ``norm_points[i] = (i / (m-1), (v_i - v_min) / (v_max - v_min))``.
    ``ids`` holds the packed cell id of every sorted entry.
    """

    values: np.ndarray
    ids: np.ndarray
    norm_points: np.ndarray
    constant: bool

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ElbowConfig:
    """Knobs of the elbow search.

    ``robust`` takes the point farthest from the chord joining the curve's
    end points. ``literal`` scans turning angles: it tracks the sharpest
    bend seen so far and stops at the first point whose bend is at most
    ``return_fraction`` of it, once that sharpest bend reaches
    ``arm_angle``. ``as_printed`` starts the sharpest-bend tracker at pi
    with no arming, which makes the scan stop at the first gentle bend.
    """

    mode: str = "robust"
    return_fraction: float = 1 / 3
    arm_angle: float = math.pi / 6
    as_printed: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 < self.return_fraction < 1:
            raise ValueError("return_fraction must lie in (0, 1)")
        if not 0 < self.arm_angle < math.pi:
            raise ValueError("arm_angle must lie in (0, pi)")


def sort_densities(grid: SparseGridMap) -> DensityCurve:
    """Sort descending; equal densities are ordered by ascending cell id."""
    if len(grid) == 0:
        raise EmptyMap("no grid cells to sort")
    order = np.lexsort((grid.ids, -grid.values))
    values = grid.values[order]
    m = len(values)
    x = np.arange(m, dtype=np.float64) / (m - 1) if m > 1 else np.zeros(1)
    span = values[0] - values[-1]
    constant = not span > 0
    y = np.zeros(m) if constant else (values - values[-1]) / span
    return DensityCurve(values, grid.ids[order], np.column_stack([x, y]), constant)


def chord_distances(points: np.ndarray) -> np.ndarray:
    """Perpendicular distance of every point to the first-to-last chord."""
    p0, p1 = points[0], points[-1]
    direction = p1 - p0
    length = math.hypot(direction[0], direction[1])
    rel = points - p0
    return np.abs(rel[:, 0] * direction[1] - rel[:, 1] * direction[0]) / length


def _robust_rank(curve: DensityCurve) -> int:
    # argmax returns the first maximum, i.e. the larger density on ties
    return int(np.argmax(chord_distances(curve.norm_points)))


def turning_angles(points: np.ndarray) -> np.ndarray:
    """Angle between consecutive segments at every interior point.

    Entry ``i`` belongs to point ``i + 1``.
    """
    v1 = points[:-2] - points[1:-1]
    v2 = points[1:-1] - points[2:]
    dots = np.einsum("ij,ij->i", v1, v2)
    norms = np.linalg.norm(v1, axis=1) * np.linalg.norm(v2, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(norms > 0, dots / norms, 1.0)
    return np.arccos(np.clip(cos, -1.0, 1.0))


def _literal_rank(curve: DensityCurve, cfg: ElbowConfig):
    angles = turning_angles(curve.norm_points)
    theta0 = math.pi if cfg.as_printed else 0.0
    armed = cfg.as_printed
    for i, theta in enumerate(angles, start=1):
        if theta > theta0:
            theta0 = theta
        if not armed and theta0 >= cfg.arm_angle:
            armed = True
        if armed and theta <= theta0 * cfg.return_fraction:
            return i
    return None


def find_knee(curve: DensityCurve, cfg: ElbowConfig = ElbowConfig()):
    """Rank of the elbow point on ``curve``, or ``None`` if the curve is degenerate.

    A literal scan that never turns falls back to the robust knee.
    """
    if curve.constant or len(curve) < 3:
        return None
    if cfg.mode == "literal":
        rank = _literal_rank(curve, cfg)
        if rank is not None:
            return rank
    return _robust_rank(curve)


def find_threshold(curve: DensityCurve, cfg: ElbowConfig = ElbowConfig()) -> float:
    """Density at the elbow; cells at or below it are noise.

    Degenerate curves (constant, or fewer than three cells) warn with
    :class:`DegenerateCurveWarning` and return ``0.0`` so every cell is kept.
    """
    rank = find_knee(curve, cfg)
    if rank is None:
        warnings.warn(
            "density curve is constant or too short for elbow detection; "
            "keeping every cell",
            DegenerateCurveWarning,
            stacklevel=2,
        )
        return 0.0
    return float(curve.values[rank])


def filter_grids(grid: SparseGridMap, tau: float) -> SparseGridMap:
    """Keep cells with density strictly above ``tau``."""
    if tau < 0:
        raise ValueError("threshold must be non-negative")
    return grid.where(grid.values > tau)
