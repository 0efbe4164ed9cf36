"""Command line front end: ``generate``, ``cluster``, ``evaluate`` and ``sweep``.

CSV files are UTF-8 with one header row. Input coordinates are every column
except an optional ``label`` column, which holds ground truth (``0`` is
noise). ``cluster`` writes the coordinates back with an integer ``cluster``
column appended, plus a JSON run report.

Exit codes: 0 success, 1 I/O or parse error, 2 usage error, 3 grid too large
for 64-bit cell ids.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .core import NOISE, Dataset, validate
from .estimator import AdaWave
from .evaluator import ami, reassign_noise
from .exceptions import (
    AdaWaveError,
    CapacityError,
    EmptyScope,
    InvalidDatasetError,
    PointOutOfBounds,
)
from .synthgen import SynthConfig, generate
from .thresholder import MODES
from .wavelet import BASES

log = logging.getLogger("adawave")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

LABEL_COLUMN = "label"
CLUSTER_COLUMN = "cluster"
CURVE_SAMPLES = 1000


class CLIError(Exception):
    def __init__(self, message, code=EXIT_IO):
        super().__init__(message)
        self.code = code


@dataclass
class RunReport:
    parameters: dict
    n_points: int
    n_dims: int
    n_clusters: int
    cluster_sizes: dict
    n_noise: int
    stored_cells: dict
    degenerate_curve: bool
    ami: Optional[dict] = None
    density_curve: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- CSV io


def read_csv(path, label_column: Optional[str] = LABEL_COLUMN):
    """Read a header-first numeric CSV into ``(Dataset, header)``.

    ``header`` lists the coordinate columns. Raises :class:`CLIError` naming
    the offending line on malformed input.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CLIError(f"{path}: empty file, expected a header row") from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise CLIError(f"{path}:1: {exc}") from exc
        header = [h.strip() for h in header]
        label_at = header.index(label_column) if label_column in header else None
        coord_cols = [i for i in range(len(header)) if i != label_at]
        if not coord_cols:
            raise CLIError(f"{path}: no coordinate columns")
        rows, labels = [], []
        try:
            for row in reader:
                if not row or all(not c.strip() for c in row):
                    continue
                line = reader.line_num
                if len(row) != len(header):
                    raise CLIError(
                        f"{path}:{line}: expected {len(header)} fields, got {len(row)}"
                    )
                try:
                    rows.append([float(row[i]) for i in coord_cols])
                    if label_at is not None:
                        labels.append(int(row[label_at]))
                except ValueError as exc:
                    raise CLIError(f"{path}:{line}: {exc}") from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise CLIError(f"{path}:{reader.line_num}: {exc}") from exc

    points = np.array(rows, dtype=np.float64).reshape(len(rows), len(coord_cols))
    bad = ~np.isfinite(points).all(axis=1)
    if bad.any():
        raise CLIError(f"{path}: non-finite coordinate in data row {int(np.argmax(bad)) + 1}")
    truth = np.array(labels, dtype=np.int64) if label_at is not None else None
    return validate(Dataset(points, truth)), [header[i] for i in coord_cols]


def _fmt(value: float) -> str:
    return repr(float(value))


def write_points_csv(path, points, header, extra_name, extra_values) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(list(header) + [extra_name]) + "\n")
        lines = [
            ",".join([*map(_fmt, row), str(int(v))])
            for row, v in zip(points.tolist(), np.asarray(extra_values).tolist())
        ]
        if lines:
            fh.write("\n".join(lines) + "\n")


def read_column(path, name: str) -> np.ndarray:
    """Integer column ``name`` of a CSV (falls back to the last column)."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if not header:
            raise CLIError(f"{path}: empty file, expected a header row")
        col = header.index(name) if name in header else len(header) - 1
        out = []
        try:
            for row in reader:
                if not row:
                    continue
                try:
                    out.append(int(float(row[col])))
                except (ValueError, IndexError):
                    raise CLIError(f"{path}:{reader.line_num}: bad {header[col]!r} value") from None
        except csv.Error as exc:
            raise CLIError(f"{path}:{reader.line_num}: {exc}") from exc
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------- pipeline


def _sample_curve(curve) -> dict:
    if curve is None:
        return {"ranks": [], "values": []}
    m = len(curve)
    if m > CURVE_SAMPLES:
        ranks = np.unique(np.linspace(0, m - 1, CURVE_SAMPLES).round().astype(int))
    else:
        ranks = np.arange(m)
    return {"size": m, "ranks": ranks.tolist(), "values": curve.values[ranks].tolist()}


def run_cluster(dataset: Dataset, estimator: AdaWave, reassign: bool = False):
    """Fit ``estimator`` and assemble the labels and a :class:`RunReport`."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        estimator.fit(dataset.points)
    labels = estimator.labels_
    if reassign and estimator.n_clusters_ > 0:
        labels = reassign_noise(dataset, labels).labels

    counts = np.bincount(labels, minlength=estimator.n_clusters_ + 1)
    scores = None
    if dataset.ground_truth is not None:
        scores = {"all": ami(labels, dataset.ground_truth)}
        try:
            scores["non-noise-truth"] = ami(labels, dataset.ground_truth, scope="non-noise-truth")
        except EmptyScope:
            scores["non-noise-truth"] = None

    est = estimator
    params = est.get_params()
    params.update(
        dims=list(est.dims_),
        threshold=est.threshold_,
        bounds=[v for pair in zip(est.bbox_.lo.tolist(), est.bbox_.hi.tolist()) for v in pair],
        reassign_noise=reassign,
    )
    report = RunReport(
        parameters=params,
        n_points=dataset.n,
        n_dims=dataset.d,
        n_clusters=est.n_clusters_,
        cluster_sizes={str(k): int(counts[k]) for k in range(1, est.n_clusters_ + 1)},
        n_noise=int(counts[NOISE]),
        stored_cells={
            "quantized": len(est.grid_),
            "transformed": len(est.decomposition_.final),
            "clustered": len(est.grid_labels_),
        },
        degenerate_curve=bool(est.degenerate_curve_),
        ami=scores,
        density_curve=_sample_curve(est.density_curve_),
        timings={k: round(v, 6) for k, v in est.timings_.items()},
    )
    return labels, report


def estimator_from_args(args) -> AdaWave:
    return AdaWave(
        scale=args.scale,
        basis=args.basis,
        levels=args.levels,
        threshold_mode=args.threshold_mode,
        threshold_override=args.threshold_override,
        adjacency=args.adjacency,
        bounds=getattr(args, "bounds", None),
    )


# ---------------------------------------------------------------- commands


def cmd_generate(args) -> int:
    cfg = SynthConfig(n_per_cluster=args.n_per_cluster, noise_pct=args.gamma, seed=args.seed)
    ds = generate(cfg)
    write_points_csv(args.output, ds.points, ["x1", "x2"], LABEL_COLUMN, ds.ground_truth)
    log.info("wrote %d points (%d noise) to %s", ds.n, cfg.n_noise, args.output)
    return EXIT_OK


def cmd_cluster(args) -> int:
    dataset, header = read_csv(args.input)
    labels, report = run_cluster(dataset, estimator_from_args(args), args.reassign_noise)
    write_points_csv(args.output, dataset.points, header, CLUSTER_COLUMN, labels)
    report_path = args.report or str(Path(args.output).with_suffix(".report.json"))
    Path(report_path).write_text(report.to_json(), encoding="utf-8")
    if report.n_clusters == 0:
        log.warning("no clusters found; every point is labeled noise")
    print(
        f"clusters={report.n_clusters} noise={report.n_noise} "
        f"threshold={report.parameters['threshold']:.6g}"
        + (f" ami={report.ami['non-noise-truth']}" if report.ami else "")
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pred = read_column(args.labels, CLUSTER_COLUMN)
    truth = read_column(args.truth, LABEL_COLUMN)
    if len(pred) != len(truth):
        raise CLIError(f"row counts differ: {len(pred)} labels vs {len(truth)} truth rows")
    if len(pred) == 0:
        raise CLIError("no rows to evaluate")
    result = {
        "n_points": int(len(pred)),
        "n_clusters": int(len(np.unique(pred[pred != NOISE]))),
        "n_noise": int(np.count_nonzero(pred == NOISE)),
        "n_truth_classes": int(len(np.unique(truth[truth != NOISE]))),
        "ami_all": ami(pred, truth),
    }
    try:
        result["ami_non_noise_truth"] = ami(pred, truth, scope="non-noise-truth")
    except EmptyScope:
        result["ami_non_noise_truth"] = None
    if args.json:
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        for key, value in result.items():
            print(f"{key}: {value}")
    return EXIT_OK


def sweep(gammas, reps, seed, n_per_cluster, make_estimator) -> List[dict]:
    """Mean non-noise AMI per noise percentage over ``reps`` seeds."""
    rows = []
    for gamma in gammas:
        scores = []
        for r in range(reps):
            ds = generate(SynthConfig(n_per_cluster, gamma, seed + r))
            labels, _ = run_cluster(ds, make_estimator())
            scores.append(ami(labels, ds.ground_truth, scope="non-noise-truth"))
        rows.append(
            {
                "gamma": gamma,
                "reps": reps,
                "ami_mean": float(np.mean(scores)),
                "ami_std": float(np.std(scores)),
            }
        )
    return rows


def cmd_sweep(args) -> int:
    rows = sweep(
        args.gammas, args.reps, args.seed, args.n_per_cluster, lambda: estimator_from_args(args)
    )
    lines = ["gamma,reps,ami_mean,ami_std"] + [
        f"{r['gamma']:g},{r['reps']},{r['ami_mean']:.6f},{r['ami_std']:.6f}" for r in rows
    ]
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _float_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return values


def _gamma_list(text: str) -> List[float]:
    values = _float_list(text)
    if not values:
        raise argparse.ArgumentTypeError("need at least one noise percentage")
    if any(not 0 <= v < 100 for v in values):
        raise argparse.ArgumentTypeError("noise percentages must lie in [0, 100)")
    return values


def _bounds(text: str) -> List[float]:
    values = _float_list(text)
    if not values or len(values) % 2 or any(not math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("bounds are lo1,hi1,lo2,hi2,...")
    if any(lo > hi for lo, hi in zip(values[0::2], values[1::2])):
        raise argparse.ArgumentTypeError("each lo must not exceed its hi")
    return values


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def _non_negative_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be a non-negative number")
    return value


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scale", type=_positive_int, default=128, help="intervals per dimension")
    p.add_argument("--basis", choices=BASES, default="cdf22")
    p.add_argument("--levels", type=_non_negative_int, default=1)
    p.add_argument("--adjacency", choices=("faces", "full"), default="faces")
    p.add_argument("--threshold-mode", choices=MODES, default="robust")
    p.add_argument(
        "--threshold-override",
        type=_non_negative_float,
        default=None,
        metavar="TAU",
        help="fixed density threshold; skips elbow detection",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adawave", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the synthetic benchmark as CSV")
    p.add_argument("--gamma", type=float, default=50.0, help="noise percentage of the total")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-cluster", type=_positive_int, default=5600)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="cluster a CSV of points")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="labels CSV")
    p.add_argument("--report", help="run report JSON (default: <output>.report.json)")
    p.add_argument("--bounds", type=_bounds, default=None, metavar="LO1,HI1,...")
    p.add_argument("--reassign-noise", action="store_true", help="move noise to nearest cluster")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="AMI of a labels CSV against ground truth")
    p.add_argument("labels")
    p.add_argument("truth")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="mean AMI over a range of noise percentages")
    p.add_argument("--gammas", type=_gamma_list, required=True, metavar="G1,G2,...")
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-cluster", type=_positive_int, default=5600)
    p.add_argument("-o", "--output")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    if args.command == "generate" and not 0 <= args.gamma < 100:
        parser.error("--gamma must lie in [0, 100)")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"adawave: error: {exc}", file=sys.stderr)
        return exc.code
    except CapacityError as exc:
        print(f"adawave: error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InvalidDatasetError, PointOutOfBounds, OSError) as exc:
        print(f"adawave: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AdaWaveError, ValueError) as exc:
        print(f"adawave: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
