"""Per-document feature vectors from window statistics.

Each grid point (pair count, cv jump) contributes seven numbers: the
mean, cv, and mean-times-cv of the window spans, then the cross-window
average and standard deviation of both the per-window mean and the
per-window standard deviation of the same-class time differences.  A
document with no windows at a grid point gets seven zeros there.  The
standard 25-point grid therefore yields 175 features per document.

All standard deviations are population standard deviations.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from statistics import fmean, pstdev

import numpy as np

from .errors import DomainError, ParseError
from .timeline import SignalSequence
from .windowing import Window, WindowingParams, cv, detect_windows, standard_grid

MEASURE_NAMES = ("span_mean", "span_cv", "span_mean_cv",
                 "diff_mean_avg", "diff_mean_sd",
                 "diff_std_avg", "diff_std_sd")


@dataclass(frozen=True)
class WindowMeasures:
    """Span plus location/dispersion of one window's time differences."""

    span: int
    diff_mean: float
    diff_std: float


def window_measures(window: Window) -> WindowMeasures:
    diffs = window.time_diffs
    return WindowMeasures(span=window.span, diff_mean=fmean(diffs),
                          diff_std=pstdev(diffs) if len(diffs) > 1 else 0.0)


@dataclass
class FeatureVector:
    doc_id: str
    label: str
    values: list


def grid_point_features(signals: SignalSequence,
                        params: WindowingParams) -> list:
    """The seven aggregate values at one grid point."""
    measures = [window_measures(w) for w in detect_windows(signals, params)]
    if not measures:
        return [0.0] * 7
    spans = [m.span for m in measures]
    diff_means = [m.diff_mean for m in measures]
    diff_stds = [m.diff_std for m in measures]
    span_mean = fmean(spans)
    span_cv = cv(spans)
    return [span_mean, span_cv, span_mean * span_cv,
            fmean(diff_means), pstdev(diff_means) if len(measures) > 1 else 0.0,
            fmean(diff_stds), pstdev(diff_stds) if len(measures) > 1 else 0.0]


def document_features(signals: SignalSequence, grid=None,
                      doc_id: str = "", label: str = "") -> FeatureVector:
    if grid is None:
        grid = standard_grid()
    values = []
    for params in grid:
        values.extend(grid_point_features(signals, params))
    return FeatureVector(doc_id=doc_id, label=label, values=values)


def feature_names(grid=None) -> list:
    if grid is None:
        grid = standard_grid()
    return [f"f_{p.initial_pairs}_{p.cv_jump:.2f}_{name}"
            for p in grid for name in MEASURE_NAMES]


@dataclass
class StandardizationModel:
    """Per-column location/scale learned from a training matrix."""

    mean: np.ndarray
    std: np.ndarray


def fit_standardizer(train_matrix) -> StandardizationModel:
    matrix = np.asarray(train_matrix, dtype=float)
    if matrix.size == 0:
        raise DomainError("cannot standardize an empty matrix")
    return StandardizationModel(mean=matrix.mean(axis=0),
                                std=matrix.std(axis=0))


def apply_standardizer(model: StandardizationModel, matrix) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    safe = np.where(model.std == 0.0, 1.0, model.std)
    z = (matrix - model.mean) / safe
    return np.where(model.std == 0.0, 0.0, z)


def write_features(path, vectors, grid=None) -> None:
    """Feature matrix as CSV; floats use the shortest exact rendering."""
    names = feature_names(grid)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "label", *names])
        for vec in vectors:
            if len(vec.values) != len(names):
                raise DomainError(
                    f"vector for {vec.doc_id!r} has {len(vec.values)} values, "
                    f"grid expects {len(names)}")
            writer.writerow([vec.doc_id, vec.label,
                             *(repr(float(v)) for v in vec.values)])


def read_features(path):
    """Returns (doc_ids, labels, matrix, feature_names)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty feature file")
    header = rows[0]
    if header[:2] != ["doc_id", "label"]:
        raise ParseError("feature file must start with doc_id,label columns")
    names = header[2:]
    ids, labels, data = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError("wrong column count", line_number=lineno)
        ids.append(row[0])
        labels.append(row[1])
        try:
            data.append([float(x) for x in row[2:]])
        except ValueError as exc:
            raise ParseError(str(exc), line_number=lineno) from exc
    matrix = np.array(data, dtype=float) if data else np.empty((0, len(names)))
    return ids, labels, matrix, names
