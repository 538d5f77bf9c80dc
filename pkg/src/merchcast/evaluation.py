"""Stratified splitting, K-fold cross-validation, the accuracy metric, reports.

The accuracy criterion counts a prediction correct when it lands within 1% of
the expert score. Scores are integers in [0, 25], so after rounding a
prediction to the same scale the band collapses to exact agreement (1% of 25
is still below the integer spacing), and a zero score demands a zero
prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ._util import clamp_score, round_half_up
from .encoding import FeatureMatrix
from .errors import (
    EmptyDatasetError,
    LengthMismatchError,
    TooFewRecordsError,
    UnlabeledRecordError,
)
from .records import MovieRecord


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.test_fraction < 1.0):
            raise ValueError("test_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class FoldAssignment:
    K: int
    fold_of: Mapping[int, int]  # record id -> fold index
    seed: int

    def ids_in_fold(self, k: int) -> tuple[int, ...]:
        return tuple(sorted(i for i, f in self.fold_of.items() if f == k))


@dataclass(frozen=True)
class AccuracyReport:
    n_test: int
    model_names: tuple[str, ...]
    accuracies: Mapping[str, float]
    rows: tuple[dict, ...]  # {"film", "score", "predictions": {name: int}}

    def render(self) -> str:
        headers = ["movie", "Experts' score", *self.model_names]
        table = [headers]
        for row in self.rows:
            table.append([
                str(row["film"]), str(row["score"]),
                *(str(row["predictions"][m]) for m in self.model_names),
            ])
        table.append(["Accuracy", "",
                      *(f"{self.accuracies[m] * 100:.2f}%" for m in self.model_names)])
        widths = [max(len(r[c]) for r in table) for c in range(len(headers))]
        lines = ["  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip()
                 for row in table]
        return "\n".join(lines)

    def to_doc(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "accuracy_report",
            "n_test": self.n_test,
            "accuracies": {m: self.accuracies[m] for m in self.model_names},
            "rows": list(self.rows),
        }


def stratified_split(records: Sequence[MovieRecord],
                     spec: SplitSpec) -> tuple[list[MovieRecord], list[MovieRecord]]:
    """Sample the test fraction independently within every label value.

    Per stratum the test allocation is the nearest integer to
    fraction * stratum size, raised to 1 for strata of five or more records
    when the fraction is positive. Deterministic under the given seed.
    """
    for rec in records:
        if rec.label is None:
            raise UnlabeledRecordError(f"record {rec.id} has no label")
    if not records:
        raise EmptyDatasetError("cannot split zero records")

    by_label: dict[int, list[MovieRecord]] = {}
    for rec in records:
        by_label.setdefault(rec.label, []).append(rec)

    rng = np.random.default_rng(spec.seed)
    test_ids: set[int] = set()
    for label in sorted(by_label):
        stratum = sorted(by_label[label], key=lambda r: r.id)
        n_s = len(stratum)
        k = round_half_up(spec.test_fraction * n_s)
        if spec.test_fraction > 0 and n_s >= 5:
            k = max(k, 1)
        k = min(k, n_s)
        order = rng.permutation(n_s)
        test_ids.update(stratum[i].id for i in order[:k])

    train = [r for r in records if r.id not in test_ids]
    test = [r for r in records if r.id in test_ids]
    return train, test


def kfold(train: Sequence[MovieRecord | int], K: int = 5, seed: int = 0) -> FoldAssignment:
    """Shuffle-and-deal fold assignment; fold sizes differ by at most one."""
    if K < 2:
        raise ValueError("K must be >= 2")
    ids = [r.id if isinstance(r, MovieRecord) else int(r) for r in train]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate ids in training set")
    if len(ids) < K:
        raise TooFewRecordsError(f"{len(ids)} records cannot fill {K} folds")
    rng = np.random.default_rng(seed)
    ordered_ids = sorted(ids)
    order = rng.permutation(len(ids))
    shuffled = [ordered_ids[i] for i in order]
    base, extra = divmod(len(ids), K)
    fold_of: dict[int, int] = {}
    cursor = 0
    for k in range(K):
        size = base + (1 if k < extra else 0)
        for rid in shuffled[cursor:cursor + size]:
            fold_of[rid] = k
        cursor += size
    return FoldAssignment(K=K, fold_of=fold_of, seed=seed)


def round_prediction(raw: float) -> int:
    """Nearest integer, halves up, clamped to the 0..25 score scale."""
    return clamp_score(round_half_up(float(raw)))


def accuracy(preds: Sequence[int], scores: Sequence[int]) -> float:
    """Fraction of predictions within 1% of the expert score."""
    p = np.asarray(preds, dtype=float).ravel()
    s = np.asarray(scores, dtype=float).ravel()
    if p.shape != s.shape:
        raise LengthMismatchError(f"{p.shape[0]} predictions vs {s.shape[0]} scores")
    if p.size == 0:
        raise EmptyDatasetError("accuracy over zero samples is undefined")
    return float(np.mean(np.abs(p - s) <= 0.01 * s))


@dataclass(frozen=True)
class CrossValResult:
    mean_accuracy: float
    fold_accuracies: tuple[float, ...]
    model: object
    oof_predictions: np.ndarray  # raw, aligned with the data's row order
    fold_of_rows: tuple[int, ...] = field(default_factory=tuple)


def cross_validate(fit: Callable[[np.ndarray, np.ndarray], object],
                   data: FeatureMatrix, folds: FoldAssignment) -> CrossValResult:
    """K held-out evaluations plus a final model fitted on everything.

    fit(X, y) must return a model with predict(X). The returned out-of-fold
    predictions are raw (unrounded), one per training row.
    """
    if data.targets is None:
        raise UnlabeledRecordError("cross-validation needs targets")
    fold_idx = np.array([folds.fold_of[rid] for rid in data.row_ids], dtype=int)
    X = data.rows
    y = np.asarray(data.targets, dtype=float)
    oof = np.empty(len(y))
    fold_scores = []
    for k in range(folds.K):
        va = np.where(fold_idx == k)[0]
        tr = np.where(fold_idx != k)[0]
        model = fit(X[tr], y[tr])
        raw = np.asarray(model.predict(X[va]), dtype=float)
        oof[va] = raw
        rounded = np.array([round_prediction(v) for v in raw])
        fold_scores.append(accuracy(rounded, y[va].astype(int)))
    final = fit(X, y)
    return CrossValResult(
        mean_accuracy=float(np.mean(fold_scores)),
        fold_accuracies=tuple(fold_scores),
        model=final,
        oof_predictions=oof,
        fold_of_rows=tuple(int(f) for f in fold_idx),
    )


def comparison_report(models: Mapping[str, object], test: FeatureMatrix,
                      films: Sequence[str] | None = None) -> AccuracyReport:
    """Per-movie predictions next to the expert score, plus the accuracy row."""
    if test.n == 0:
        raise EmptyDatasetError("comparison over an empty test set")
    if test.targets is None:
        raise UnlabeledRecordError("test set has no expert scores to compare against")
    names = tuple(models)
    scores = np.asarray(test.targets, dtype=int)
    predicted: dict[str, list[int]] = {}
    for name, model in models.items():
        raw = np.asarray(model.predict(test), dtype=float)
        predicted[name] = [round_prediction(v) for v in raw]
    if films is None:
        films = [f"record {rid}" for rid in test.row_ids]
    rows = tuple(
        {
            "film": films[i],
            "score": int(scores[i]),
            "predictions": {name: predicted[name][i] for name in names},
        }
        for i in range(test.n)
    )
    accuracies = {
        name: accuracy(np.array(predicted[name]), scores) for name in names
    }
    return AccuracyReport(
        n_test=test.n, model_names=names, accuracies=accuracies, rows=rows,
    )
