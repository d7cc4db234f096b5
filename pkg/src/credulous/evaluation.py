"""Stratified k-fold cross-validation, the five metrics, and grid tuning.

Metric conventions, fixed for degenerate folds: precision and recall are
1.0 when their denominator is empty, F1 is 0 when precision + recall is 0.
POSITIVE is always the scoring class. AUC is the rank statistic (pairs won
plus half the ties over all positive/negative pairs). Across folds, sigma
is the population standard deviation: the folds are the whole population
of runs, not a sample.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import EvalError
from .learners import Algorithm, LearnerSpec, fit
from .types import ClassLabel, Dataset

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "auc")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[ClassLabel, ClassLabel]]) -> "ConfusionMatrix":
        """Build from (predicted, actual) label pairs."""
        tp = fp = fn = tn = 0
        for predicted, actual in pairs:
            if predicted is ClassLabel.POSITIVE:
                if actual is ClassLabel.POSITIVE:
                    tp += 1
                else:
                    fp += 1
            else:
                if actual is ClassLabel.POSITIVE:
                    fn += 1
                else:
                    tn += 1
        return ConfusionMatrix(tp, fp, fn, tn)


def metrics_from_confusion(m: ConfusionMatrix) -> tuple[float, float, float, float]:
    """Return (accuracy_percent, precision, recall, f1)."""
    if m.total == 0:
        raise EvalError("empty_confusion", "confusion matrix has no observations")
    accuracy = 100.0 * (m.tp + m.tn) / m.total
    precision = m.tp / (m.tp + m.fp) if (m.tp + m.fp) > 0 else 1.0
    recall = m.tp / (m.tp + m.fn) if (m.tp + m.fn) > 0 else 1.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if (precision + recall) > 0
        else 0.0
    )
    return accuracy, precision, recall, f1


def auc_roc(scored: Sequence[tuple[float, ClassLabel]]) -> float:
    """Area under the ROC curve via the Mann-Whitney rank statistic.

    Equals (wins + 0.5 * ties) / (n_pos * n_neg) over all (positive,
    negative) score pairs, and is invariant under strictly monotone
    transforms of the scores.
    """
    scores = np.asarray([s for s, _ in scored], dtype=np.float64)
    is_pos = np.asarray([label is ClassLabel.POSITIVE for _, label in scored])
    n_pos = int(is_pos.sum())
    n_neg = len(scored) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise EvalError("single_class_scores", "AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    # average ranks over tie groups (1-based midranks)
    boundaries = np.flatnonzero(np.diff(sorted_scores)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(scores)]))
    for start, end in zip(starts, ends):
        ranks[order[start:end]] = 0.5 * (start + 1 + end)
    rank_sum_pos = float(ranks[is_pos].sum())
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class FoldAssignment:
    """Fold index per instance, aligned with dataset order."""

    k: int
    fold_index: tuple[int, ...]

    def folds(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(train_indices, test_indices) for each fold."""
        assignment = np.asarray(self.fold_index)
        out = []
        for j in range(self.k):
            test = np.flatnonzero(assignment == j)
            train = np.flatnonzero(assignment != j)
            out.append((train, test))
        return out


def stratified_folds(d: Dataset, k: int = 10, seed: int = 0) -> FoldAssignment:
    """Seeded shuffle within each class, then round-robin fold assignment,
    so per-class fold counts never differ by more than one."""
    if k < 2:
        raise EvalError("k_out_of_range", "cross-validation needs k >= 2")
    y = d.labels01()
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(y), dtype=np.int64)
    for cls in (1, 0):
        members = np.flatnonzero(y == cls)
        if len(members) < k:
            raise EvalError(
                "insufficient_class_for_k",
                f"class has {len(members)} instances but k={k}",
            )
        members = members[rng.permutation(len(members))]
        assignment[members] = np.arange(len(members)) % k
    return FoldAssignment(k, tuple(int(i) for i in assignment))


@dataclass(frozen=True)
class EvalReport:
    """Per-fold metric values plus their mean and population stddev."""

    per_fold: tuple[dict[str, float], ...]
    mean: dict[str, float]
    stddev: dict[str, float]
    k: int

    def to_obj(self) -> dict:
        return {
            "k": self.k,
            "per_fold": [dict(f) for f in self.per_fold],
            "mean": dict(self.mean),
            "stddev": dict(self.stddev),
        }

    @staticmethod
    def from_obj(obj: dict) -> "EvalReport":
        return EvalReport(
            per_fold=tuple(dict(f) for f in obj["per_fold"]),
            mean=dict(obj["mean"]),
            stddev=dict(obj["stddev"]),
            k=int(obj["k"]),
        )


def summarize_folds(per_fold: Sequence[Mapping[str, float]], k: int) -> EvalReport:
    mean = {}
    stddev = {}
    for name in METRIC_NAMES:
        values = np.asarray([f[name] for f in per_fold], dtype=np.float64)
        mean[name] = float(values.mean())
        stddev[name] = float(values.std())  # population formula
    return EvalReport(tuple(dict(f) for f in per_fold), mean, stddev, k)


def _evaluate_fold(
    spec: LearnerSpec, d: Dataset, train_idx: np.ndarray, test_idx: np.ndarray
) -> dict[str, float]:
    model = fit(spec, d.subset(train_idx))
    X_test = d.subset(test_idx).matrix()
    scores = model.score_matrix(X_test)
    predicted_pos = scores > 0.5
    actual_pos = d.labels01()[test_idx] == 1
    m = ConfusionMatrix(
        tp=int((predicted_pos & actual_pos).sum()),
        fp=int((predicted_pos & ~actual_pos).sum()),
        fn=int((~predicted_pos & actual_pos).sum()),
        tn=int((~predicted_pos & ~actual_pos).sum()),
    )
    accuracy, precision, recall, f1 = metrics_from_confusion(m)
    labels = [
        ClassLabel.POSITIVE if flag else ClassLabel.NEGATIVE for flag in actual_pos
    ]
    auc = auc_roc(list(zip(scores.tolist(), labels)))
    return {
        "accuracy": accuracy,
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "auc": auc,
    }


def cross_validate(
    spec: LearnerSpec,
    d: Dataset,
    k: int = 10,
    seed: int = 0,
    n_workers: int = 1,
) -> EvalReport:
    """Stratified k-fold cross-validation of one learner spec.

    Folds may be evaluated in parallel; the report is assembled in fold
    order either way, so the result is independent of scheduling.
    """
    assignment = stratified_folds(d, k, seed)
    folds = assignment.folds()
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            per_fold = list(
                pool.map(
                    _evaluate_fold,
                    itertools.repeat(spec),
                    itertools.repeat(d),
                    [tr for tr, _ in folds],
                    [te for _, te in folds],
                )
            )
    else:
        per_fold = [_evaluate_fold(spec, d, tr, te) for tr, te in folds]
    return summarize_folds(per_fold, k)


def grid_search(
    algorithm: Algorithm,
    grid: Mapping[str, Sequence[Any]],
    d: Dataset,
    k: int = 10,
    seed: int = 0,
    n_workers: int = 1,
) -> tuple[dict[str, Any], EvalReport]:
    """Evaluate every grid point with cross_validate and keep the highest
    mean accuracy. Enumeration order is lexicographic over parameter names
    with each value list in its given order; ties keep the earliest point.
    """
    if not grid:
        raise EvalError("empty_grid", "grid search needs at least one parameter")
    names = sorted(grid)
    best: Optional[tuple[dict[str, Any], EvalReport]] = None
    for values in itertools.product(*(grid[name] for name in names)):
        params = dict(zip(names, values))
        report = cross_validate(LearnerSpec(algorithm, params, seed=seed), d, k, seed, n_workers)
        if best is None or report.mean["accuracy"] > best[1].mean["accuracy"]:
            best = (params, report)
    return best
