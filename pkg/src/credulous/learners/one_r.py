"""One-rule classifier: a single feature, discretized into class buckets.

For every feature the training instances are sorted by value and grown into
buckets left to right; a bucket closes as soon as it holds at least
``min_bucket`` instances of its majority class (and never in the middle of a
run of equal values). A trailing bucket that never reaches the quota is kept
as-is. Adjacent buckets with the same majority class are merged, each bucket
predicts its majority class (ties to NEGATIVE), and the feature with the
lowest training error wins, ties broken by schema order.
"""
from __future__ import annotations

import numpy as np

from ..types import Dataset
from .base import Algorithm, LearnerSpec, TrainedModel, require_two_classes


def _discretize(values: np.ndarray, y: np.ndarray, min_bucket: int):
    """Bucket one feature column; return (thresholds, classes, error_count).

    ``thresholds`` are the midpoints between adjacent buckets; ``classes``
    holds one POSITIVE flag per bucket (len(thresholds) + 1 entries).
    """
    order = np.argsort(values, kind="stable")
    xs = values[order]
    ys = y[order]
    # collapse runs of equal values into (first=last value, n_pos, n_total) groups
    boundaries = np.flatnonzero(np.diff(xs)) + 1
    starts = np.concatenate(([0], boundaries))
    group_pos = np.add.reduceat(ys, starts)
    group_n = np.diff(np.concatenate((starts, [len(xs)])))
    group_val = xs[starts]

    # grow buckets: (first_value, last_value, n_pos, n_neg)
    buckets: list[list] = []
    cur_pos = cur_neg = 0
    cur_first = None
    for val, npos, ntot in zip(group_val, group_pos, group_n):
        if cur_first is None:
            cur_first = val
        cur_pos += int(npos)
        cur_neg += int(ntot - npos)
        if max(cur_pos, cur_neg) >= min_bucket:
            buckets.append([cur_first, val, cur_pos, cur_neg])
            cur_pos = cur_neg = 0
            cur_first = None
    if cur_first is not None:
        buckets.append([cur_first, group_val[-1], cur_pos, cur_neg])

    # merge adjacent buckets with equal majority class (majority ties -> NEGATIVE)
    merged: list[list] = []
    for b in buckets:
        if merged and (merged[-1][2] > merged[-1][3]) == (b[2] > b[3]):
            merged[-1][1] = b[1]
            merged[-1][2] += b[2]
            merged[-1][3] += b[3]
        else:
            merged.append(b)

    thresholds = tuple(
        0.5 * (merged[i][1] + merged[i + 1][0]) for i in range(len(merged) - 1)
    )
    classes = tuple(b[2] > b[3] for b in merged)
    error_count = sum(min(b[2], b[3]) for b in merged)
    return thresholds, classes, error_count


class OneRModel(TrainedModel):
    algorithm = Algorithm.ONE_R

    def __init__(
        self,
        spec: LearnerSpec,
        schema_id: str,
        feature_names: tuple[str, ...],
        feature_index: int,
        thresholds: tuple[float, ...],
        classes: tuple[bool, ...],
        training_error_count: int,
        n_train: int,
    ):
        super().__init__(spec, schema_id, feature_names)
        self.feature_index = feature_index
        self.feature_name = feature_names[feature_index]
        self.thresholds = thresholds
        self.classes = classes
        self.training_error_count = training_error_count
        self.n_train = n_train

    @property
    def training_error(self) -> float:
        return self.training_error_count / self.n_train

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.feature_index]
        # values equal to a threshold fall in the left bucket
        segments = np.searchsorted(np.asarray(self.thresholds), col, side="left")
        positive = np.asarray(self.classes, dtype=bool)[segments]
        return positive.astype(np.float64)

    def payload(self) -> dict:
        return {
            "feature_index": self.feature_index,
            "thresholds": list(self.thresholds),
            "classes": [bool(c) for c in self.classes],
            "training_error_count": self.training_error_count,
            "n_train": self.n_train,
        }

    @classmethod
    def from_payload(cls, spec, schema_id, feature_names, payload) -> "OneRModel":
        return cls(
            spec,
            schema_id,
            feature_names,
            feature_index=int(payload["feature_index"]),
            thresholds=tuple(float(t) for t in payload["thresholds"]),
            classes=tuple(bool(c) for c in payload["classes"]),
            training_error_count=int(payload["training_error_count"]),
            n_train=int(payload["n_train"]),
        )


def fit_one_r(d: Dataset, min_bucket: int = 6, spec: LearnerSpec | None = None) -> OneRModel:
    if spec is None:
        spec = LearnerSpec(Algorithm.ONE_R, {"min_bucket": min_bucket})
    X = d.matrix()
    y = d.labels01()
    require_two_classes(y)
    best = None
    for j in range(X.shape[1]):
        thresholds, classes, errors = _discretize(X[:, j], y, min_bucket)
        if best is None or errors < best[1]:
            best = (j, errors, thresholds, classes)
    j, errors, thresholds, classes = best
    return OneRModel(
        spec,
        d.schema.schema_id,
        d.schema.feature_names,
        feature_index=j,
        thresholds=thresholds,
        classes=classes,
        training_error_count=errors,
        n_train=len(d),
    )
