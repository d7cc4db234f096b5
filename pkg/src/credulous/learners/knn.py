"""k-nearest-neighbour classifier on internally standardized features.

Neighbours are ranked by Euclidean distance; exact distance ties are broken
by the lower account_id so predictions never depend on training order. The
score is the POSITIVE fraction among the k neighbours, which makes vote
ties resolve to NEGATIVE through the strict 0.5 decision threshold.
"""
from __future__ import annotations

import numpy as np

from ..errors import FitError
from ..types import Dataset
from .base import Algorithm, LearnerSpec, TrainedModel


class KnnModel(TrainedModel):
    algorithm = Algorithm.KNN

    def __init__(
        self,
        spec: LearnerSpec,
        schema_id: str,
        feature_names: tuple[str, ...],
        k: int,
        means: np.ndarray,
        stds: np.ndarray,
        points: np.ndarray,  # standardized training matrix
        labels: np.ndarray,
        account_ids: tuple[str, ...],
    ):
        super().__init__(spec, schema_id, feature_names)
        self.k = k
        self.means = means
        self.stds = stds
        self.points = points
        self.labels = labels
        self.account_ids = account_ids
        # rank of each training point's account_id, for distance tie-breaks
        self._id_rank = np.argsort(np.argsort(np.asarray(account_ids)))

    def _standardize(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros_like(X, dtype=np.float64)
        np.divide(X - self.means, self.stds, out=out, where=self.stds > 0)
        return out

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        Q = self._standardize(np.asarray(X, dtype=np.float64))
        # squared distances; exact equality of duplicates is preserved
        d2 = (
            (Q**2).sum(axis=1)[:, None]
            + (self.points**2).sum(axis=1)[None, :]
            - 2.0 * Q @ self.points.T
        )
        scores = np.empty(len(Q))
        for i in range(len(Q)):
            order = np.lexsort((self._id_rank, d2[i]))
            scores[i] = self.labels[order[: self.k]].mean()
        return scores

    def payload(self) -> dict:
        return {
            "k": self.k,
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "points": self.points.tolist(),
            "labels": self.labels.tolist(),
            "account_ids": list(self.account_ids),
        }

    @classmethod
    def from_payload(cls, spec, schema_id, feature_names, payload) -> "KnnModel":
        return cls(
            spec,
            schema_id,
            feature_names,
            k=int(payload["k"]),
            means=np.asarray(payload["means"], dtype=np.float64),
            stds=np.asarray(payload["stds"], dtype=np.float64),
            points=np.asarray(payload["points"], dtype=np.float64),
            labels=np.asarray(payload["labels"], dtype=np.int64),
            account_ids=tuple(payload["account_ids"]),
        )


def fit_knn(d: Dataset, k: int = 1, spec: LearnerSpec | None = None) -> KnnModel:
    if spec is None:
        spec = LearnerSpec(Algorithm.KNN, {"k": k})
    if k < 1:
        raise FitError("k_out_of_range", "k must be >= 1")
    if k > len(d):
        raise FitError("k_exceeds_dataset", f"k={k} but dataset has {len(d)} instances")
    X = d.matrix()
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    model = KnnModel(
        spec,
        d.schema.schema_id,
        d.schema.feature_names,
        k=k,
        means=means,
        stds=stds,
        points=np.zeros_like(X),
        labels=d.labels01(),
        account_ids=d.account_ids(),
    )
    model.points = model._standardize(X)
    return model
