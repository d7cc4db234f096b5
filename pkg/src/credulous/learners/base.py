"""Learner plumbing: algorithm specs and the trained-model contract.

Every trained model exposes ``predict`` (a ClassLabel) and ``score`` (a
real, higher meaning more POSITIVE). The two are tied together by a fixed
rule: predict is POSITIVE exactly when score > 0.5. All five algorithms
produce scores in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

import numpy as np

from ..errors import ConfigError, FitError, SchemaMismatchError
from ..types import ClassLabel, FeatureVector

DECISION_THRESHOLD = 0.5


def require_two_classes(y: np.ndarray) -> None:
    """Raise the shared degenerate-labels fit error unless y holds both classes."""
    if y.size == 0 or y.min() == y.max():
        raise FitError("degenerate_labels", "need at least one instance of each class")


class Algorithm(Enum):
    ONE_R = "one_r"
    NAIVE_BAYES = "naive_bayes"
    KNN = "knn"
    REP_TREE = "rep_tree"
    RANDOM_FOREST = "random_forest"


# Allowed hyperparameter names and their defaults, per algorithm.
HYPERPARAMETER_DEFAULTS: dict[Algorithm, dict[str, Any]] = {
    Algorithm.ONE_R: {"min_bucket": 6},
    Algorithm.NAIVE_BAYES: {"variance_floor": 1e-9},
    Algorithm.KNN: {"k": 1},
    Algorithm.REP_TREE: {"grow_fraction": 0.75, "max_depth": 30, "min_leaf": 2},
    Algorithm.RANDOM_FOREST: {
        "n_trees": 100,
        "features_per_split": None,  # None means ceil(sqrt(n_features))
        "min_leaf": 1,
    },
}


@dataclass(frozen=True)
class LearnerSpec:
    """An algorithm, its hyperparameters, and the seed that fixes every
    random choice it makes. Unknown hyperparameter names are rejected."""

    algorithm: Algorithm
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        allowed = HYPERPARAMETER_DEFAULTS[self.algorithm]
        for name in self.hyperparameters:
            if name not in allowed:
                raise ConfigError(
                    "unknown_hyperparameter",
                    f"{name!r} is not a hyperparameter of {self.algorithm.value}",
                )
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise ConfigError("invalid_seed", "seed must be a 64-bit unsigned integer")

    def resolved(self) -> dict[str, Any]:
        """Hyperparameters with defaults filled in."""
        out = dict(HYPERPARAMETER_DEFAULTS[self.algorithm])
        out.update(self.hyperparameters)
        return out


class TrainedModel:
    """Base class for fitted models. Subclasses implement ``score_matrix``
    and a serializable ``payload``."""

    algorithm: Algorithm

    def __init__(self, spec: LearnerSpec, schema_id: str, feature_names: tuple[str, ...]):
        self.spec = spec
        self.schema_id = schema_id
        self.feature_names = feature_names

    def _check_schema(self, v: FeatureVector) -> None:
        if v.schema_id != self.schema_id:
            raise SchemaMismatchError(
                "schema_mismatch",
                f"model expects schema {self.schema_id!r}, got {v.schema_id!r}",
            )

    def score(self, v: FeatureVector) -> float:
        """Positive-class score in [0, 1]; higher means more POSITIVE."""
        self._check_schema(v)
        return float(self.score_matrix(np.asarray([v.values], dtype=np.float64))[0])

    def predict(self, v: FeatureVector) -> ClassLabel:
        return (
            ClassLabel.POSITIVE
            if self.score(v) > DECISION_THRESHOLD
            else ClassLabel.NEGATIVE
        )

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        """Scores for a (n, d) feature matrix in schema order."""
        raise NotImplementedError

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        """Boolean POSITIVE predictions for a feature matrix."""
        return self.score_matrix(X) > DECISION_THRESHOLD

    def payload(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_payload(
        cls,
        spec: LearnerSpec,
        schema_id: str,
        feature_names: tuple[str, ...],
        payload: dict,
    ) -> "TrainedModel":
        raise NotImplementedError
