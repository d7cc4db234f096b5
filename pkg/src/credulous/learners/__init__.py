"""Five supervised learners behind one contract: ``fit(spec, dataset)``
returns a TrainedModel whose ``predict`` is POSITIVE iff ``score`` > 0.5.
"""
from __future__ import annotations

import json
from pathlib import Path

from ..errors import ConfigError, SchemaMismatchError
from ..types import Dataset
from .base import (
    DECISION_THRESHOLD,
    HYPERPARAMETER_DEFAULTS,
    Algorithm,
    LearnerSpec,
    TrainedModel,
)
from .forest import RandomForestModel, fit_random_forest
from .knn import KnnModel, fit_knn
from .naive_bayes import NaiveBayesModel, fit_naive_bayes
from .one_r import OneRModel, fit_one_r
from .tree import RepTreeModel, fit_rep_tree

__all__ = [
    "Algorithm",
    "LearnerSpec",
    "TrainedModel",
    "DECISION_THRESHOLD",
    "HYPERPARAMETER_DEFAULTS",
    "fit",
    "fit_one_r",
    "fit_naive_bayes",
    "fit_knn",
    "fit_rep_tree",
    "fit_random_forest",
    "save_model",
    "load_model",
    "model_to_obj",
    "OneRModel",
    "NaiveBayesModel",
    "KnnModel",
    "RepTreeModel",
    "RandomForestModel",
]

_MODEL_CLASSES: dict[Algorithm, type[TrainedModel]] = {
    Algorithm.ONE_R: OneRModel,
    Algorithm.NAIVE_BAYES: NaiveBayesModel,
    Algorithm.KNN: KnnModel,
    Algorithm.REP_TREE: RepTreeModel,
    Algorithm.RANDOM_FOREST: RandomForestModel,
}

MODEL_FORMAT_VERSION = 1


def fit(spec: LearnerSpec, d: Dataset) -> TrainedModel:
    """Fit the algorithm named by ``spec`` with its resolved hyperparameters."""
    hp = spec.resolved()
    if spec.algorithm is Algorithm.ONE_R:
        return fit_one_r(d, min_bucket=hp["min_bucket"], spec=spec)
    if spec.algorithm is Algorithm.NAIVE_BAYES:
        return fit_naive_bayes(d, variance_floor=hp["variance_floor"], spec=spec)
    if spec.algorithm is Algorithm.KNN:
        return fit_knn(d, k=hp["k"], spec=spec)
    if spec.algorithm is Algorithm.REP_TREE:
        return fit_rep_tree(
            d,
            grow_fraction=hp["grow_fraction"],
            max_depth=hp["max_depth"],
            min_leaf=hp["min_leaf"],
            seed=spec.seed,
            spec=spec,
        )
    return fit_random_forest(
        d,
        n_trees=hp["n_trees"],
        features_per_split=hp["features_per_split"],
        min_leaf=hp["min_leaf"],
        seed=spec.seed,
        spec=spec,
    )


def model_to_obj(model: TrainedModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "algorithm": model.algorithm.value,
        "hyperparameters": dict(model.spec.hyperparameters),
        "seed": model.spec.seed,
        "schema_id": model.schema_id,
        "feature_names": list(model.feature_names),
        "payload": model.payload(),
    }


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(model_to_obj(model), sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def load_model(path: str | Path, expected_schema_id: str | None = None) -> TrainedModel:
    """Load a model file; a schema mismatch with the caller's expectation is
    a hard error, never a silent reinterpretation."""
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("format_version") != MODEL_FORMAT_VERSION:
        raise ConfigError(
            "model_format_version", f"unsupported model format in {path}"
        )
    algorithm = Algorithm(obj["algorithm"])
    spec = LearnerSpec(algorithm, obj["hyperparameters"], seed=int(obj["seed"]))
    schema_id = obj["schema_id"]
    if expected_schema_id is not None and schema_id != expected_schema_id:
        raise SchemaMismatchError(
            "schema_mismatch",
            f"model was trained on schema {schema_id!r}, expected {expected_schema_id!r}",
        )
    cls = _MODEL_CLASSES[algorithm]
    return cls.from_payload(spec, schema_id, tuple(obj["feature_names"]), obj["payload"])
