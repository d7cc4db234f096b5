"""Random forest of unpruned Gini trees on bootstrap samples.

Each tree draws its bootstrap sample and per-node feature subsets from a
generator seeded with (seed, tree_index), so a forest is reproducible
tree-by-tree no matter how fitting is scheduled. Prediction is majority
vote over the trees; the score is the POSITIVE vote fraction.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import FitError
from ..types import Dataset
from .base import Algorithm, LearnerSpec, TrainedModel, require_two_classes
from .tree import TreeNode, grow_tree, tree_votes


class RandomForestModel(TrainedModel):
    algorithm = Algorithm.RANDOM_FOREST

    def __init__(self, spec, schema_id, feature_names, trees: list[TreeNode]):
        super().__init__(spec, schema_id, feature_names)
        self.trees = trees

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros(X.shape[0])
        for tree in self.trees:
            votes += tree_votes(tree, X)
        return votes / len(self.trees)

    def payload(self) -> dict:
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_payload(cls, spec, schema_id, feature_names, payload) -> "RandomForestModel":
        return cls(
            spec,
            schema_id,
            feature_names,
            [TreeNode.from_dict(t) for t in payload["trees"]],
        )


def fit_random_forest(
    d: Dataset,
    n_trees: int = 100,
    features_per_split: Optional[int] = None,
    min_leaf: int = 1,
    seed: int = 0,
    spec: LearnerSpec | None = None,
) -> RandomForestModel:
    """Fit ``n_trees`` trees, each on a bootstrap sample of size len(d),
    considering ``features_per_split`` features at each node (default
    ceil(sqrt(n_features)))."""
    if spec is None:
        spec = LearnerSpec(
            Algorithm.RANDOM_FOREST,
            {
                "n_trees": n_trees,
                "features_per_split": features_per_split,
                "min_leaf": min_leaf,
            },
            seed=seed,
        )
    if n_trees < 1:
        raise FitError("n_trees_out_of_range", "need at least one tree")
    X = d.matrix()
    y = d.labels01()
    require_two_classes(y)
    n, dims = X.shape
    mtry = features_per_split if features_per_split is not None else math.ceil(math.sqrt(dims))
    if not 1 <= mtry <= dims:
        raise FitError("features_per_split_out_of_range", f"need 1..{dims}, got {mtry}")
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        boot = rng.integers(0, n, size=n)
        trees.append(
            grow_tree(
                X[boot],
                y[boot],
                np.arange(n),
                criterion="gini",
                min_child=min_leaf,
                rng=rng,
                features_per_split=mtry,
            )
        )
    return RandomForestModel(spec, d.schema.schema_id, d.schema.feature_names, trees)
