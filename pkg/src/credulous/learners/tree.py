"""Binary decision trees: shared split search, growth, and the
reduced-error-pruning tree learner.

Split candidates are the midpoints between consecutive distinct sorted
values of a feature. The impurity criterion is pluggable: the pruned tree
uses information gain (natural log); the forest uses Gini. Both criteria
are evaluated for all cut positions of all candidate features at once with
prefix sums, which keeps worst-case training (deep trees on noise labels)
fast enough for cross-validation at corpus scale.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import FitError
from ..types import Dataset
from .base import Algorithm, LearnerSpec, TrainedModel, require_two_classes

_REL_TOL = 1e-12


@dataclass
class TreeNode:
    """Internal node (feature + threshold) or leaf (feature is None).
    ``n_pos``/``n_neg`` are the training counts that reached the node."""

    n_pos: int
    n_neg: int
    feature: Optional[int] = None
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"p": self.n_pos, "n": self.n_neg}
        return {
            "p": self.n_pos,
            "n": self.n_neg,
            "f": self.feature,
            "t": self.threshold,
            "l": self.left.to_dict(),
            "r": self.right.to_dict(),
        }

    @staticmethod
    def from_dict(obj: dict) -> "TreeNode":
        node = TreeNode(n_pos=int(obj["p"]), n_neg=int(obj["n"]))
        if "f" in obj:
            node.feature = int(obj["f"])
            node.threshold = float(obj["t"])
            node.left = TreeNode.from_dict(obj["l"])
            node.right = TreeNode.from_dict(obj["r"])
        return node


def _xlogx(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a, dtype=np.float64)
    np.log(a, out=out, where=a > 0)
    return a * out


def _impurity_sum(n_pos, n_tot, criterion: str):
    """Size-weighted impurity: n*H for entropy, n*gini for gini."""
    shape = np.broadcast_shapes(np.shape(n_pos), np.shape(n_tot))
    n_pos = np.broadcast_to(np.asarray(n_pos, dtype=np.float64), shape)
    n_tot = np.broadcast_to(np.asarray(n_tot, dtype=np.float64), shape)
    n_neg = n_tot - n_pos
    if criterion == "entropy":
        return _xlogx(n_tot) - _xlogx(n_pos) - _xlogx(n_neg)
    return n_tot - np.divide(
        n_pos * n_pos + n_neg * n_neg,
        n_tot,
        out=np.zeros(shape),
        where=n_tot > 0,
    )


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    feats: np.ndarray,
    criterion: str,
    min_child: int,
) -> Optional[tuple[int, float]]:
    """Best (feature, threshold) among ``feats`` for the rows in ``idx``.

    Only cuts between distinct values that leave both children with at
    least ``min_child`` rows are considered; returns None when no cut
    strictly reduces the impurity. Ties go to the earliest candidate
    feature and then the lowest cut position, so the search is
    deterministic for a fixed candidate order.
    """
    m = idx.shape[0]
    if m < 2 * min_child:
        return None
    Xs = X[np.ix_(idx, feats)]
    order = np.argsort(Xs, axis=0)
    xs = np.take_along_axis(Xs, order, axis=0)
    ys = y[idx][order]
    lo, hi = min_child, m - min_child + 1  # n_left range [lo, hi)
    pos_left = np.cumsum(ys, axis=0)[lo - 1 : hi - 1].astype(np.float64)
    n_left = np.arange(lo, hi, dtype=np.float64)[:, None]
    total_pos = float(y[idx].sum())
    child = _impurity_sum(pos_left, n_left, criterion) + _impurity_sum(
        total_pos - pos_left, m - n_left, criterion
    )
    child[xs[lo:hi] == xs[lo - 1 : hi - 1]] = np.inf
    cut, f = np.unravel_index(np.argmin(child), child.shape)
    parent = float(_impurity_sum(total_pos, np.float64(m), criterion))
    if not child[cut, f] < parent - _REL_TOL * (1.0 + abs(parent)):
        return None
    row = lo - 1 + cut
    return int(feats[f]), float(0.5 * (xs[row, f] + xs[row + 1, f]))


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    idx: np.ndarray,
    criterion: str,
    min_child: int = 1,
    max_depth: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    features_per_split: Optional[int] = None,
) -> TreeNode:
    """Grow a binary tree over the rows in ``idx``.

    When ``features_per_split`` is given, each node considers that many
    features sampled without replacement from ``rng``; otherwise every
    feature is scanned. Growth stops at purity, the depth cap, or when no
    valid split remains.
    """
    d = X.shape[1]
    all_feats = np.arange(d)
    root = TreeNode(n_pos=int(y[idx].sum()), n_neg=int(len(idx) - y[idx].sum()))
    stack = [(root, idx, 0)]
    while stack:
        node, rows, depth = stack.pop()
        if (
            node.n_pos == 0
            or node.n_neg == 0
            or (max_depth is not None and depth >= max_depth)
        ):
            continue
        if features_per_split is not None:
            feats = rng.choice(d, size=min(features_per_split, d), replace=False)
            feats.sort()
        else:
            feats = all_feats
        found = best_split(X, y, rows, feats, criterion, min_child)
        if found is None:
            continue
        node.feature, node.threshold = found
        mask = X[rows, node.feature] <= node.threshold
        left_rows, right_rows = rows[mask], rows[~mask]
        pos_left = int(y[left_rows].sum())
        node.left = TreeNode(n_pos=pos_left, n_neg=len(left_rows) - pos_left)
        node.right = TreeNode(
            n_pos=node.n_pos - pos_left, n_neg=node.n_neg - (len(left_rows) - pos_left)
        )
        stack.append((node.left, left_rows, depth + 1))
        stack.append((node.right, right_rows, depth + 1))
    return root


def leaf_scores(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """POSITIVE fraction of the training counts at each row's leaf."""
    out = np.empty(X.shape[0])
    _route(node, X, np.arange(X.shape[0]), out)
    return out


def _route(node: TreeNode, X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        total = node.n_pos + node.n_neg
        out[rows] = node.n_pos / total if total else 0.0
        return
    mask = X[rows, node.feature] <= node.threshold
    _route(node.left, X, rows[mask], out)
    _route(node.right, X, rows[~mask], out)


def tree_votes(node: TreeNode, X: np.ndarray) -> np.ndarray:
    """Majority-class POSITIVE vote per row (leaf ties vote NEGATIVE)."""
    return leaf_scores(node, X) > 0.5


def count_nodes(node: TreeNode) -> int:
    if node.is_leaf:
        return 1
    return 1 + count_nodes(node.left) + count_nodes(node.right)


# --- reduced-error pruning ----------------------------------------------------


def _stratified_two_way(
    y: np.ndarray, grow_fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Split indices into (grow, prune) keeping class shares, at least one
    grow instance per class."""
    grow_parts, prune_parts = [], []
    for cls in (0, 1):
        members = np.flatnonzero(y == cls)
        members = members[rng.permutation(len(members))]
        n_grow = max(1, int(np.floor(grow_fraction * len(members))))
        grow_parts.append(members[:n_grow])
        prune_parts.append(members[n_grow:])
    return np.sort(np.concatenate(grow_parts)), np.sort(np.concatenate(prune_parts))


def prune_tree(node: TreeNode, X: np.ndarray, y: np.ndarray, rows: np.ndarray) -> int:
    """Bottom-up reduced-error pruning against the rows of the prune set
    reaching each node; returns the pruned subtree's error count on them.

    A subtree collapses to a leaf whenever the leaf (majority class of the
    node's grow-time counts, ties NEGATIVE) makes no more prune-set errors
    than the subtree, so equal accuracy prefers the simpler tree.
    """
    majority_pos = node.n_pos > node.n_neg
    leaf_errors = int((y[rows] != int(majority_pos)).sum())
    if node.is_leaf:
        return leaf_errors
    mask = X[rows, node.feature] <= node.threshold
    subtree_errors = prune_tree(node.left, X, y, rows[mask]) + prune_tree(
        node.right, X, y, rows[~mask]
    )
    if leaf_errors <= subtree_errors:
        node.feature = None
        node.left = node.right = None
        return leaf_errors
    return subtree_errors


class RepTreeModel(TrainedModel):
    algorithm = Algorithm.REP_TREE

    def __init__(self, spec, schema_id, feature_names, root: TreeNode):
        super().__init__(spec, schema_id, feature_names)
        self.root = root

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        return leaf_scores(self.root, X)

    def payload(self) -> dict:
        return {"tree": self.root.to_dict()}

    @classmethod
    def from_payload(cls, spec, schema_id, feature_names, payload) -> "RepTreeModel":
        return cls(spec, schema_id, feature_names, TreeNode.from_dict(payload["tree"]))


def fit_rep_tree(
    d: Dataset,
    grow_fraction: float = 0.75,
    max_depth: int = 30,
    min_leaf: int = 2,
    seed: int = 0,
    spec: LearnerSpec | None = None,
) -> RepTreeModel:
    """Grow an information-gain tree on a stratified grow partition, then
    prune it bottom-up against the held-out prune partition.

    Leaf scores are the POSITIVE fraction of the grow instances reaching
    the leaf; the prune partition only steers the pruning decisions.
    """
    if spec is None:
        spec = LearnerSpec(
            Algorithm.REP_TREE,
            {"grow_fraction": grow_fraction, "max_depth": max_depth, "min_leaf": min_leaf},
            seed=seed,
        )
    if not 0.0 < grow_fraction < 1.0:
        raise FitError("grow_fraction_out_of_range", "need 0 < grow_fraction < 1")
    if len(d) < 4:
        raise FitError("too_few_instances", "reduced-error pruning needs >= 4 instances")
    X = d.matrix()
    y = d.labels01()
    require_two_classes(y)
    rng = np.random.default_rng(seed)
    grow_idx, prune_idx = _stratified_two_way(y, grow_fraction, rng)
    root = grow_tree(X, y, grow_idx, criterion="entropy", min_child=min_leaf, max_depth=max_depth)
    prune_tree(root, X, y, prune_idx)
    return RepTreeModel(spec, d.schema.schema_id, d.schema.feature_names, root)
