"""Credulous-user ground truth and the balanced under-sampling scheme.

A human account's friends are labeled by the trained bot detector; the
account is credulous when the bot ratio over its labeled friends clears a
threshold (and a minimum bot count). Training then repeatedly pairs the
whole credulous set with equally sized, disjoint draws of not-credulous
accounts until the not-credulous pool is exhausted, cross-validates on
each balanced fold, and averages the per-fold metrics.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import CredulityError, SchemaMismatchError
from .evaluation import METRIC_NAMES, EvalReport, cross_validate, summarize_folds
from .features import FeatureSetId, ImputationPolicy, build_dataset, extract, schema_for
from .learners import LearnerSpec, TrainedModel
from .types import AccountSnapshot, ClassLabel, Dataset, dataset_class_counts


@dataclass(frozen=True)
class CredulityRule:
    """An account is credulous iff bot_ratio >= min_bot_ratio (inclusive)
    and its bot count >= min_bot_count."""

    min_bot_ratio: float = 0.1
    min_bot_count: int = 0
    max_friends: int = 400

    def __post_init__(self):
        if not 0.0 < self.min_bot_ratio <= 1.0:
            raise CredulityError("min_bot_ratio_out_of_range", "need 0 < ratio <= 1")
        if self.min_bot_count < 0:
            raise CredulityError("min_bot_count_out_of_range", "need >= 0")
        if self.max_friends < 1:
            raise CredulityError("max_friends_out_of_range", "need >= 1")


@dataclass(frozen=True)
class FriendBotLabels:
    """Bot/human labels for each account's friends, keyed per account."""

    by_account: Mapping[str, Mapping[str, ClassLabel]]

    def labeled_friends(self, account_id: str) -> Mapping[str, ClassLabel]:
        return self.by_account.get(account_id, {})


def label_friends(
    model: TrainedModel,
    accounts: Sequence[AccountSnapshot],
    friends: Sequence[AccountSnapshot],
    feature_set: FeatureSetId,
    capture_time: datetime,
    policy: Optional[ImputationPolicy] = None,
) -> FriendBotLabels:
    """Run the bot detector over ``friends`` and key the predictions by the
    accounts that follow them. Friends absent from ``friends`` stay
    unlabeled; each present friend receives exactly one label."""
    if model.schema_id != schema_for(feature_set).schema_id:
        raise SchemaMismatchError(
            "schema_mismatch",
            f"model schema {model.schema_id!r} does not match feature set "
            f"{feature_set.value!r}",
        )
    if friends:
        matrix = np.array(
            [extract(f, feature_set, capture_time, policy).values for f in friends],
            dtype=np.float64,
        )
        positive = model.predict_matrix(matrix)
        flat = {
            f.account_id: ClassLabel.POSITIVE if flag else ClassLabel.NEGATIVE
            for f, flag in zip(friends, positive)
        }
    else:
        flat = {}
    by_account = {}
    for account in accounts:
        labeled = {fid: flat[fid] for fid in account.friend_ids if fid in flat}
        by_account[account.account_id] = labeled
    return FriendBotLabels(by_account)


def bot_ratio(account: AccountSnapshot, labels: FriendBotLabels) -> float:
    """Bot-labeled friends over labeled friends, in [0, 1]."""
    labeled = labels.labeled_friends(account.account_id)
    if not labeled:
        raise CredulityError(
            "undefined_ratio", f"account {account.account_id!r} has no labeled friends"
        )
    bots = sum(1 for label in labeled.values() if label is ClassLabel.POSITIVE)
    return bots / len(labeled)


@dataclass(frozen=True)
class GroundTruthRecord:
    account_id: str
    bot_ratio: float
    bot_count: int
    friend_count: int
    label: ClassLabel


@dataclass(frozen=True)
class GroundTruth:
    """Per-account credulity records, ranked by descending bot ratio, then
    descending bot count, then ascending account_id."""

    records: tuple[GroundTruthRecord, ...]
    rule: CredulityRule

    def label_map(self) -> dict[str, ClassLabel]:
        return {r.account_id: r.label for r in self.records}

    def credulous_ids(self) -> tuple[str, ...]:
        return tuple(r.account_id for r in self.records if r.label is ClassLabel.POSITIVE)


def derive_ground_truth(
    accounts: Sequence[AccountSnapshot],
    labels: FriendBotLabels,
    rule: CredulityRule,
) -> GroundTruth:
    """Apply the credulity rule to every account and emit the full ranking.

    Every account must be eligible (1 <= friends_count <= rule.max_friends)
    and have at least one labeled friend.
    """
    records = []
    for account in accounts:
        if not 1 <= account.friends_count <= rule.max_friends:
            raise CredulityError(
                "ineligible_account",
                f"account {account.account_id!r} has friends_count="
                f"{account.friends_count}, eligible range is 1..{rule.max_friends}",
            )
        labeled = labels.labeled_friends(account.account_id)
        ratio = bot_ratio(account, labels)
        bots = sum(1 for label in labeled.values() if label is ClassLabel.POSITIVE)
        credulous = ratio >= rule.min_bot_ratio and bots >= rule.min_bot_count
        records.append(
            GroundTruthRecord(
                account_id=account.account_id,
                bot_ratio=ratio,
                bot_count=bots,
                friend_count=len(labeled),
                label=ClassLabel.POSITIVE if credulous else ClassLabel.NEGATIVE,
            )
        )
    records.sort(key=lambda r: (-r.bot_ratio, -r.bot_count, r.account_id))
    return GroundTruth(tuple(records), rule)


def build_credulity_dataset(
    ground_truth: GroundTruth,
    snapshots_by_id: Mapping[str, AccountSnapshot],
    feature_set: FeatureSetId,
    capture_time: datetime,
    policy: Optional[ImputationPolicy] = None,
) -> Dataset:
    """Join the ground-truth labels with extracted features."""
    pairs = []
    for record in ground_truth.records:
        snapshot = snapshots_by_id.get(record.account_id)
        if snapshot is None:
            raise CredulityError("missing_snapshot", record.account_id)
        pairs.append((snapshot, record.label))
    return build_dataset(pairs, feature_set, capture_time, policy)


# --- balanced under-sampling --------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    """Disjoint partitions of the not-credulous ids, each the size of the
    credulous set except possibly a smaller final one."""

    credulous_ids: tuple[str, ...]
    partitions: tuple[tuple[str, ...], ...]
    seed: int


def plan_undersampling_folds(d: Dataset, seed: int = 0) -> FoldPlan:
    """Shuffle the not-credulous ids and chop them into consecutive chunks
    of size |credulous|, keeping the smaller remainder chunk so every
    not-credulous instance is used exactly once."""
    credulous = [i.account_id for i in d.instances if i.label is ClassLabel.POSITIVE]
    others = [i.account_id for i in d.instances if i.label is ClassLabel.NEGATIVE]
    if not credulous:
        raise CredulityError("empty_credulous_class", "no credulous instances")
    if not others:
        raise CredulityError("empty_not_credulous_class", "no not-credulous instances")
    rng = np.random.default_rng(seed)
    shuffled = [others[i] for i in rng.permutation(len(others))]
    size = len(credulous)
    partitions = tuple(
        tuple(shuffled[start : start + size]) for start in range(0, len(shuffled), size)
    )
    return FoldPlan(tuple(credulous), partitions, seed)


def _partition_seed(seed: int, index: int) -> int:
    """Derive a per-partition seed; collision-resistant and deterministic."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class CredulityReport:
    """Cross-validation reports per balanced fold plus their aggregate."""

    per_partition: tuple[EvalReport, ...]
    k_per_partition: tuple[int, ...]
    mean: dict[str, float]
    stddev: dict[str, float]

    def to_obj(self) -> dict:
        return {
            "partitions": [r.to_obj() for r in self.per_partition],
            "k_per_partition": list(self.k_per_partition),
            "mean": dict(self.mean),
            "stddev": dict(self.stddev),
        }

    @staticmethod
    def from_obj(obj: dict) -> "CredulityReport":
        return CredulityReport(
            per_partition=tuple(EvalReport.from_obj(r) for r in obj["partitions"]),
            k_per_partition=tuple(int(k) for k in obj["k_per_partition"]),
            mean=dict(obj["mean"]),
            stddev=dict(obj["stddev"]),
        )


def aggregate_reports(reports: Sequence[EvalReport]) -> tuple[dict, dict]:
    """Unweighted mean and population sigma of each metric's per-fold means."""
    mean = {}
    stddev = {}
    for name in METRIC_NAMES:
        values = np.asarray([r.mean[name] for r in reports], dtype=np.float64)
        mean[name] = float(values.mean())
        stddev[name] = float(values.std())
    return mean, stddev


def balanced_fold(d: Dataset, plan: FoldPlan, index: int) -> Dataset:
    """The full credulous set plus partition ``index`` of the plan."""
    by_id = {inst.account_id: inst for inst in d.instances}
    try:
        instances = [by_id[a] for a in plan.credulous_ids] + [
            by_id[a] for a in plan.partitions[index]
        ]
    except KeyError as exc:
        raise CredulityError("plan_dataset_mismatch", f"unknown id {exc.args[0]!r}") from exc
    return Dataset(d.schema, tuple(instances))


def train_credulous(
    spec: LearnerSpec,
    d: Dataset,
    plan: FoldPlan,
    k: int = 10,
    seed: int = 0,
    n_workers: int = 1,
) -> CredulityReport:
    """Cross-validate the learner on every balanced fold of the plan.

    Each balanced fold is the full credulous set plus one partition of
    not-credulous instances. A fold too small for k folds runs with k
    reduced to its minority-class size (recorded in the report). Fold
    cross-validations use seeds derived from (seed, partition index).
    """
    reports = []
    ks = []
    for index in range(len(plan.partitions)):
        fold = balanced_fold(d, plan, index)
        pos, neg = dataset_class_counts(fold)
        k_fold = min(k, pos, neg)
        reports.append(
            cross_validate(spec, fold, k_fold, _partition_seed(seed, index), n_workers)
        )
        ks.append(k_fold)
    mean, stddev = aggregate_reports(reports)
    return CredulityReport(tuple(reports), tuple(ks), mean, stddev)
