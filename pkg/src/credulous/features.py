"""Feature extraction: profile-only features, activity features, and their union.

Three schemas are supported:

* ``class_a_minus``  - 16 features computable from the account profile alone.
* ``botometer_plus`` - 12 activity/score features: tweet and mention counts,
  per-tweet aggregates, posting-hour entropy, and the optional external
  automation scores (imputed when absent).
* ``all_features``   - concatenation of the two, profile features first.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .types import (
    AccountSnapshot,
    ClassLabel,
    Dataset,
    FeatureSchema,
    FeatureVector,
    LabeledInstance,
)


class FeatureSetId(Enum):
    CLASS_A_MINUS = "class_a_minus"
    BOTOMETER_PLUS = "botometer_plus"
    ALL_FEATURES = "all_features"


CLASS_A_MINUS_NAMES = (
    "account_age_days",
    "statuses_count",
    "followers_count",
    "friends_count",
    "favourites_count",
    "listed_count",
    "default_profile",
    "default_profile_image",
    "has_description",
    "description_length",
    "profile_url_present",
    "verified",
    "geo_enabled",
    "screen_name_length",
    "screen_name_digit_count",
    "followers_to_friends_ratio",
)

BOTOMETER_PLUS_NAMES = (
    "tweet_count_collected",
    "mention_count_collected",
    "retweet_fraction",
    "reply_fraction",
    "mean_hashtags_per_tweet",
    "mean_urls_per_tweet",
    "mean_mentions_per_tweet",
    "tweets_per_day",
    "hour_of_day_entropy",
    "cap",
    "score_english",
    "score_universal",
)

# External-service scores are the only features that can be missing.
OPTIONAL_FEATURES = ("cap", "score_english", "score_universal")

_SCHEMAS = {
    FeatureSetId.CLASS_A_MINUS: FeatureSchema("class_a_minus", CLASS_A_MINUS_NAMES),
    FeatureSetId.BOTOMETER_PLUS: FeatureSchema("botometer_plus", BOTOMETER_PLUS_NAMES),
    FeatureSetId.ALL_FEATURES: FeatureSchema(
        "all_features", CLASS_A_MINUS_NAMES + BOTOMETER_PLUS_NAMES
    ),
}


def schema_for(feature_set: FeatureSetId) -> FeatureSchema:
    return _SCHEMAS[feature_set]


class ImputeStrategy(Enum):
    CONSTANT_ZERO = "constant_zero"
    TRAINING_MEAN = "training_mean"


@dataclass(frozen=True)
class ImputationPolicy:
    """How to fill each optional feature when external scores are absent.

    ``CONSTANT_ZERO`` uses the value from ``constants`` (default 0.0, so an
    absent score never fabricates automation signal). ``TRAINING_MEAN``
    expects the mean to be placed in ``constants`` by :func:`fit_imputation`.
    """

    strategies: Mapping[str, ImputeStrategy]
    constants: Mapping[str, float]

    def __post_init__(self):
        for name in OPTIONAL_FEATURES:
            if name not in self.strategies:
                raise ConfigError("imputation_missing_feature", f"no strategy for {name!r}")
        for name in self.strategies:
            if name not in OPTIONAL_FEATURES:
                raise ConfigError("imputation_unknown_feature", f"{name!r} is not optional")

    def value_for(self, name: str) -> float:
        return float(self.constants.get(name, 0.0))


def default_policy() -> ImputationPolicy:
    return ImputationPolicy(
        strategies={name: ImputeStrategy.CONSTANT_ZERO for name in OPTIONAL_FEATURES},
        constants={},
    )


def fit_imputation(
    policy: ImputationPolicy, snapshots: Iterable[AccountSnapshot]
) -> ImputationPolicy:
    """Fill TRAINING_MEAN constants from the scores present in ``snapshots``.

    Features whose strategy is CONSTANT_ZERO keep their configured constant.
    A TRAINING_MEAN feature with no observed values falls back to 0.0.
    """
    observed: dict[str, list[float]] = {name: [] for name in OPTIONAL_FEATURES}
    for s in snapshots:
        if s.external_scores is None:
            continue
        for name in OPTIONAL_FEATURES:
            v = getattr(s.external_scores, name)
            if v is not None:
                observed[name].append(float(v))
    constants = dict(policy.constants)
    for name, strategy in policy.strategies.items():
        if strategy is ImputeStrategy.TRAINING_MEAN:
            vals = observed[name]
            constants[name] = float(np.mean(vals)) if vals else 0.0
    return ImputationPolicy(strategies=dict(policy.strategies), constants=constants)


def _age_days(s: AccountSnapshot, capture_time: datetime) -> float:
    return max((capture_time - s.created_at).total_seconds(), 0.0) / 86400.0


def extract_class_a(s: AccountSnapshot, capture_time: datetime) -> FeatureVector:
    """The 16 profile-only features, in schema order.

    ``followers_to_friends_ratio`` is followers/friends; for accounts with
    zero friends (possible on the bot task, where no eligibility filter
    applies) the ratio is defined as the raw follower count.
    """
    friends = s.friends_count
    ratio = s.followers_count / friends if friends > 0 else float(s.followers_count)
    values = (
        _age_days(s, capture_time),
        float(s.statuses_count),
        float(s.followers_count),
        float(s.friends_count),
        float(s.favourites_count),
        float(s.listed_count),
        1.0 if s.default_profile else 0.0,
        1.0 if s.default_profile_image else 0.0,
        1.0 if s.description else 0.0,
        float(len(s.description)),
        1.0 if s.profile_url_present else 0.0,
        1.0 if s.verified else 0.0,
        1.0 if s.geo_enabled else 0.0,
        float(len(s.screen_name)),
        float(sum(c.isdigit() for c in s.screen_name)),
        float(ratio),
    )
    return FeatureVector("class_a_minus", values)


def hour_entropy(hours: Sequence[int]) -> float:
    """Shannon entropy (natural log) of the 24-bin posting-hour histogram.

    Zero for an empty sequence; at most ln(24) for a uniform spread.
    """
    if not hours:
        return 0.0
    counts = np.bincount(np.asarray(hours, dtype=np.int64), minlength=24)
    p = counts[counts > 0] / len(hours)
    return float(-(p * np.log(p)).sum())


def extract_botometer_plus(
    s: AccountSnapshot, capture_time: datetime, policy: Optional[ImputationPolicy] = None
) -> FeatureVector:
    """The 12 activity features, in schema order.

    Per-tweet means are 0 for accounts with no collected tweets. The three
    external scores come from ``s.external_scores`` when present and from
    the imputation policy otherwise.
    """
    if policy is None:
        policy = default_policy()
    n = len(s.tweets)
    if n > 0:
        retweets = sum(t.is_retweet for t in s.tweets)
        replies = sum(t.is_reply for t in s.tweets)
        hashtags = sum(t.hashtag_count for t in s.tweets)
        urls = sum(t.url_count for t in s.tweets)
        mentions = sum(t.mention_count for t in s.tweets)
        rt_frac, rp_frac = retweets / n, replies / n
        mean_ht, mean_url, mean_men = hashtags / n, urls / n, mentions / n
        entropy = hour_entropy([t.posted_at.hour for t in s.tweets])
    else:
        rt_frac = rp_frac = mean_ht = mean_url = mean_men = entropy = 0.0
    tweets_per_day = n / max(_age_days(s, capture_time), 1.0)

    scores = s.external_scores
    ext = []
    for name in OPTIONAL_FEATURES:
        v = getattr(scores, name) if scores is not None else None
        ext.append(float(v) if v is not None else policy.value_for(name))

    values = (
        float(n),
        float(s.mentions_collected),
        rt_frac,
        rp_frac,
        mean_ht,
        mean_url,
        mean_men,
        tweets_per_day,
        entropy,
        ext[0],
        ext[1],
        ext[2],
    )
    return FeatureVector("botometer_plus", values)


def extract_all(
    s: AccountSnapshot, capture_time: datetime, policy: Optional[ImputationPolicy] = None
) -> FeatureVector:
    """Profile features followed by activity features (28 values)."""
    a = extract_class_a(s, capture_time)
    b = extract_botometer_plus(s, capture_time, policy)
    return FeatureVector("all_features", a.values + b.values)


def extract(
    s: AccountSnapshot,
    feature_set: FeatureSetId,
    capture_time: datetime,
    policy: Optional[ImputationPolicy] = None,
) -> FeatureVector:
    if feature_set is FeatureSetId.CLASS_A_MINUS:
        return extract_class_a(s, capture_time)
    if feature_set is FeatureSetId.BOTOMETER_PLUS:
        return extract_botometer_plus(s, capture_time, policy)
    return extract_all(s, capture_time, policy)


def build_dataset(
    pairs: Iterable[tuple[AccountSnapshot, ClassLabel]],
    feature_set: FeatureSetId,
    capture_time: datetime,
    policy: Optional[ImputationPolicy] = None,
) -> Dataset:
    """Extract features for labeled snapshots and assemble a Dataset."""
    schema = schema_for(feature_set)
    instances = tuple(
        LabeledInstance(s.account_id, extract(s, feature_set, capture_time, policy), label)
        for s, label in pairs
    )
    return Dataset(schema, instances)


# --- standardization ---------------------------------------------------------


@dataclass(frozen=True)
class StandardizationTable:
    """Per-feature training mean and population stddev."""

    schema_id: str
    means: tuple[float, ...]
    stds: tuple[float, ...]

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        means = np.asarray(self.means)
        stds = np.asarray(self.stds)
        out = np.zeros_like(matrix, dtype=np.float64)
        np.divide(matrix - means, stds, out=out, where=stds > 0)
        return out


def standardization_table(schema_id: str, matrix: np.ndarray) -> StandardizationTable:
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # population stddev
    return StandardizationTable(schema_id, tuple(map(float, means)), tuple(map(float, stds)))


def standardize(
    train: Dataset, others: Sequence[Dataset] = ()
) -> tuple[list[Dataset], StandardizationTable]:
    """Rescale features to (x - mean)/stddev using training statistics only.

    Zero-variance features map to 0. The same table is applied to every
    dataset in ``others``. Returns the standardized datasets (train first)
    and the table.
    """
    if len(train) == 0:
        raise ValueError("cannot standardize an empty training dataset")
    table = standardization_table(train.schema.schema_id, train.matrix())
    out = []
    for ds in (train, *others):
        transformed = table.apply(ds.matrix())
        instances = tuple(
            LabeledInstance(
                inst.account_id,
                FeatureVector(ds.schema.schema_id, tuple(map(float, row))),
                inst.label,
            )
            for inst, row in zip(ds.instances, transformed)
        )
        out.append(Dataset(ds.schema, instances))
    return out, table


# --- feature matrix file -----------------------------------------------------


def write_feature_matrix(
    path: str | Path,
    dataset: Dataset,
    label_names: Optional[Mapping[ClassLabel, str]] = None,
    include_label: bool = True,
) -> None:
    """Write the comma-separated feature matrix.

    Header is ``account_id``, the feature names in schema order, and
    (optionally) ``label``. Reals are printed with full round-trip precision.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["account_id", *dataset.schema.feature_names]
        if include_label:
            header.append("label")
        writer.writerow(header)
        for inst in dataset.instances:
            row = [inst.account_id, *(repr(v) for v in inst.features.values)]
            if include_label:
                name = (
                    label_names[inst.label] if label_names is not None else inst.label.value
                )
                row.append(name)
            writer.writerow(row)


def read_feature_matrix(
    path: str | Path,
    schema: FeatureSchema,
    label_names: Optional[Mapping[str, ClassLabel]] = None,
) -> Dataset:
    """Read back a feature matrix written by :func:`write_feature_matrix`."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        has_label = header[-1] == "label"
        expected = ["account_id", *schema.feature_names] + (["label"] if has_label else [])
        if header != expected:
            raise ConfigError("feature_matrix_header", f"unexpected header in {path}")
        instances = []
        for row in reader:
            values = tuple(float(v) for v in row[1 : 1 + len(schema)])
            if has_label:
                raw = row[-1]
                label = (
                    label_names[raw]
                    if label_names is not None
                    else ClassLabel(raw)
                )
            else:
                label = ClassLabel.NEGATIVE
            instances.append(
                LabeledInstance(row[0], FeatureVector(schema.schema_id, values), label)
            )
    return Dataset(schema, tuple(instances))
