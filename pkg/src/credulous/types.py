"""Shared domain types: account snapshots, labels, feature vectors, datasets.

All types are immutable after construction and safe to share between
threads. Snapshot-level data-quality rules are checked by
:func:`validate_snapshot`, which reports violations as data instead of
raising, so dirty corpora can be loaded and filtered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Optional

import numpy as np

# Collection caps applied when account data was gathered.
TWEET_CAP = 3200
MENTION_CAP = 100
FRIEND_ID_CAP = 5000


class ClassLabel(Enum):
    """Binary class label. POSITIVE is the class of interest of the task
    at hand (bot detection: bot; credulity classification: credulous)."""

    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True, slots=True)
class TweetDigest:
    """Structural summary of one collected tweet (no text is stored)."""

    posted_at: datetime
    is_retweet: bool
    is_reply: bool
    hashtag_count: int
    url_count: int
    mention_count: int


@dataclass(frozen=True, slots=True)
class ExternalScores:
    """Optional automation scores produced by an external service."""

    cap: Optional[float] = None
    score_english: Optional[float] = None
    score_universal: Optional[float] = None


@dataclass(frozen=True, slots=True)
class AccountSnapshot:
    """One account's profile fields, activity digest and friend id list."""

    account_id: str
    screen_name: str
    created_at: datetime
    statuses_count: int
    followers_count: int
    friends_count: int
    favourites_count: int
    listed_count: int
    verified: bool
    geo_enabled: bool
    default_profile: bool
    default_profile_image: bool
    description: str
    profile_url_present: bool
    tweets: tuple[TweetDigest, ...] = ()
    mentions_collected: int = 0
    friend_ids: tuple[str, ...] = ()
    external_scores: Optional[ExternalScores] = None


_COUNT_FIELDS = (
    "statuses_count",
    "followers_count",
    "friends_count",
    "favourites_count",
    "listed_count",
    "mentions_collected",
)


def validate_snapshot(
    s: AccountSnapshot, capture_time: Optional[datetime] = None
) -> list[str]:
    """Check every snapshot invariant; return the list of violation names.

    An empty list means the snapshot is valid. Violations are data, not
    failures: callers decide whether to reject the record. The
    ``created_in_future`` check runs only when ``capture_time`` is given
    (the capture time lives in the corpus manifest, not the snapshot).
    """
    violations: list[str] = []
    if not s.account_id:
        violations.append("empty_account_id")
    if len(s.tweets) > TWEET_CAP:
        violations.append("tweets_cap_exceeded")
    if s.mentions_collected > MENTION_CAP:
        violations.append("mentions_cap_exceeded")
    if len(s.friend_ids) > FRIEND_ID_CAP:
        violations.append("friends_cap_exceeded")
    if len(set(s.friend_ids)) != len(s.friend_ids):
        violations.append("duplicate_friend_ids")
    if s.account_id in s.friend_ids:
        violations.append("self_friend")
    if any(getattr(s, name) < 0 for name in _COUNT_FIELDS):
        violations.append("negative_count")

    if s.created_at.tzinfo is None:
        violations.append("naive_timestamp")
    else:
        if capture_time is not None and s.created_at > capture_time:
            violations.append("created_in_future")
        for t in s.tweets:
            if t.posted_at.tzinfo is None:
                violations.append("naive_timestamp")
                break
            if t.posted_at < s.created_at:
                violations.append("tweet_before_creation")
                break
    if any(
        t.hashtag_count < 0 or t.url_count < 0 or t.mention_count < 0
        for t in s.tweets
    ):
        violations.append("negative_tweet_count")
    if s.external_scores is not None and s.external_scores.cap is not None:
        if not (0.0 <= s.external_scores.cap <= 1.0):
            violations.append("cap_out_of_range")
    return violations


@dataclass(frozen=True, slots=True)
class FeatureSchema:
    """Ordered, uniquely named feature columns. The order is canonical and
    doubles as the tie-break order for learners."""

    schema_id: str
    feature_names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError(f"duplicate feature names in schema {self.schema_id!r}")

    def __len__(self) -> int:
        return len(self.feature_names)


@dataclass(frozen=True, slots=True)
class FeatureVector:
    schema_id: str
    values: tuple[float, ...]

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("feature values must be finite")


@dataclass(frozen=True, slots=True)
class LabeledInstance:
    account_id: str
    features: FeatureVector
    label: ClassLabel


@dataclass(frozen=True, slots=True)
class Dataset:
    """A feature schema plus labeled instances sharing that schema."""

    schema: FeatureSchema
    instances: tuple[LabeledInstance, ...]

    def __post_init__(self):
        if len(self.instances) == 0:
            return
        for inst in self.instances:
            if inst.features.schema_id != self.schema.schema_id:
                raise ValueError(
                    f"instance {inst.account_id!r} has schema "
                    f"{inst.features.schema_id!r}, dataset has {self.schema.schema_id!r}"
                )
            if len(inst.features.values) != len(self.schema):
                raise ValueError(f"instance {inst.account_id!r} has wrong vector length")
        ids = [inst.account_id for inst in self.instances]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate account_id in dataset")

    def __len__(self) -> int:
        return len(self.instances)

    def matrix(self) -> np.ndarray:
        """Instance features as a float64 matrix, one row per instance."""
        if not self.instances:
            return np.zeros((0, len(self.schema)))
        return np.array([inst.features.values for inst in self.instances], dtype=np.float64)

    def labels01(self) -> np.ndarray:
        """Labels as 0/1 ints (1 = POSITIVE), aligned with matrix rows."""
        return np.array(
            [1 if inst.label is ClassLabel.POSITIVE else 0 for inst in self.instances],
            dtype=np.int64,
        )

    def account_ids(self) -> tuple[str, ...]:
        return tuple(inst.account_id for inst in self.instances)

    def subset(self, indices) -> "Dataset":
        return Dataset(self.schema, tuple(self.instances[i] for i in indices))


def dataset_class_counts(d: Dataset) -> tuple[int, int]:
    """Return (positives, negatives); they always sum to len(d)."""
    pos = sum(1 for inst in d.instances if inst.label is ClassLabel.POSITIVE)
    return pos, len(d.instances) - pos
