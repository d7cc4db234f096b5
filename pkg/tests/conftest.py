from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from credulous.types import (
    AccountSnapshot,
    ClassLabel,
    Dataset,
    FeatureSchema,
    FeatureVector,
    LabeledInstance,
    TweetDigest,
)

CAPTURE = datetime(2020, 1, 1, tzinfo=timezone.utc)


def make_dataset(X, y, ids=None, schema_id="test", feature_names=None) -> Dataset:
    """Dataset from a feature matrix and 0/1 labels."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    if feature_names is None:
        feature_names = tuple(f"f{j}" for j in range(X.shape[1]))
    if ids is None:
        ids = tuple(f"a{i:04d}" for i in range(len(X)))
    schema = FeatureSchema(schema_id, tuple(feature_names))
    instances = tuple(
        LabeledInstance(
            ids[i],
            FeatureVector(schema_id, tuple(float(v) for v in X[i])),
            ClassLabel.POSITIVE if y[i] else ClassLabel.NEGATIVE,
        )
        for i in range(len(X))
    )
    return Dataset(schema, instances)


def make_snapshot(account_id="acct1", **overrides) -> AccountSnapshot:
    """A valid snapshot with boring defaults, override what matters."""
    fields = dict(
        account_id=account_id,
        screen_name="someuser",
        created_at=CAPTURE - timedelta(days=400),
        statuses_count=120,
        followers_count=80,
        friends_count=40,
        favourites_count=15,
        listed_count=2,
        verified=False,
        geo_enabled=True,
        default_profile=False,
        default_profile_image=False,
        description="says things online",
        profile_url_present=True,
        tweets=(),
        mentions_collected=0,
        friend_ids=(),
        external_scores=None,
    )
    fields.update(overrides)
    return AccountSnapshot(**fields)


def make_tweet(created_at=None, hour=12, **overrides) -> TweetDigest:
    posted = (created_at or (CAPTURE - timedelta(days=10))).replace(hour=hour)
    fields = dict(
        posted_at=posted,
        is_retweet=False,
        is_reply=False,
        hashtag_count=0,
        url_count=0,
        mention_count=0,
    )
    fields.update(overrides)
    return TweetDigest(**fields)
