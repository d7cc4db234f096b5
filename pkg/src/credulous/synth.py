"""Seeded synthetic corpora: bot/human populations with a tunable
separation dial, plus friendship lists with planted credulous users.

Eight latent profile/activity dimensions carry the bot-vs-human signal.
The class archetypes sit ``separation`` apart in Euclidean distance over
the dimensions' reference scales (so 0 means identical distributions);
as the separation grows the bot cluster also tightens around its
archetype, reflecting how templated bot accounts are more uniform than
organic ones. Two profile dimensions (favourites and description length)
can additionally be correlated with planted credulity: each is shifted by
``credulous_separation`` reference scales for planted users, again with a
tighter spread.

Every account draws from its own generator substream keyed by
(seed, population, index), so corpora are reproducible byte-for-byte and
generation order is irrelevant.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, SynthError
from .ingest import CorpusManifest, LabelRecord, save_manifest, snapshot_to_json, write_labels
from .types import AccountSnapshot, ClassLabel, ExternalScores, TweetDigest

DEFAULT_CAPTURE_TIME = datetime(2020, 1, 1, tzinfo=timezone.utc)

# (human mean, reference scale, bot direction) per latent dimension
_ARCHETYPE = {
    "statuses": (3000.0, 1100.0, +1.0),
    "followers": (2000.0, 700.0, -1.0),
    "favourites": (2500.0, 900.0, -1.0),
    "listed": (60.0, 22.0, -1.0),
    "description_length": (80.0, 26.0, -1.0),
    "age_days": (1400.0, 420.0, -1.0),
    "retweet_logit": (-1.2, 0.8, +1.0),
    "active_hours": (14.0, 3.5, -1.0),
}
_DIMS = tuple(_ARCHETYPE)
# fraction of spread removed from the bot cluster at full separation
_BOT_TIGHTEN = 0.5
_BOT_TIGHTEN_SPAN = 3.0
# dimensions correlated with planted credulity, and their tightening
_CREDULOUS_DIMS = ("favourites", "description_length")
_CREDULOUS_TIGHTEN = 0.5
_CREDULOUS_TIGHTEN_SPAN = 2.0

_FILLER = (
    "shares photos of weekend rides posts about coffee music and local news "
)


@dataclass(frozen=True)
class SynthConfig:
    n_humans: int
    n_bots: int
    separation: float = 0.0
    credulous_fraction: float = 0.0
    friends_per_human: tuple[int, int] = (10, 50)
    bot_density_credulous: float = 0.6
    bot_density_normal: float = 0.05
    credulous_separation: float = 0.0
    tweets_per_account: tuple[int, int] = (20, 60)
    seed: int = 0
    capture_time: datetime = DEFAULT_CAPTURE_TIME

    def __post_init__(self):
        if self.n_humans < 1 or self.n_bots < 1:
            raise ConfigError("population_out_of_range", "need n_humans, n_bots >= 1")
        if self.separation < 0 or self.credulous_separation < 0:
            raise ConfigError("separation_out_of_range", "separations must be >= 0")
        if not 0.0 <= self.credulous_fraction <= 1.0:
            raise ConfigError("credulous_fraction_out_of_range", "need 0 <= fraction <= 1")
        for name in ("bot_density_credulous", "bot_density_normal"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError("bot_density_out_of_range", f"{name} must be in [0, 1]")
        if self.credulous_fraction > 0 and not (
            self.bot_density_credulous > self.bot_density_normal
        ):
            raise ConfigError(
                "bot_density_order",
                "bot_density_credulous must exceed bot_density_normal",
            )
        lo, hi = self.friends_per_human
        if not 1 <= lo <= hi:
            raise ConfigError("friends_per_human_out_of_range", "need 1 <= lo <= hi")
        if hi > self.n_bots + self.n_humans - 1:
            raise ConfigError(
                "infeasible_friend_counts",
                f"up to {hi} friends requested but only "
                f"{self.n_bots + self.n_humans - 1} other accounts exist",
            )
        tlo, thi = self.tweets_per_account
        if not 0 <= tlo <= thi <= 3200:
            raise ConfigError("tweets_per_account_out_of_range", "need 0 <= lo <= hi <= 3200")


@dataclass(frozen=True)
class SynthCorpus:
    snapshots: tuple[AccountSnapshot, ...]
    labels: tuple[LabelRecord, ...]
    planted_credulous_ids: tuple[str, ...]


def _latents(cfg: SynthConfig, is_bot: bool, credulous: bool, rng) -> dict[str, float]:
    shift = cfg.separation / np.sqrt(len(_DIMS))
    tighten = _BOT_TIGHTEN * min(cfg.separation, _BOT_TIGHTEN_SPAN) / _BOT_TIGHTEN_SPAN
    cred_tighten = (
        _CREDULOUS_TIGHTEN
        * min(cfg.credulous_separation, _CREDULOUS_TIGHTEN_SPAN)
        / _CREDULOUS_TIGHTEN_SPAN
    )
    out = {}
    for name, (mean, scale, direction) in _ARCHETYPE.items():
        mu, sigma = mean, scale
        if is_bot:
            mu += direction * shift * scale
            sigma *= 1.0 - tighten
        elif credulous and name in _CREDULOUS_DIMS:
            mu += cfg.credulous_separation * scale
            sigma *= 1.0 - cred_tighten
        out[name] = mu + sigma * rng.standard_normal()
    return out


def _screen_name(rng) -> str:
    letters = rng.integers(6, 13)
    digits = rng.integers(0, 5)
    chars = [string.ascii_lowercase[i] for i in rng.integers(0, 26, size=letters)]
    chars += [string.digits[i] for i in rng.integers(0, 10, size=digits)]
    return "".join(chars)


def _description(length: int) -> str:
    if length <= 0:
        return ""
    repeats = length // len(_FILLER) + 1
    return (_FILLER * repeats)[:length]


def _tweets(cfg: SynthConfig, created_at: datetime, age_days: int, p_retweet: float,
            active_hours: np.ndarray, rng) -> tuple[TweetDigest, ...]:
    lo, hi = cfg.tweets_per_account
    n = int(rng.integers(lo, hi + 1))
    tweets = []
    for _ in range(n):
        day = int(rng.integers(0, max(age_days - 1, 1)))
        hour = int(active_hours[rng.integers(0, len(active_hours))])
        base = created_at + timedelta(days=day + 1)
        posted = base.replace(
            hour=hour,
            minute=int(rng.integers(0, 60)),
            second=int(rng.integers(0, 60)),
            microsecond=0,
        )
        tweets.append(
            TweetDigest(
                posted_at=posted,
                is_retweet=bool(rng.random() < p_retweet),
                is_reply=bool(rng.random() < 0.15),
                hashtag_count=int(rng.poisson(1.0)),
                url_count=int(rng.poisson(0.5)),
                mention_count=int(rng.poisson(0.8)),
            )
        )
    return tuple(tweets)


def _build_account(
    cfg: SynthConfig,
    account_id: str,
    is_bot: bool,
    credulous: bool,
    friends_count: int,
    friend_ids: tuple[str, ...],
    rng,
) -> AccountSnapshot:
    latent = _latents(cfg, is_bot, credulous, rng)
    age_days = max(int(round(latent["age_days"])), 2)
    created_at = cfg.capture_time - timedelta(days=age_days)
    desc_len = int(np.clip(round(latent["description_length"]), 0, 160))
    n_active = int(np.clip(round(latent["active_hours"]), 1, 24))
    active_hours = rng.choice(24, size=n_active, replace=False)
    p_retweet = 1.0 / (1.0 + np.exp(-latent["retweet_logit"]))
    tweets = _tweets(cfg, created_at, age_days, p_retweet, active_hours, rng)
    mentions = min(sum(t.mention_count for t in tweets), 100)
    return AccountSnapshot(
        account_id=account_id,
        screen_name=_screen_name(rng),
        created_at=created_at,
        statuses_count=max(int(round(latent["statuses"])), len(tweets)),
        followers_count=max(int(round(latent["followers"])), 0),
        friends_count=friends_count,
        favourites_count=max(int(round(latent["favourites"])), 0),
        listed_count=max(int(round(latent["listed"])), 0),
        verified=bool(rng.random() < 0.05),
        geo_enabled=bool(rng.random() < 0.3),
        default_profile=bool(rng.random() < 0.25),
        default_profile_image=bool(rng.random() < 0.08),
        description=_description(desc_len),
        profile_url_present=bool(rng.random() < 0.4),
        tweets=tweets,
        mentions_collected=mentions,
        friend_ids=friend_ids,
        external_scores=None,
    )


def generate_corpus(cfg: SynthConfig) -> SynthCorpus:
    """Generate snapshots, bot/human labels, and the planted credulous ids.

    Humans are emitted first, then bots. The first
    floor(credulous_fraction * n_humans) humans are planted credulous;
    their friend lists draw bots with probability bot_density_credulous
    versus bot_density_normal for everyone else.
    """
    human_ids = [f"h{i:06d}" for i in range(cfg.n_humans)]
    bot_ids = [f"b{i:06d}" for i in range(cfg.n_bots)]
    n_planted = int(np.floor(cfg.credulous_fraction * cfg.n_humans))
    planted = set(human_ids[:n_planted])

    lo, hi = cfg.friends_per_human
    snapshots = []
    for i, account_id in enumerate(human_ids):
        rng = np.random.default_rng([cfg.seed, 0, i])
        credulous = account_id in planted
        density = cfg.bot_density_credulous if credulous else cfg.bot_density_normal
        n_friends = int(rng.integers(lo, hi + 1))
        n_bot_friends = int(rng.binomial(n_friends, density))
        n_human_friends = n_friends - n_bot_friends
        if n_bot_friends > cfg.n_bots or n_human_friends > cfg.n_humans - 1:
            raise SynthError(
                "infeasible_friend_counts",
                f"{account_id} drew {n_friends} friends "
                f"({n_bot_friends} bots) from too small a population",
            )
        bot_picks = rng.choice(cfg.n_bots, size=n_bot_friends, replace=False)
        human_picks = rng.choice(cfg.n_humans - 1, size=n_human_friends, replace=False)
        friend_ids = [bot_ids[j] for j in bot_picks]
        friend_ids += [human_ids[j if j < i else j + 1] for j in human_picks]
        order = rng.permutation(len(friend_ids))
        friend_ids = tuple(friend_ids[j] for j in order)
        snapshots.append(
            _build_account(cfg, account_id, False, credulous, n_friends, friend_ids, rng)
        )
    for i, account_id in enumerate(bot_ids):
        rng = np.random.default_rng([cfg.seed, 1, i])
        friends_count = int(rng.integers(lo, hi + 1))
        snapshots.append(
            _build_account(cfg, account_id, True, False, friends_count, (), rng)
        )

    labels = tuple(
        [LabelRecord(aid, ClassLabel.NEGATIVE) for aid in human_ids]
        + [LabelRecord(aid, ClassLabel.POSITIVE) for aid in bot_ids]
    )
    return SynthCorpus(tuple(snapshots), labels, tuple(human_ids[:n_planted]))


def write_corpus(corpus: SynthCorpus, outdir: str | Path, capture_time: datetime) -> CorpusManifest:
    """Write snapshots.jsonl, labels.csv, planted_credulous.csv, and the
    corpus.json manifest into ``outdir``; returns the manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    snapshot_path = outdir / "snapshots.jsonl"
    labels_path = outdir / "labels.csv"
    with snapshot_path.open("w", encoding="utf-8", newline="") as fh:
        for s in corpus.snapshots:
            fh.write(snapshot_to_json(s) + "\n")
    write_labels(
        labels_path,
        corpus.labels,
        {ClassLabel.POSITIVE: "bot", ClassLabel.NEGATIVE: "human"},
    )
    planted_path = outdir / "planted_credulous.csv"
    with planted_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("account_id\n")
        for aid in corpus.planted_credulous_ids:
            fh.write(aid + "\n")
    manifest = CorpusManifest(
        snapshot_path=snapshot_path, labels_path=labels_path, capture_time=capture_time
    )
    save_manifest(manifest, outdir / "corpus.json")
    return manifest
