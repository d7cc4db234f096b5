"""Reading corpora from disk: JSON-lines snapshots plus a CSV label file.

The snapshot file holds one JSON object per line with exactly the
AccountSnapshot field names; timestamps are RFC 3339. Malformed or invalid
lines are rejected with a per-line reason, never aborting the load. The
label file is ``account_id,label`` with label in {bot, human} for the bot
task or {credulous, not_credulous} for the credulity task.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from .errors import ConfigError, IngestError
from .types import (
    AccountSnapshot,
    ClassLabel,
    ExternalScores,
    TweetDigest,
    validate_snapshot,
)

BOT_TASK_LABELS = {"bot": ClassLabel.POSITIVE, "human": ClassLabel.NEGATIVE}
CREDULITY_TASK_LABELS = {
    "credulous": ClassLabel.POSITIVE,
    "not_credulous": ClassLabel.NEGATIVE,
}


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no timezone")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class CorpusManifest:
    """Points at a corpus on disk and declares when it was captured."""

    snapshot_path: Path
    labels_path: Optional[Path]
    capture_time: datetime


def load_manifest(path: str | Path) -> CorpusManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise IngestError("manifest_unreadable", str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise IngestError("manifest_malformed", f"{path}: {exc}") from exc
    base = path.parent
    snapshot_path = base / obj["snapshot_path"]
    labels_path = base / obj["labels_path"] if obj.get("labels_path") else None
    manifest = CorpusManifest(
        snapshot_path=snapshot_path,
        labels_path=labels_path,
        capture_time=parse_rfc3339(obj["capture_time"]),
    )
    if not manifest.snapshot_path.exists():
        raise IngestError("missing_snapshot_file", str(manifest.snapshot_path))
    if manifest.labels_path is not None and not manifest.labels_path.exists():
        raise IngestError("missing_labels_file", str(manifest.labels_path))
    return manifest


def save_manifest(manifest: CorpusManifest, path: str | Path) -> None:
    """Write a manifest; stored paths are relative to the manifest file."""
    path = Path(path)
    base = path.parent
    obj = {
        "snapshot_path": manifest.snapshot_path.name
        if manifest.snapshot_path.parent == base
        else str(manifest.snapshot_path),
        "labels_path": (
            manifest.labels_path.name
            if manifest.labels_path is not None and manifest.labels_path.parent == base
            else (str(manifest.labels_path) if manifest.labels_path else None)
        ),
        "capture_time": format_rfc3339(manifest.capture_time),
    }
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class LabelRecord:
    account_id: str
    label: ClassLabel


# --- snapshot (de)serialization ----------------------------------------------

_BOOL_FIELDS = (
    "verified",
    "geo_enabled",
    "default_profile",
    "default_profile_image",
    "profile_url_present",
)
_INT_FIELDS = (
    "statuses_count",
    "followers_count",
    "friends_count",
    "favourites_count",
    "listed_count",
    "mentions_collected",
)


def snapshot_to_obj(s: AccountSnapshot) -> dict:
    obj: dict = {
        "account_id": s.account_id,
        "screen_name": s.screen_name,
        "created_at": format_rfc3339(s.created_at),
        "description": s.description,
        "tweets": [
            {
                "posted_at": format_rfc3339(t.posted_at),
                "is_retweet": t.is_retweet,
                "is_reply": t.is_reply,
                "hashtag_count": t.hashtag_count,
                "url_count": t.url_count,
                "mention_count": t.mention_count,
            }
            for t in s.tweets
        ],
        "mentions_collected": s.mentions_collected,
        "friend_ids": list(s.friend_ids),
    }
    for name in _INT_FIELDS:
        obj[name] = getattr(s, name)
    for name in _BOOL_FIELDS:
        obj[name] = getattr(s, name)
    if s.external_scores is not None:
        obj["external_scores"] = {
            "cap": s.external_scores.cap,
            "score_english": s.external_scores.score_english,
            "score_universal": s.external_scores.score_universal,
        }
    return obj


def snapshot_to_json(s: AccountSnapshot) -> str:
    return json.dumps(snapshot_to_obj(s), sort_keys=True, separators=(",", ":"))


def snapshot_from_obj(obj: dict) -> AccountSnapshot:
    """Build a snapshot from a parsed JSON object; raises on shape errors."""
    tweets = tuple(
        TweetDigest(
            posted_at=parse_rfc3339(t["posted_at"]),
            is_retweet=bool(t["is_retweet"]),
            is_reply=bool(t["is_reply"]),
            hashtag_count=int(t["hashtag_count"]),
            url_count=int(t["url_count"]),
            mention_count=int(t["mention_count"]),
        )
        for t in obj["tweets"]
    )
    ext = None
    if obj.get("external_scores") is not None:
        raw = obj["external_scores"]
        ext = ExternalScores(
            cap=None if raw.get("cap") is None else float(raw["cap"]),
            score_english=(
                None if raw.get("score_english") is None else float(raw["score_english"])
            ),
            score_universal=(
                None if raw.get("score_universal") is None else float(raw["score_universal"])
            ),
        )
    return AccountSnapshot(
        account_id=str(obj["account_id"]),
        screen_name=str(obj["screen_name"]),
        created_at=parse_rfc3339(obj["created_at"]),
        statuses_count=int(obj["statuses_count"]),
        followers_count=int(obj["followers_count"]),
        friends_count=int(obj["friends_count"]),
        favourites_count=int(obj["favourites_count"]),
        listed_count=int(obj["listed_count"]),
        verified=bool(obj["verified"]),
        geo_enabled=bool(obj["geo_enabled"]),
        default_profile=bool(obj["default_profile"]),
        default_profile_image=bool(obj["default_profile_image"]),
        description=str(obj["description"]),
        profile_url_present=bool(obj["profile_url_present"]),
        tweets=tweets,
        mentions_collected=int(obj["mentions_collected"]),
        friend_ids=tuple(str(fid) for fid in obj["friend_ids"]),
        external_scores=ext,
    )


# --- loading -----------------------------------------------------------------


@dataclass(frozen=True)
class Rejection:
    line_number: int
    reasons: tuple[str, ...]


@dataclass(frozen=True)
class IngestResult:
    snapshots: tuple[AccountSnapshot, ...]
    rejections: tuple[Rejection, ...]

    def summary(self) -> dict:
        return {
            "accepted": len(self.snapshots),
            "rejected": len(self.rejections),
            "rejections": [
                {"line": r.line_number, "reasons": list(r.reasons)}
                for r in self.rejections
            ],
        }


def load_snapshots(manifest: CorpusManifest) -> IngestResult:
    """Load every valid snapshot from the manifest's snapshot file.

    Returned snapshots all pass :func:`validate_snapshot` against the
    manifest's capture time; failing records become per-line rejections.
    An unreadable file is fatal.
    """
    try:
        text = manifest.snapshot_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError("snapshot_file_unreadable", str(exc)) from exc

    snapshots: list[AccountSnapshot] = []
    rejections: list[Rejection] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            rejections.append(Rejection(line_number, ("malformed_json",)))
            continue
        try:
            snapshot = snapshot_from_obj(obj)
        except KeyError as exc:
            rejections.append(Rejection(line_number, (f"missing_field:{exc.args[0]}",)))
            continue
        except (TypeError, ValueError):
            rejections.append(Rejection(line_number, ("invalid_field",)))
            continue
        violations = validate_snapshot(snapshot, manifest.capture_time)
        if violations:
            rejections.append(Rejection(line_number, tuple(violations)))
        else:
            snapshots.append(snapshot)
    return IngestResult(tuple(snapshots), tuple(rejections))


def load_labels(path: str | Path) -> list[LabelRecord]:
    """Read a label CSV. The vocabulary (bot task or credulity task) is
    detected from the values; mixing the two is a fatal consistency error."""
    path = Path(path)
    try:
        fh = path.open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError("labels_file_unreadable", str(exc)) from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["account_id", "label"]:
            raise IngestError("labels_header", f"expected 'account_id,label' in {path}")
        records = []
        vocabularies = set()
        for row in reader:
            if not row:
                continue
            if len(row) != 2 or not row[0]:
                raise IngestError("labels_malformed_row", f"{path}: {row!r}")
            account_id, raw = row
            if raw in BOT_TASK_LABELS:
                vocabularies.add("bot_task")
                label = BOT_TASK_LABELS[raw]
            elif raw in CREDULITY_TASK_LABELS:
                vocabularies.add("credulity_task")
                label = CREDULITY_TASK_LABELS[raw]
            else:
                raise IngestError("labels_unknown_value", f"{path}: {raw!r}")
            records.append(LabelRecord(account_id, label))
        if len(vocabularies) > 1:
            raise IngestError("mixed_label_vocabulary", str(path))
    return records


def write_labels(
    path: str | Path, records: Iterable[LabelRecord], vocabulary: dict[ClassLabel, str]
) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["account_id", "label"])
        for rec in records:
            writer.writerow([rec.account_id, vocabulary[rec.label]])


@dataclass(frozen=True)
class JoinResult:
    pairs: tuple[tuple[AccountSnapshot, ClassLabel], ...]
    unlabeled_snapshot_ids: tuple[str, ...]
    unmatched_label_ids: tuple[str, ...]

    def summary(self) -> dict:
        return {
            "joined": len(self.pairs),
            "unlabeled_snapshots": len(self.unlabeled_snapshot_ids),
            "unmatched_labels": len(self.unmatched_label_ids),
        }


def join_labels(
    snapshots: Iterable[AccountSnapshot], labels: Iterable[LabelRecord]
) -> JoinResult:
    """Inner-join snapshots with labels on account_id.

    Ids present on only one side are reported, not dropped silently.
    A duplicated account_id in the labels is a fatal consistency error.
    """
    label_map: dict[str, ClassLabel] = {}
    for rec in labels:
        if rec.account_id in label_map:
            raise IngestError("duplicate_label_id", rec.account_id)
        label_map[rec.account_id] = rec.label
    pairs = []
    unlabeled = []
    seen = set()
    for s in snapshots:
        seen.add(s.account_id)
        if s.account_id in label_map:
            pairs.append((s, label_map[s.account_id]))
        else:
            unlabeled.append(s.account_id)
    unmatched = tuple(aid for aid in label_map if aid not in seen)
    return JoinResult(tuple(pairs), tuple(unlabeled), unmatched)


def filter_eligible_humans(
    pairs: Iterable[tuple[AccountSnapshot, ClassLabel]], max_friends: int = 400
) -> list[AccountSnapshot]:
    """Human-labeled accounts with 1 <= friends_count <= max_friends.

    Zero-friend accounts are excluded because the downstream bot ratio is
    undefined for them. Input order is preserved.
    """
    if max_friends < 1:
        raise ConfigError("max_friends_out_of_range", "max_friends must be >= 1")
    return [
        s
        for s, label in pairs
        if label is ClassLabel.NEGATIVE and 1 <= s.friends_count <= max_friends
    ]
