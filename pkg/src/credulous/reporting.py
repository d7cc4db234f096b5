"""Report rendering and output bookkeeping.

Evaluation tables carry one row per learner per feature set with exactly
the columns accuracy, precision, recall, F1, AUC. Reports and the output
manifest are written as canonical JSON so identical runs produce identical
bytes.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Mapping, Sequence

from .features import FeatureSetId
from .learners import Algorithm

METRIC_COLUMNS = ("accuracy", "precision", "recall", "F1", "AUC")
TABLE_COLUMNS = ("feature_set", "alg") + METRIC_COLUMNS

_METRIC_KEYS = {"accuracy": "accuracy", "precision": "precision", "recall": "recall",
                "F1": "f1", "AUC": "auc"}

FEATURE_SET_DISPLAY = {
    FeatureSetId.ALL_FEATURES: "ALL_features",
    FeatureSetId.BOTOMETER_PLUS: "Botometer+",
    FeatureSetId.CLASS_A_MINUS: "ClassA-",
}

ALGORITHM_DISPLAY = {
    Algorithm.ONE_R: "1R",
    Algorithm.NAIVE_BAYES: "NB",
    Algorithm.KNN: "IBk",
    Algorithm.REP_TREE: "REP",
    Algorithm.RANDOM_FOREST: "RF",
}


def render_metrics_table(rows: Sequence[tuple[str, str, Mapping[str, float]]]) -> str:
    """Aligned text table; ``rows`` are (feature_set, alg, metrics) triples
    where metrics holds the lowercase metric keys."""
    cells = [list(TABLE_COLUMNS)]
    for feature_set, alg, metrics in rows:
        cells.append(
            [feature_set, alg]
            + [
                f"{metrics[_METRIC_KEYS[c]]:.2f}"
                for c in METRIC_COLUMNS
            ]
        )
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_COLUMNS))]
    lines = []
    for row in cells:
        parts = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
        parts += [row[i].rjust(widths[i]) for i in range(2, len(TABLE_COLUMNS))]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def save_json(path: str | Path, obj) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def update_manifest(outdir: str | Path, new_files: Sequence[Path]) -> Path:
    """Record every produced file and its content hash in
    ``<outdir>/manifest.json`` (paths relative to outdir)."""
    outdir = Path(outdir)
    manifest_path = outdir / "manifest.json"
    entries: dict[str, str] = {}
    if manifest_path.exists():
        entries = json.loads(manifest_path.read_text(encoding="utf-8"))["files"]
    for path in new_files:
        entries[path.relative_to(outdir).as_posix()] = _sha256(path)
    save_json(manifest_path, {"files": dict(sorted(entries.items()))})
    return manifest_path
