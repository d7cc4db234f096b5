"""Command-line pipeline driver.

Subcommands: synth, ingest-check, extract, train-bot, label-friends,
ground-truth, train-credulous, report. One JSON config file describes a
run; a handful of flags override it. All outputs land under the output
directory, which carries a manifest of every produced file and its hash.
Exit codes: 0 success, 1 runtime error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import credulity as cred
from . import evaluation, features, ingest, learners, reporting, synth
from .errors import ConfigError, CredulityError, PipelineError
from .features import FeatureSetId
from .learners import Algorithm, LearnerSpec
from .types import ClassLabel

BOT_VOCAB = {ClassLabel.POSITIVE: "bot", ClassLabel.NEGATIVE: "human"}
CREDULITY_VOCAB = {ClassLabel.POSITIVE: "credulous", ClassLabel.NEGATIVE: "not_credulous"}


@dataclass
class RunConfig:
    outdir: Path
    seed: int
    workers: int
    k: int
    feature_sets: list[FeatureSetId]
    learner_specs: list[LearnerSpec]
    rule: cred.CredulityRule
    corpus_path: Optional[Path]
    synth_config: Optional[synth.SynthConfig]
    tune_grid: Optional[dict]

    def corpus_manifest(self) -> ingest.CorpusManifest:
        path = self.corpus_path or self.outdir / "corpus.json"
        if not path.exists():
            raise ConfigError("missing_corpus", f"corpus manifest not found: {path}")
        return ingest.load_manifest(path)


def load_config(path: Path, overrides: argparse.Namespace) -> RunConfig:
    """Parse and validate the run configuration before any work starts.

    Flag overrides beat config values; the environment is never consulted.
    Relative paths are resolved against the config file's directory.
    """
    try:
        obj = reporting.load_json(path)
    except OSError as exc:
        raise ConfigError("config_unreadable", str(exc)) from exc
    except ValueError as exc:
        raise ConfigError("config_malformed", f"{path}: {exc}") from exc
    base = path.parent

    def resolve(p: str | None) -> Optional[Path]:
        if p is None:
            return None
        p = Path(p)
        return p if p.is_absolute() else base / p

    outdir = resolve(overrides.outdir or obj.get("outdir"))
    if outdir is None:
        raise ConfigError("missing_outdir", "config needs an 'outdir'")
    seed = overrides.seed if overrides.seed is not None else int(obj.get("seed", 0))
    workers = (
        overrides.workers if overrides.workers is not None else int(obj.get("workers", 1))
    )
    if workers < 1:
        raise ConfigError("workers_out_of_range", "workers must be >= 1")
    k = overrides.k if overrides.k is not None else int(obj.get("k", 10))

    raw_sets = obj.get("feature_set", "all_features")
    if isinstance(raw_sets, str):
        raw_sets = [raw_sets]
    try:
        feature_sets = [FeatureSetId(v) for v in raw_sets]
    except ValueError as exc:
        raise ConfigError("unknown_feature_set", str(exc)) from exc

    learner_specs = []
    for entry in obj.get("learners", [{"algorithm": "random_forest"}]):
        try:
            algorithm = Algorithm(entry["algorithm"])
        except (KeyError, ValueError) as exc:
            raise ConfigError("unknown_algorithm", str(exc)) from exc
        learner_specs.append(
            LearnerSpec(
                algorithm,
                entry.get("hyperparameters", {}),
                seed=int(entry.get("seed", seed)),
            )
        )
    if not learner_specs:
        raise ConfigError("no_learners", "config lists no learners")

    rule_obj = obj.get("credulity_rule", {})
    try:
        rule = cred.CredulityRule(
            min_bot_ratio=float(rule_obj.get("min_bot_ratio", 0.1)),
            min_bot_count=int(rule_obj.get("min_bot_count", 0)),
            max_friends=int(rule_obj.get("max_friends", 400)),
        )
    except CredulityError as exc:
        raise ConfigError(exc.code, str(exc)) from exc

    synth_config = None
    if "synth" in obj:
        s = dict(obj["synth"])
        if "capture_time" in s:
            s["capture_time"] = ingest.parse_rfc3339(s["capture_time"])
        for pair_key in ("friends_per_human", "tweets_per_account"):
            if pair_key in s:
                s[pair_key] = tuple(s[pair_key])
        s.setdefault("seed", seed)
        synth_config = synth.SynthConfig(**s)

    return RunConfig(
        outdir=outdir,
        seed=seed,
        workers=workers,
        k=k,
        feature_sets=feature_sets,
        learner_specs=learner_specs,
        rule=rule,
        corpus_path=resolve(overrides.corpus or obj.get("corpus")),
        synth_config=synth_config,
        tune_grid=obj.get("tune_grid"),
    )


def _load_joined(cfg: RunConfig):
    manifest = cfg.corpus_manifest()
    result = ingest.load_snapshots(manifest)
    if manifest.labels_path is None:
        raise ConfigError("missing_labels", "this command needs a labels file")
    labels = ingest.load_labels(manifest.labels_path)
    join = ingest.join_labels(result.snapshots, labels)
    return manifest, result, join


# --- subcommands ---------------------------------------------------------------


def cmd_synth(cfg: RunConfig) -> list[Path]:
    if cfg.synth_config is None:
        raise ConfigError("missing_synth_config", "config has no 'synth' section")
    corpus = synth.generate_corpus(cfg.synth_config)
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    synth.write_corpus(corpus, cfg.outdir, cfg.synth_config.capture_time)
    print(
        f"wrote corpus: {len(corpus.snapshots)} snapshots, "
        f"{len(corpus.planted_credulous_ids)} planted credulous"
    )
    return [
        cfg.outdir / "snapshots.jsonl",
        cfg.outdir / "labels.csv",
        cfg.outdir / "planted_credulous.csv",
        cfg.outdir / "corpus.json",
    ]


def cmd_ingest_check(cfg: RunConfig) -> list[Path]:
    manifest, result, join = _load_joined(cfg)
    report = {
        "snapshots": result.summary(),
        "join": join.summary(),
        "capture_time": ingest.format_rfc3339(manifest.capture_time),
    }
    out = cfg.outdir / "ingest_report.json"
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    reporting.save_json(out, report)
    print(
        f"accepted {report['snapshots']['accepted']} snapshots, "
        f"rejected {report['snapshots']['rejected']}, joined {report['join']['joined']}"
    )
    return [out]


def cmd_extract(cfg: RunConfig) -> list[Path]:
    manifest, result, join = _load_joined(cfg)
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for feature_set in cfg.feature_sets:
        dataset = features.build_dataset(join.pairs, feature_set, manifest.capture_time)
        out = cfg.outdir / f"features_{feature_set.value}.csv"
        features.write_feature_matrix(out, dataset, label_names=BOT_VOCAB)
        written.append(out)
        print(f"wrote {out.name}: {len(dataset)} rows")
    return written


def cmd_train_bot(cfg: RunConfig) -> list[Path]:
    manifest, result, join = _load_joined(cfg)
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    table_rows = []
    best = None  # (accuracy, feature_set, spec, report)
    for feature_set in cfg.feature_sets:
        dataset = features.build_dataset(join.pairs, feature_set, manifest.capture_time)
        for spec in cfg.learner_specs:
            report = evaluation.cross_validate(spec, dataset, cfg.k, cfg.seed, cfg.workers)
            rows.append(
                {
                    "feature_set": feature_set.value,
                    "algorithm": spec.algorithm.value,
                    "report": report.to_obj(),
                }
            )
            table_rows.append(
                (
                    reporting.FEATURE_SET_DISPLAY[feature_set],
                    reporting.ALGORITHM_DISPLAY[spec.algorithm],
                    report.mean,
                )
            )
            if best is None or report.mean["accuracy"] > best[0]:
                best = (report.mean["accuracy"], feature_set, spec, report)

    accuracy, feature_set, spec, report = best
    tuned = {"applied": False}
    if cfg.tune_grid:
        dataset = features.build_dataset(join.pairs, feature_set, manifest.capture_time)
        params, tuned_report = evaluation.grid_search(
            spec.algorithm, cfg.tune_grid, dataset, cfg.k, cfg.seed, cfg.workers
        )
        spec = LearnerSpec(spec.algorithm, params, seed=spec.seed)
        tuned = {
            "applied": True,
            "hyperparameters": params,
            "report": tuned_report.to_obj(),
        }

    dataset = features.build_dataset(join.pairs, feature_set, manifest.capture_time)
    model = learners.fit(spec, dataset)
    model_path = cfg.outdir / "bot_model.json"
    learners.save_model(model, model_path)

    eval_obj = {
        "task": "bot_detection",
        "rows": rows,
        "winner": {
            "feature_set": feature_set.value,
            "algorithm": spec.algorithm.value,
            "hyperparameters": dict(spec.hyperparameters),
            "cv_accuracy": accuracy,
        },
        "tuning": tuned,
    }
    eval_path = cfg.outdir / "bot_eval.json"
    reporting.save_json(eval_path, eval_obj)
    table_path = cfg.outdir / "bot_eval_table.txt"
    table_path.write_text(reporting.render_metrics_table(table_rows), encoding="utf-8")
    print(reporting.render_metrics_table(table_rows), end="")
    print(f"winner: {spec.algorithm.value} on {feature_set.value} ({accuracy:.2f}%)")
    return [eval_path, table_path, model_path]


def _eligible_humans(cfg: RunConfig, result, join):
    return ingest.filter_eligible_humans(join.pairs, cfg.rule.max_friends)


def cmd_label_friends(cfg: RunConfig) -> list[Path]:
    manifest, result, join = _load_joined(cfg)
    model = learners.load_model(cfg.outdir / "bot_model.json")
    feature_set = FeatureSetId(model.schema_id)
    humans = _eligible_humans(cfg, result, join)
    wanted = set()
    for h in humans:
        wanted.update(h.friend_ids)
    friends = [s for s in result.snapshots if s.account_id in wanted]
    labels = cred.label_friends(
        model, humans, friends, feature_set, manifest.capture_time
    )
    out = cfg.outdir / "friend_labels.csv"
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["account_id", "friend_id", "label"])
        for h in humans:
            for fid, label in labels.labeled_friends(h.account_id).items():
                writer.writerow([h.account_id, fid, BOT_VOCAB[label]])
    print(f"labeled friends of {len(humans)} eligible humans ({len(friends)} friend snapshots)")
    return [out]


def _read_friend_labels(path: Path) -> cred.FriendBotLabels:
    by_account: dict[str, dict[str, ClassLabel]] = {}
    reverse = {v: k for k, v in BOT_VOCAB.items()}
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["account_id", "friend_id", "label"]:
            raise ConfigError("friend_labels_header", str(path))
        for account_id, friend_id, raw in reader:
            by_account.setdefault(account_id, {})[friend_id] = reverse[raw]
    return cred.FriendBotLabels(by_account)


def cmd_ground_truth(cfg: RunConfig) -> list[Path]:
    manifest, result, join = _load_joined(cfg)
    labels = _read_friend_labels(cfg.outdir / "friend_labels.csv")
    humans = _eligible_humans(cfg, result, join)
    with_friends = [h for h in humans if labels.labeled_friends(h.account_id)]
    skipped = len(humans) - len(with_friends)
    truth = cred.derive_ground_truth(with_friends, labels, cfg.rule)
    n_credulous = len(truth.credulous_ids())
    if n_credulous == 0:
        raise CredulityError(
            "empty_credulous_class",
            f"no account satisfies rule (min_bot_ratio={cfg.rule.min_bot_ratio}, "
            f"min_bot_count={cfg.rule.min_bot_count}, max_friends={cfg.rule.max_friends})",
        )
    out = cfg.outdir / "ground_truth.csv"
    with out.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["account_id", "bot_ratio", "bot_count", "friend_count", "label"])
        for r in truth.records:
            writer.writerow(
                [r.account_id, repr(r.bot_ratio), r.bot_count, r.friend_count,
                 CREDULITY_VOCAB[r.label]]
            )
    print(
        f"ground truth: {n_credulous} credulous / {len(truth.records)} accounts"
        + (f" ({skipped} without labeled friends skipped)" if skipped else "")
    )
    return [out]


def _read_ground_truth(path: Path) -> list[tuple[str, ClassLabel]]:
    reverse = {v: k for k, v in CREDULITY_VOCAB.items()}
    out = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["account_id", "bot_ratio", "bot_count", "friend_count", "label"]:
            raise ConfigError("ground_truth_header", str(path))
        for row in reader:
            out.append((row[0], reverse[row[4]]))
    return out


def cmd_train_credulous(cfg: RunConfig) -> list[Path]:
    manifest, result, join = _load_joined(cfg)
    truth_rows = _read_ground_truth(cfg.outdir / "ground_truth.csv")
    if not any(label is ClassLabel.POSITIVE for _, label in truth_rows):
        raise CredulityError("empty_credulous_class", "ground truth has no credulous accounts")
    by_id = {s.account_id: s for s in result.snapshots}
    pairs = [(by_id[aid], label) for aid, label in truth_rows]
    rows = []
    table_rows = []
    for feature_set in cfg.feature_sets:
        dataset = features.build_dataset(pairs, feature_set, manifest.capture_time)
        plan = cred.plan_undersampling_folds(dataset, cfg.seed)
        for spec in cfg.learner_specs:
            report = cred.train_credulous(
                spec, dataset, plan, cfg.k, cfg.seed, cfg.workers
            )
            rows.append(
                {
                    "feature_set": feature_set.value,
                    "algorithm": spec.algorithm.value,
                    "report": report.to_obj(),
                }
            )
            table_rows.append(
                (
                    reporting.FEATURE_SET_DISPLAY[feature_set],
                    reporting.ALGORITHM_DISPLAY[spec.algorithm],
                    report.mean,
                )
            )
    eval_obj = {"task": "credulity_classification", "rows": rows}
    eval_path = cfg.outdir / "credulous_eval.json"
    reporting.save_json(eval_path, eval_obj)
    table_path = cfg.outdir / "credulous_eval_table.txt"
    table_path.write_text(reporting.render_metrics_table(table_rows), encoding="utf-8")
    print(reporting.render_metrics_table(table_rows), end="")
    return [eval_path, table_path]


def cmd_report(cfg: RunConfig) -> list[Path]:
    sections = []
    for name, title in (
        ("bot_eval.json", "bot detection"),
        ("credulous_eval.json", "credulous classification"),
    ):
        path = cfg.outdir / name
        if not path.exists():
            continue
        obj = reporting.load_json(path)
        table_rows = [
            (
                reporting.FEATURE_SET_DISPLAY[FeatureSetId(row["feature_set"])],
                reporting.ALGORITHM_DISPLAY[Algorithm(row["algorithm"])],
                row["report"]["mean"],
            )
            for row in obj["rows"]
        ]
        sections.append(f"# {title}\n" + reporting.render_metrics_table(table_rows))
    if not sections:
        raise ConfigError("no_reports", f"no evaluation reports under {cfg.outdir}")
    text = "\n".join(sections)
    out = cfg.outdir / "report.txt"
    out.write_text(text, encoding="utf-8")
    print(text, end="")
    return [out]


def run_credulous_chain(cfg: RunConfig) -> list[Path]:
    """The friend-labeling, ground-truth and balanced-training steps as one
    unit (what the three dedicated subcommands run in sequence)."""
    written = cmd_label_friends(cfg)
    written += cmd_ground_truth(cfg)
    written += cmd_train_credulous(cfg)
    return written


_COMMANDS = {
    "synth": cmd_synth,
    "ingest-check": cmd_ingest_check,
    "extract": cmd_extract,
    "train-bot": cmd_train_bot,
    "label-friends": cmd_label_friends,
    "ground-truth": cmd_ground_truth,
    "train-credulous": cmd_train_credulous,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credulous",
        description="Bot-detection and credulous-user classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="run config (JSON)")
        p.add_argument("--outdir", default=None, help="override output directory")
        p.add_argument("--seed", default=None, type=int, help="override seed")
        p.add_argument("--workers", default=None, type=int, help="cap parallel workers")
        p.add_argument("--corpus", default=None, help="override corpus manifest path")
        p.add_argument("--k", default=None, type=int, help="override fold count")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        written = _COMMANDS[args.command](cfg)
        if written:
            reporting.update_manifest(cfg.outdir, [Path(p) for p in written])
        return 0
    except ConfigError as exc:
        print(f"config error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except CredulityError as exc:
        if exc.code == "empty_credulous_class":
            print(f"config error [{exc.code}]: {exc}", file=sys.stderr)
            return 2
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
