"""Offline pipeline for social-bot detection and credulous-user
classification: feature extraction from account snapshots, five supervised
learners, stratified cross-validation, bot-ratio ground truth, and balanced
under-sampling training, all seed-deterministic."""

from .credulity import (
    CredulityReport,
    CredulityRule,
    FoldPlan,
    FriendBotLabels,
    GroundTruth,
    GroundTruthRecord,
    bot_ratio,
    build_credulity_dataset,
    derive_ground_truth,
    label_friends,
    plan_undersampling_folds,
    train_credulous,
)
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    FoldAssignment,
    auc_roc,
    cross_validate,
    grid_search,
    metrics_from_confusion,
    stratified_folds,
)
from .features import (
    FeatureSetId,
    ImputationPolicy,
    ImputeStrategy,
    build_dataset,
    default_policy,
    extract,
    extract_all,
    extract_botometer_plus,
    extract_class_a,
    fit_imputation,
    schema_for,
    standardize,
    write_feature_matrix,
)
from .ingest import (
    CorpusManifest,
    IngestResult,
    JoinResult,
    LabelRecord,
    filter_eligible_humans,
    join_labels,
    load_labels,
    load_manifest,
    load_snapshots,
)
from .learners import (
    Algorithm,
    LearnerSpec,
    TrainedModel,
    fit,
    fit_knn,
    fit_naive_bayes,
    fit_one_r,
    fit_random_forest,
    fit_rep_tree,
    load_model,
    save_model,
)
from .synth import SynthConfig, SynthCorpus, generate_corpus, write_corpus
from .types import (
    AccountSnapshot,
    ClassLabel,
    Dataset,
    ExternalScores,
    FeatureSchema,
    FeatureVector,
    LabeledInstance,
    TweetDigest,
    dataset_class_counts,
    validate_snapshot,
)

__version__ = "0.1.0"
