"""Gaussian naive Bayes with per-class feature means/variances and priors."""
from __future__ import annotations

import numpy as np

from ..types import Dataset
from .base import Algorithm, LearnerSpec, TrainedModel, require_two_classes


class NaiveBayesModel(TrainedModel):
    algorithm = Algorithm.NAIVE_BAYES

    def __init__(
        self,
        spec: LearnerSpec,
        schema_id: str,
        feature_names: tuple[str, ...],
        log_prior_pos: float,
        log_prior_neg: float,
        means: np.ndarray,  # (2, d): row 0 = NEGATIVE, row 1 = POSITIVE
        variances: np.ndarray,
    ):
        super().__init__(spec, schema_id, feature_names)
        self.log_prior_pos = log_prior_pos
        self.log_prior_neg = log_prior_neg
        self.means = means
        self.variances = variances

    def _log_likelihood(self, X: np.ndarray, cls: int) -> np.ndarray:
        mu = self.means[cls]
        var = self.variances[cls]
        return (-0.5 * (np.log(2.0 * np.pi * var) + (X - mu) ** 2 / var)).sum(axis=1)

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        lp_pos = self.log_prior_pos + self._log_likelihood(X, 1)
        lp_neg = self.log_prior_neg + self._log_likelihood(X, 0)
        # posterior of POSITIVE, computed stably in log space
        return np.exp(lp_pos - np.logaddexp(lp_pos, lp_neg))

    def payload(self) -> dict:
        return {
            "log_prior_pos": self.log_prior_pos,
            "log_prior_neg": self.log_prior_neg,
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_payload(cls, spec, schema_id, feature_names, payload) -> "NaiveBayesModel":
        return cls(
            spec,
            schema_id,
            feature_names,
            log_prior_pos=float(payload["log_prior_pos"]),
            log_prior_neg=float(payload["log_prior_neg"]),
            means=np.asarray(payload["means"], dtype=np.float64),
            variances=np.asarray(payload["variances"], dtype=np.float64),
        )


def fit_naive_bayes(
    d: Dataset, variance_floor: float = 1e-9, spec: LearnerSpec | None = None
) -> NaiveBayesModel:
    """Fit per-class Gaussians. Variances are clamped to ``variance_floor``
    so constant features stay harmless instead of producing infinities."""
    if spec is None:
        spec = LearnerSpec(Algorithm.NAIVE_BAYES, {"variance_floor": variance_floor})
    X = d.matrix()
    y = d.labels01()
    require_two_classes(y)
    means = np.zeros((2, X.shape[1]))
    variances = np.zeros((2, X.shape[1]))
    for cls in (0, 1):
        rows = X[y == cls]
        means[cls] = rows.mean(axis=0)
        variances[cls] = np.maximum(rows.var(axis=0), variance_floor)
    n_pos = int(y.sum())
    return NaiveBayesModel(
        spec,
        d.schema.schema_id,
        d.schema.feature_names,
        log_prior_pos=float(np.log(n_pos / len(y))),
        log_prior_neg=float(np.log((len(y) - n_pos) / len(y))),
        means=means,
        variances=variances,
    )
