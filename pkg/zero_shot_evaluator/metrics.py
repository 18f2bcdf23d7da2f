# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""
ROC/PR metrics, bootstrap intervals and loss-vs-performance regressions.

Scores are discrete (k / n_rollouts, 0 and 1 included), so the binormal fit
works on probit-transformed scores clamped to ``[eps, 1 - eps]`` with
``eps = 1 / (2 * n_rollouts + 2)`` and estimates each class by its sample
mean and standard deviation (ddof = 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import linregress, norm
from sklearn.metrics import average_precision_score, roc_auc_score, roc_curve

from zero_shot_evaluator.config import CI_LEVEL, MAX_REDRAWS, N_RESAMPLES, N_ROLLOUTS, EvaluationConfig
from zero_shot_evaluator.core import ScoredCohort, SingleClassError

logger = logging.getLogger(__name__)

CohortLike = Union[ScoredCohort, Tuple[Sequence[float], Sequence[int]]]
Metric = Callable[[CohortLike], float]


def _arrays(cohort: CohortLike) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(cohort, ScoredCohort):
        return cohort.arrays()
    scores, labels = cohort
    scores, labels = np.asarray(scores, dtype=float), np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors")
    return scores, labels


def _require_both_classes(labels: np.ndarray) -> None:
    pos = int(labels.sum())
    if pos == 0 or pos == labels.size:
        raise SingleClassError(f"need both classes, got {labels.size - pos} negatives and {pos} positives")


# ── ranking metrics ─────────────────────────────────────────────────────────
def empirical_auc(cohort: CohortLike) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) + P(tie) / 2."""
    scores, labels = _arrays(cohort)
    _require_both_classes(labels)
    return float(roc_auc_score(labels, scores))


def pr_auc(cohort: CohortLike) -> float:
    """Average precision; tied scores form one threshold.

    Raises:
        SingleClassError: Without positives.
    """
    scores, labels = _arrays(cohort)
    if labels.sum() == 0:
        raise SingleClassError("average precision needs at least one positive")
    return float(average_precision_score(labels, scores))


def roc_points(cohort: CohortLike) -> Tuple[np.ndarray, np.ndarray]:
    """Empirical ROC curve as (fpr, tpr)."""
    scores, labels = _arrays(cohort)
    _require_both_classes(labels)
    fpr, tpr, _ = roc_curve(labels, scores)
    return fpr, tpr


# ── binormal model ──────────────────────────────────────────────────────────
def binormal_auc(mu0: float, sigma0: float, mu1: float, sigma1: float) -> float:
    """Closed-form area under the unequal-variance binormal ROC."""
    return float(norm.cdf((mu1 - mu0) / np.hypot(sigma0, sigma1)))


@dataclass(frozen=True)
class BinormalRoc:
    """
    Class-conditional Gaussians on the probit scale.

    Attributes:
        mu0 (float): Mean of the negatives.
        sigma0 (float): Std of the negatives.
        mu1 (float): Mean of the positives.
        sigma1 (float): Std of the positives.
    """

    mu0: float
    sigma0: float
    mu1: float
    sigma1: float

    def __post_init__(self) -> None:
        if not (self.sigma0 > 0 and self.sigma1 > 0):
            raise ValueError(f"binormal stds must be positive, got {self.sigma0}, {self.sigma1}")

    @property
    def auc(self) -> float:
        return binormal_auc(self.mu0, self.sigma0, self.mu1, self.sigma1)

    def tpr(self, fpr: np.ndarray) -> np.ndarray:
        """Fitted true-positive rate at each false-positive rate."""
        fpr = np.clip(np.asarray(fpr, dtype=float), 1e-12, 1 - 1e-12)
        return norm.cdf((self.mu1 - self.mu0 + self.sigma0 * norm.ppf(fpr)) / self.sigma1)


def probit_scores(scores: np.ndarray, n_rollouts: int = N_ROLLOUTS) -> np.ndarray:
    eps = 1.0 / (2 * n_rollouts + 2)
    return norm.ppf(np.clip(scores, eps, 1.0 - eps))


def fit_binormal(cohort: CohortLike, n_rollouts: int = N_ROLLOUTS) -> BinormalRoc:
    """Moment fit of the binormal model.

    Raises:
        SingleClassError: If a class is empty.
        ValueError: If a class has fewer than 2 samples or zero spread after the transform.
    """
    scores, labels = _arrays(cohort)
    _require_both_classes(labels)
    z = probit_scores(scores, n_rollouts)
    z0, z1 = z[labels == 0], z[labels == 1]
    if z0.size < 2 or z1.size < 2:
        raise ValueError(f"binormal fit needs >= 2 samples per class, got {z0.size} and {z1.size}")
    s0, s1 = float(np.std(z0, ddof=1)), float(np.std(z1, ddof=1))
    if s0 <= 0 or s1 <= 0:
        raise ValueError("degenerate class: zero spread on the probit scale")
    return BinormalRoc(mu0=float(z0.mean()), sigma0=s0, mu1=float(z1.mean()), sigma1=s1)


def _roc_auc_quiet(cohort: CohortLike, n_rollouts: int) -> Tuple[float, bool]:
    try:
        return fit_binormal(cohort, n_rollouts).auc, True
    except SingleClassError:
        raise
    except ValueError:
        return empirical_auc(cohort), False


def roc_auc(cohort: CohortLike, n_rollouts: int = N_ROLLOUTS) -> float:
    """Binormal AUC, or the empirical AUC when the binormal fit is degenerate."""
    value, fitted = _roc_auc_quiet(cohort, n_rollouts)
    if not fitted:
        logger.warning("binormal fit degenerate; reporting empirical AUC %.4f", value)
    return value


# ── bootstrap ───────────────────────────────────────────────────────────────
def bootstrap_distribution(
    cohort: CohortLike,
    metric: Metric,
    n_resamples: int = N_RESAMPLES,
    seed: int = 0,
) -> np.ndarray:
    """Metric values over patient-level resamples with replacement.

    Resample ``i`` draws from its own child of ``SeedSequence(seed)``.
    Resamples with a single class are redrawn, at most `MAX_REDRAWS` times.

    Raises:
        SingleClassError: If the cohort itself, or a resample after all redraws,
            has a single class.
    """
    scores, labels = _arrays(cohort)
    if scores.size == 0:
        raise ValueError("bootstrap of an empty cohort")
    _require_both_classes(labels)
    out = np.empty(n_resamples, dtype=float)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(n_resamples)):
        rng = np.random.default_rng(child)
        for _ in range(MAX_REDRAWS + 1):
            idx = rng.integers(0, scores.size, size=scores.size)
            pos = int(labels[idx].sum())
            if 0 < pos < scores.size:
                break
        else:
            raise SingleClassError(f"resample {i} stayed single-class after {MAX_REDRAWS} redraws")
        out[i] = metric((scores[idx], labels[idx]))
    return out


def bootstrap_ci(
    cohort: CohortLike,
    metric: Metric,
    n_resamples: int = N_RESAMPLES,
    level: float = CI_LEVEL,
    seed: int = 0,
) -> Tuple[float, float]:
    """Percentile interval of ``metric``; identical for identical seeds."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    values = bootstrap_distribution(cohort, metric, n_resamples, seed)
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(values, [tail, 1.0 - tail])
    return float(lo), float(hi)


def cohort_metrics(
    cohort: ScoredCohort,
    config: Optional[EvaluationConfig] = None,
    n_rollouts: int = N_ROLLOUTS,
) -> dict:
    """ROC AUC and PR AUC of ``cohort`` with their bootstrap intervals.

    Resamples whose binormal fit is degenerate contribute their empirical AUC
    to the ROC interval; their count is logged at WARNING.
    """
    config = config or EvaluationConfig()
    fallbacks = 0

    def auc_metric(c: CohortLike) -> float:
        nonlocal fallbacks
        value, fitted = _roc_auc_quiet(c, n_rollouts)
        fallbacks += not fitted
        return value

    roc_lo, roc_hi = bootstrap_ci(cohort, auc_metric, config.n_resamples, config.level, config.seed)
    if fallbacks:
        logger.warning(
            "%s: %d of %d ROC resamples used the empirical AUC (degenerate binormal fit)",
            cohort.task, fallbacks, config.n_resamples,
        )
    pr_lo, pr_hi = bootstrap_ci(cohort, pr_auc, config.n_resamples, config.level, config.seed)
    return {
        "roc_auc": roc_auc(cohort, n_rollouts),
        "roc_auc_ci_lo": roc_lo,
        "roc_auc_ci_hi": roc_hi,
        "pr_auc": pr_auc(cohort),
        "pr_auc_ci_lo": pr_lo,
        "pr_auc_ci_hi": pr_hi,
    }


# ── regressions ─────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class RegressionFit:
    """Least-squares line ``metric = slope * ln(x) + intercept``."""

    slope: float
    intercept: float
    correlation: float
    n_points: int

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.slope * np.log(np.asarray(x, dtype=float)) + self.intercept


def _log_regression(xs: Sequence[float], ys: Sequence[float], what: str) -> RegressionFit:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise ValueError(f"{x.size} {what} values for {y.size} metric values")
    if x.size < 2:
        raise ValueError(f"regression needs >= 2 points, got {x.size}")
    if np.any(x <= 0):
        raise ValueError(f"{what} must be positive")
    fit = linregress(np.log(x), y)
    return RegressionFit(float(fit.slope), float(fit.intercept), float(fit.rvalue), int(x.size))


def loss_vs_metric_regression(losses: Sequence[float], values: Sequence[float]) -> RegressionFit:
    """Ordinary least squares of metric on ln(validation loss), with Pearson r."""
    return _log_regression(losses, values, "validation loss")


def size_vs_metric_regression(params: Sequence[float], values: Sequence[float]) -> RegressionFit:
    """Ordinary least squares of metric on ln(parameter count)."""
    return _log_regression(params, values, "parameter count")


__all__ = [
    "empirical_auc",
    "pr_auc",
    "roc_points",
    "binormal_auc",
    "BinormalRoc",
    "probit_scores",
    "fit_binormal",
    "roc_auc",
    "bootstrap_distribution",
    "bootstrap_ci",
    "cohort_metrics",
    "RegressionFit",
    "loss_vs_metric_regression",
    "size_vs_metric_regression",
]
