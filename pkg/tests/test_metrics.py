import itertools
import logging
import math

import numpy as np
import pytest
from scipy.stats import norm

from zero_shot_evaluator.config import EvaluationConfig
from zero_shot_evaluator.core import RiskEstimate, ScoredCohort, SingleClassError
from zero_shot_evaluator.metrics import (
    BinormalRoc,
    binormal_auc,
    bootstrap_ci,
    bootstrap_distribution,
    cohort_metrics,
    empirical_auc,
    fit_binormal,
    loss_vs_metric_regression,
    pr_auc,
    roc_auc,
    roc_points,
    size_vs_metric_regression,
)


def _pairwise_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p, q in itertools.product(pos, neg))
    return wins / (len(pos) * len(neg))


def _cohort(scores, labels, n_rollouts=20):
    cohort = ScoredCohort(task="icu_mortality")
    for i, (s, y) in enumerate(zip(scores, labels)):
        k = round(s * n_rollouts)
        cohort.add(f"P{i}", RiskEstimate(k / n_rollouts, k, n_rollouts), y)
    return cohort


def test_empirical_auc_hand_example():
    assert empirical_auc(([0.9, 0.4, 0.5, 0.1], [1, 1, 0, 0])) == pytest.approx(0.75)


@pytest.mark.parametrize("seed", range(6))
def test_empirical_auc_matches_pairwise_count(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    labels = np.zeros(n, dtype=int)
    labels[rng.choice(n, size=int(rng.integers(1, n)), replace=False)] = 1
    scores = rng.integers(0, 5, size=n) / 4
    assert empirical_auc((scores, labels)) == pytest.approx(_pairwise_auc(scores, labels))


def test_pr_auc_hand_example():
    assert pr_auc(([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])) == pytest.approx(5 / 6)


def test_single_class_rejected():
    with pytest.raises(SingleClassError):
        empirical_auc(([0.1, 0.2], [0, 0]))
    with pytest.raises(SingleClassError):
        pr_auc(([0.1, 0.2], [0, 0]))
    with pytest.raises(SingleClassError):
        roc_points(([0.1, 0.2], [1, 1]))
    with pytest.raises(ValueError):
        empirical_auc(([0.1, 0.2, 0.3], [0, 1]))


def test_binormal_closed_form():
    assert binormal_auc(0.0, 0.6, 1.0, 0.8) == pytest.approx(norm.cdf(1.0))
    roc = BinormalRoc(0.0, 1.0, 1.0, 1.0)
    assert float(roc.tpr(np.array([0.5]))[0]) == pytest.approx(norm.cdf(1.0))
    with pytest.raises(ValueError):
        BinormalRoc(0.0, 0.0, 1.0, 1.0)


def test_binormal_fit_recovers_probit_moments():
    rng = np.random.default_rng(0)
    z0, z1 = rng.normal(-0.5, 1.0, 4000), rng.normal(0.7, 0.6, 4000)
    scores = norm.cdf(np.concatenate([z0, z1]))
    labels = np.repeat([0, 1], 4000)
    fit = fit_binormal((scores, labels), n_rollouts=10**9)
    assert fit.mu0 == pytest.approx(-0.5, abs=0.05)
    assert fit.mu1 == pytest.approx(0.7, abs=0.05)
    assert fit.sigma0 == pytest.approx(1.0, abs=0.05)
    assert fit.sigma1 == pytest.approx(0.6, abs=0.05)
    assert fit.auc == pytest.approx(binormal_auc(-0.5, 1.0, 0.7, 0.6), abs=0.02)


def test_all_ties_fall_back_to_empirical(caplog):
    cohort = _cohort([0.5] * 6, [0, 1, 0, 1, 0, 1])
    with caplog.at_level(logging.WARNING):
        assert roc_auc(cohort) == pytest.approx(0.5)
    assert "degenerate" in caplog.text
    assert bootstrap_ci(cohort, empirical_auc, n_resamples=50) == (0.5, 0.5)


def test_bootstrap_is_seeded():
    rng = np.random.default_rng(1)
    scores, labels = rng.random(40), np.arange(40) % 2
    a = bootstrap_distribution((scores, labels), empirical_auc, n_resamples=30, seed=5)
    b = bootstrap_distribution((scores, labels), empirical_auc, n_resamples=30, seed=5)
    c = bootstrap_distribution((scores, labels), empirical_auc, n_resamples=30, seed=6)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    lo, hi = bootstrap_ci((scores, labels), empirical_auc, n_resamples=200, seed=5)
    assert 0.0 <= lo <= empirical_auc((scores, labels)) <= hi <= 1.0


def test_bootstrap_input_checks():
    with pytest.raises(SingleClassError):
        bootstrap_distribution(([0.2, 0.3], [1, 1]), empirical_auc, n_resamples=5)
    with pytest.raises(ValueError):
        bootstrap_ci(([0.2, 0.3], [0, 1]), empirical_auc, n_resamples=5, level=1.0)


def test_cohort_metrics_keys_and_ranges():
    rng = np.random.default_rng(2)
    labels = (np.arange(60) % 3 == 0).astype(int)
    scores = np.clip(0.3 * labels + rng.random(60) * 0.7, 0, 1)
    out = cohort_metrics(_cohort(scores, labels), EvaluationConfig(n_resamples=40))
    assert set(out) == {"roc_auc", "roc_auc_ci_lo", "roc_auc_ci_hi", "pr_auc", "pr_auc_ci_lo", "pr_auc_ci_hi"}
    assert out["roc_auc_ci_lo"] <= out["roc_auc_ci_hi"]
    assert out["pr_auc_ci_lo"] <= out["pr_auc_ci_hi"]
    assert all(0.0 <= v <= 1.0 for v in out.values())


def test_degenerate_resamples_are_counted(caplog):
    scores = [0.9, 0.8, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4]
    labels = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0]
    with caplog.at_level(logging.WARNING):
        cohort_metrics(_cohort(scores, labels), EvaluationConfig(n_resamples=40))
    assert "ROC resamples used the empirical AUC" in caplog.text


def test_loss_regression_on_log_scale():
    fit = loss_vs_metric_regression([1.0, math.e, math.e**2], [0.8, 0.7, 0.6])
    assert fit.slope == pytest.approx(-0.1)
    assert fit.intercept == pytest.approx(0.8)
    assert fit.correlation == pytest.approx(-1.0)
    assert fit.n_points == 3
    assert float(fit.predict([math.e**3])[0]) == pytest.approx(0.5)


def test_regression_input_checks():
    with pytest.raises(ValueError):
        loss_vs_metric_regression([1.0], [0.5])
    with pytest.raises(ValueError):
        size_vs_metric_regression([0.0, 10.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        size_vs_metric_regression([1.0, 10.0], [0.5])
