import logging
import math

import numpy as np
import pandas as pd
import pytest

from scaling_law_generator.plotter import line_by_gid
from zero_shot_evaluator.core import ScoredCohort
from zero_shot_evaluator.plot import plot_metric_vs, plot_roc, regression_gid


def _metrics():
    return pd.DataFrame(
        {
            "model_id": ["a", "b", "c", "a"],
            "params": [1e5, 1e6, 1e7, 1e5],
            "val_loss": [1.0, math.e, math.e**2, 1.0],
            "task": ["icu_mortality"] * 3 + ["readmission_30d"],
            "roc_auc": [0.8, 0.7, 0.6, 0.55],
            "roc_auc_ci_lo": [0.75, 0.65, 0.55, 0.5],
            "roc_auc_ci_hi": [0.85, 0.75, 0.65, 0.6],
        }
    )


def test_regression_line_per_task():
    fig = plot_metric_vs(_metrics(), x="val_loss", metric="roc_auc")
    line = line_by_gid(fig, regression_gid("val_loss", "icu_mortality"))
    assert line.get_gid() == "regression-val_loss-icu_mortality"
    xs, ys = line.get_data()
    slope = np.polyfit(np.log(xs), ys, 1)[0]
    assert slope == pytest.approx(-0.1)
    # one point only: no line
    assert line_by_gid(fig, regression_gid("val_loss", "readmission_30d")) is None


def test_size_axis_and_unknown_axis():
    fig = plot_metric_vs(_metrics(), x="params")
    assert line_by_gid(fig, "regression-params-icu_mortality") is not None
    with pytest.raises(ValueError):
        plot_metric_vs(_metrics(), x="flops")


def test_roc_with_binormal_overlay():
    rng = np.random.default_rng(0)
    labels = [0] * 30 + [1] * 30
    scores = np.clip(np.round(rng.random(60) * 20 + 3 * np.array(labels)) / 23, 0, 1).tolist()
    cohort = ScoredCohort("icu_mortality", [f"P{i}" for i in range(60)], scores, labels, [0] * 60)
    fig = plot_roc(cohort)
    assert line_by_gid(fig, "roc-empirical") is not None
    assert line_by_gid(fig, "roc-binormal") is not None


def test_roc_skips_degenerate_overlay(caplog):
    cohort = ScoredCohort("icu_mortality", ["P1", "P2", "P3", "P4"], [0.5] * 4, [0, 1, 0, 1], [0] * 4)
    with caplog.at_level(logging.WARNING):
        fig = plot_roc(cohort)
    assert line_by_gid(fig, "roc-empirical") is not None
    assert line_by_gid(fig, "roc-binormal") is None
    assert "no binormal overlay" in caplog.text
