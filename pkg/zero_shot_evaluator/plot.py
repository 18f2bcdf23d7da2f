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
Matplotlib figures of the evaluate command.

Functions:
 plot_roc: Empirical ROC of one scored cohort with the fitted binormal curve.
 plot_metric_vs: Metric against validation loss or parameter count, one
  regression line per task (gid ``regression-<x>-<task>``).
"""

from __future__ import annotations

import logging
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  # type: ignore
import pandas as pd  # noqa: E402

from zero_shot_evaluator.config import N_ROLLOUTS, REFERENCE_AUC, TASK_COLORS  # noqa: E402
from zero_shot_evaluator.core import ScoredCohort  # noqa: E402
from zero_shot_evaluator.metrics import (  # noqa: E402
    empirical_auc,
    fit_binormal,
    loss_vs_metric_regression,
    roc_points,
    size_vs_metric_regression,
)
from zero_shot_evaluator.utils import (  # noqa: E402
    draw_binormal_roc,
    draw_chance,
    draw_empirical_roc,
    draw_metric_scatter,
    draw_reference_points,
    draw_regression,
)

logger = logging.getLogger(__name__)

X_LABELS = {"val_loss": "Validation loss (nats/token)", "params": "Parameters N"}


def regression_gid(x: str, task: str) -> str:
    return f"regression-{x}-{task}"


def plot_roc(cohort: ScoredCohort, n_rollouts: int = N_ROLLOUTS, title: str = "") -> plt.Figure:
    """ROC of ``cohort``; the binormal overlay is skipped when its fit is degenerate."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    fpr, tpr = roc_points(cohort)
    draw_chance(ax)
    draw_empirical_roc(ax, fpr, tpr, empirical_auc(cohort))
    try:
        draw_binormal_roc(ax, fit_binormal(cohort, n_rollouts))
    except ValueError as exc:
        logger.warning("%s: no binormal overlay (%s)", title or cohort.task, exc)
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_aspect("equal")
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title or cohort.task)
    ax.legend(loc="lower right", fontsize=8, frameon=False)
    fig.tight_layout()
    return fig


def plot_metric_vs(
    metrics: pd.DataFrame,
    x: str = "val_loss",
    metric: str = "roc_auc",
    show_reference: Optional[bool] = None,
) -> plt.Figure:
    """Metric against ``x`` (``"val_loss"`` or ``"params"``) on a log x axis.

    Args:
        metrics: Rows in the metrics report layout.
        x: Column on the x axis.
        metric: Column on the y axis.
        show_reference: Draw the published loss/AUC anchors. Defaults to on for
            ``x == "val_loss"`` and ``metric == "roc_auc"``.
    """
    if x not in X_LABELS:
        raise ValueError(f"x must be one of {sorted(X_LABELS)}, got {x!r}")
    regress = loss_vs_metric_regression if x == "val_loss" else size_vs_metric_regression
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for task, rows in metrics.groupby("task", sort=True):
        color = TASK_COLORS.get(task, "k")
        errors = None
        if f"{metric}_ci_lo" in rows and f"{metric}_ci_hi" in rows:
            errors = (rows[f"{metric}_ci_lo"], rows[f"{metric}_ci_hi"])
        draw_metric_scatter(ax, rows[x], rows[metric], color=color, label=task, errors=errors)
        if len(rows) >= 2 and rows[x].nunique() >= 2:
            fit = regress(rows[x], rows[metric])
            draw_regression(
                ax, fit, (float(rows[x].min()), float(rows[x].max())), regression_gid(x, task),
                style={"color": color, "linestyle": "-", "linewidth": 1.5},
            )
    if show_reference is None:
        show_reference = x == "val_loss" and metric == "roc_auc"
    if show_reference:
        draw_reference_points(ax, REFERENCE_AUC)
    ax.set_xscale("log")
    ax.set_xlabel(X_LABELS[x])
    ax.set_ylabel(metric.replace("_", " ").upper())
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return fig


__all__ = ["plot_roc", "plot_metric_vs", "regression_gid"]
