# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Axes-level drawing helpers for ROC curves and metric scatter plots."""

from __future__ import annotations

from typing import Dict, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  # type: ignore
import numpy as np  # noqa: E402

from zero_shot_evaluator.config import (  # noqa: E402
    BINORMAL_STYLE,
    CHANCE_STYLE,
    REFERENCE_MARKER,
    REGRESSION_STYLE,
    ROC_COLOR,
)
from zero_shot_evaluator.metrics import BinormalRoc, RegressionFit  # noqa: E402


def draw_chance(ax: plt.Axes, *, style: Dict[str, object] = CHANCE_STYLE) -> None:
    ax.plot([0.0, 1.0], [0.0, 1.0], **style)


def draw_empirical_roc(
    ax: plt.Axes,
    fpr: np.ndarray,
    tpr: np.ndarray,
    auc: float,
    *,
    color: str = ROC_COLOR,
) -> None:
    """Step curve of the empirical ROC."""
    (line,) = ax.step(fpr, tpr, where="post", color=color, lw=1.5, label=f"empirical (AUC {auc:.3f})")
    line.set_gid("roc-empirical")


def draw_binormal_roc(
    ax: plt.Axes,
    fit: BinormalRoc,
    *,
    style: Dict[str, object] = BINORMAL_STYLE,
    n_points: int = 200,
) -> None:
    """Smooth ROC of the fitted binormal model."""
    fpr = np.linspace(0.0, 1.0, n_points)
    (line,) = ax.plot(fpr, fit.tpr(fpr), label=f"binormal (AUC {fit.auc:.3f})", **style)
    line.set_gid("roc-binormal")


def draw_metric_scatter(
    ax: plt.Axes,
    xs: Sequence[float],
    ys: Sequence[float],
    *,
    color: str,
    label: str,
    errors: Optional[Tuple[Sequence[float], Sequence[float]]] = None,
) -> None:
    """Scatter of a metric against loss or size, with optional interval bars."""
    ys = np.asarray(ys, dtype=float)
    yerr = None
    if errors is not None:
        lo, hi = (np.asarray(e, dtype=float) for e in errors)
        yerr = np.vstack([np.clip(ys - lo, 0, None), np.clip(hi - ys, 0, None)])
    ax.errorbar(xs, ys, yerr=yerr, fmt="o", color=color, label=label, capsize=3, ms=5)


def draw_regression(
    ax: plt.Axes,
    fit: RegressionFit,
    x_range: Tuple[float, float],
    gid: str,
    *,
    style: Dict[str, object] = REGRESSION_STYLE,
) -> None:
    """Regression line ``slope * ln(x) + intercept`` over ``x_range``."""
    lo, hi = x_range
    xs = np.exp(np.linspace(np.log(lo), np.log(hi), 50))
    (line,) = ax.plot(xs, fit.predict(xs), label=f"slope {fit.slope:.3f} (r {fit.correlation:.2f})", **style)
    line.set_gid(gid)


def draw_reference_points(
    ax: plt.Axes,
    points: Sequence[Tuple[float, float]],
    *,
    style: Dict[str, object] = REFERENCE_MARKER,
) -> None:
    """Published reference values, for orientation only."""
    if not points:
        return
    xs, ys = zip(*points)
    ax.plot(xs, ys, label="published reference", **style)


__all__ = [
    "draw_chance",
    "draw_empirical_roc",
    "draw_binormal_roc",
    "draw_metric_scatter",
    "draw_regression",
    "draw_reference_points",
]
