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
Scaling-law plotting utilities.

Functions:
 draw_isoflop_profiles: Loss against model size per budget, with fitted parabolas.
 draw_power_law: Optimal quantity against budget on log-log axes, with the fitted line.
 plot_isoflop_figure: Three-panel figure of a sweep analysis.
 plot_loss_curve: Train and validation loss against step.
 save_svg: Write a figure as SVG.

Fitted lines carry a ``gid`` so they can be found again in the SVG output:
``parabola-<budget>``, ``law-n_opt`` and ``law-d_opt``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  # type: ignore
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from scaling_law_generator.config import REFERENCE_EXPONENTS  # noqa: E402
from scaling_law_generator.isoflop import IsoFlopPoint, PowerLawFit, SweepAnalysis  # noqa: E402
from scaling_law_generator.style import StyleConfig, default_style  # noqa: E402


def budget_gid(budget: float) -> str:
    return f"parabola-{budget:.3e}"


def _budget_colors(budgets: Sequence[float], style: StyleConfig) -> Dict[float, tuple]:
    cmap = plt.get_cmap(style.budget_cmap)
    ordered = sorted(set(budgets))
    span = max(1, len(ordered) - 1)
    return {b: cmap(i / span) for i, b in enumerate(ordered)}


def draw_isoflop_profiles(
    ax: plt.Axes,
    points: Sequence[IsoFlopPoint],
    analysis: SweepAnalysis,
    style: StyleConfig,
) -> None:
    """Scatter every usable point, overlay each budget's parabola and optimum."""
    usable = [p for p in points if p.usable]
    colors = _budget_colors([p.budget for p in usable], style)
    retained = {(p.budget, p.config_id) for o in analysis.optima for p in o.retained}

    for budget, color in colors.items():
        pts = sorted((p for p in usable if p.budget == budget), key=lambda p: p.params)
        alphas = [1.0 if (p.budget, p.config_id) in retained else style.excluded_alpha for p in pts]
        ax.scatter(
            [p.params for p in pts], [p.val_loss for p in pts],
            color=color, alpha=alphas, marker=style.marker, s=style.marker_size ** 2,
            label=f"C = {budget:.1e}",
        )

    for opt in analysis.optima:
        ns = [p.params for p in opt.retained]
        grid = np.exp(np.linspace(np.log(min(ns)), np.log(max(ns)), 100))
        (line,) = ax.plot(
            grid, opt.fit.predict(grid),
            color=colors.get(opt.budget, style.law_color), lw=style.fit_line_width, ls=style.fit_linestyle,
        )
        line.set_gid(budget_gid(opt.budget))
        ax.plot(
            [opt.fit.n_opt], [opt.fit.l_min],
            marker=style.optimum_marker, ms=style.optimum_marker_size,
            color=colors.get(opt.budget, style.law_color), ls="none",
        )

    ax.set_xscale("log")
    ax.set_xlabel("Parameters N")
    ax.set_ylabel("Validation loss (nats/token)")
    ax.set_title("IsoFLOP profiles", fontsize=style.title_fontsize)
    ax.grid(True, which="both", alpha=style.grid_alpha)
    ax.legend(fontsize=style.legend_fontsize, loc=style.legend_loc, frameon=False)


def draw_power_law(
    ax: plt.Axes,
    budgets: Sequence[float],
    values: Sequence[float],
    law: Optional[PowerLawFit],
    quantity: str,
    style: StyleConfig,
    reference_exponent: Optional[float] = None,
    extend_to: Optional[float] = None,
) -> None:
    """Log-log scatter of per-budget optima with the fitted power law."""
    ax.scatter(budgets, values, marker=style.marker, s=style.marker_size ** 2, color=style.law_color, zorder=3)
    if law is not None:
        hi = max(law.c_max, extend_to or law.c_max)
        cs = np.exp(np.linspace(np.log(law.c_min), np.log(hi), 50))
        (line,) = ax.plot(
            cs, law.coefficient * cs ** law.exponent,
            color=style.law_color, lw=style.fit_line_width, ls=style.fit_linestyle,
            label=f"fit: exponent {law.exponent:.3f} (r² {law.r_squared:.3f})",
        )
        line.set_gid(f"law-{quantity}")
    if reference_exponent is not None:
        ax.plot([], [], " ", label=f"published exponent ≈ {reference_exponent}", color=style.reference_color)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("Compute budget C (FLOPs)")
    ax.set_ylabel("N_opt (parameters)" if quantity == "n_opt" else "D_opt (tokens)")
    ax.grid(True, which="both", alpha=style.grid_alpha)
    ax.legend(fontsize=style.legend_fontsize, loc=style.legend_loc, frameon=False)


def plot_isoflop_figure(
    points: Sequence[IsoFlopPoint],
    analysis: SweepAnalysis,
    style: Optional[StyleConfig] = None,
    extend_to: Optional[float] = None,
) -> plt.Figure:
    """IsoFLOP profiles, N_opt(C) and D_opt(C) side by side."""
    style = style or default_style()
    w, h = style.panel_size
    with plt.rc_context({"font.size": style.font_size}):
        fig, axes = plt.subplots(1, 3, figsize=(3 * w, h))
        draw_isoflop_profiles(axes[0], points, analysis, style)
        budgets = [o.budget for o in analysis.optima]
        draw_power_law(
            axes[1], budgets, [o.fit.n_opt for o in analysis.optima], analysis.n_law, "n_opt",
            style, REFERENCE_EXPONENTS["a"], extend_to,
        )
        draw_power_law(
            axes[2], budgets, [max(o.d_opt, 1) for o in analysis.optima], analysis.d_law, "d_opt",
            style, REFERENCE_EXPONENTS["b"], extend_to,
        )
        fig.tight_layout()
    return fig


def plot_loss_curve(curve: pd.DataFrame, title: str = "", style: Optional[StyleConfig] = None) -> plt.Figure:
    """Loss against step, one line per split."""
    style = style or default_style()
    fig, ax = plt.subplots(figsize=style.panel_size)
    for split, rows in curve.groupby("split", sort=False):
        ax.plot(
            rows["step"], rows["loss"], label=split,
            color=style.split_colors.get(split), marker="o" if split == "validation" else None, ms=3,
        )
    ax.set_xlabel("Step")
    ax.set_ylabel("Loss (nats/token)")
    if title:
        ax.set_title(title, fontsize=style.title_fontsize)
    ax.grid(True, alpha=style.grid_alpha)
    ax.legend(fontsize=style.legend_fontsize, frameon=False)
    fig.tight_layout()
    return fig


def save_svg(fig: plt.Figure, path: Union[str, Path]) -> Path:
    """Write ``fig`` as SVG (fixed hash salt so reruns give identical bytes) and close it."""
    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "ehr-scaling", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def line_by_gid(fig: plt.Figure, gid: str):
    """First Line2D in ``fig`` carrying ``gid``, or None."""
    for ax in fig.axes:
        for line in ax.get_lines():
            if line.get_gid() == gid:
                return line
    return None


__all__ = [
    "budget_gid",
    "draw_isoflop_profiles",
    "draw_power_law",
    "plot_isoflop_figure",
    "plot_loss_curve",
    "save_svg",
    "line_by_gid",
]
