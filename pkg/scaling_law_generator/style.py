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
Styling configuration for scaling-law figures.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple


@dataclass
class StyleConfig:
    """Collection of style knobs used by the plotter."""

    # ── Figure ───────────────────────────────────────────────────────────────
    panel_size: Tuple[float, float] = (5.0, 4.0)
    """Width and height of one panel, inches."""

    font_size: float = 11.0
    """Base font size."""

    title_fontsize: float = 12.0
    """Panel title font size."""

    # ── Observed points ──────────────────────────────────────────────────────
    marker: str = "o"
    """Marker of trained models."""

    marker_size: float = 5.0
    """Marker size of trained models."""

    budget_cmap: str = "viridis"
    """Colormap spreading budgets from small to large."""

    excluded_alpha: float = 0.3
    """Opacity of points outside the retained set."""

    # ── Fitted curves ────────────────────────────────────────────────────────
    fit_line_width: float = 1.5
    """Line width of parabolas and power laws."""

    fit_linestyle: str = "-"
    """Linestyle of fitted curves."""

    optimum_marker: str = "*"
    """Marker of a fitted optimum."""

    optimum_marker_size: float = 12.0
    """Size of the optimum marker."""

    law_color: str = "k"
    """Color of power-law lines."""

    reference_color: str = "#7B7B7B"
    """Color of published reference annotations."""

    # ── Loss curves ──────────────────────────────────────────────────────────
    split_colors: Dict[str, str] = field(default_factory=lambda: {"train": "#4A89DC", "validation": "#D9534F"})
    """Line color per split."""

    # ── Grid / legend ────────────────────────────────────────────────────────
    grid_alpha: float = 0.3
    """Opacity of grid lines."""

    legend_fontsize: float = 8.0
    """Legend font size."""

    legend_loc: str = "best"
    """Legend location string."""
# ↑ END OF CLASS --------------------------------------------------------------


def default_style() -> StyleConfig:
    """Return a StyleConfig with project defaults."""
    return StyleConfig()


__all__ = ["StyleConfig", "default_style"]
