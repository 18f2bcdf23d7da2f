# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Default configuration for zero-shot risk estimation and its evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Tuple

N_ROLLOUTS: int = 20
"""Simulated futures drawn per patient."""

CONTEXT_LEN: int = 2048
"""Sliding window kept while generating."""

MAX_GENERATED_TOKENS: int = 8192
"""Rollouts reaching this many tokens without a stop rule are censored."""

TEMPERATURE: float = 1.0
"""Sampling temperature of the rollouts."""

READMISSION_WINDOW_MINUTES: float = 30 * 1440.0
"""Readmissions later than this after discharge do not count (30 days)."""

N_RESAMPLES: int = 1000
"""Bootstrap resamples per confidence interval."""

CI_LEVEL: float = 0.95
"""Coverage of bootstrap intervals."""

MAX_REDRAWS: int = 10
"""Single-class bootstrap resamples are redrawn at most this many times in a row."""

TASKS: Tuple[str, ...] = ("icu_mortality", "readmission_30d")
"""Supported zero-shot tasks."""

REFERENCE_AUC: Tuple[Tuple[float, float], ...] = ((1.0, 0.68), (0.85, 0.75))
"""Published (validation loss, ROC AUC) anchors drawn as reference marks."""

ROC_COLOR: str = "#4A89DC"
"""Color of the empirical ROC step curve."""

BINORMAL_STYLE: Dict[str, object] = {"color": "#D9534F", "linestyle": "--", "linewidth": 1.5}
"""Style of the fitted binormal ROC."""

CHANCE_STYLE: Dict[str, object] = {"color": "grey", "linestyle": ":", "linewidth": 0.8}
"""Style of the chance diagonal."""

REGRESSION_STYLE: Dict[str, object] = {"color": "k", "linestyle": "-", "linewidth": 1.5}
"""Style of regression lines in metric scatter plots."""

REFERENCE_MARKER: Dict[str, object] = {"marker": "x", "color": "#7B7B7B", "linestyle": "none", "markersize": 8}
"""Marker of published reference points."""

TASK_COLORS: Dict[str, str] = {"icu_mortality": "#D9534F", "readmission_30d": "#4A89DC"}
"""Scatter color per task."""


@dataclass
class RolloutConfig:
    """
    Trajectory-simulation knobs.

    Attributes:
        n_rollouts (int): Futures per patient; the estimate is events / n_rollouts.
        context_len (int): Window kept while generating. Capped by the model's
            own context length at run time.
        max_generated_tokens (int): Censoring cap per rollout.
        temperature (float): Softmax temperature (0 = greedy).
        base_seed (int): Root of the per-rollout seeds.
        progress (bool): Show a progress bar over patients.
    """

    n_rollouts: int = N_ROLLOUTS
    context_len: int = CONTEXT_LEN
    max_generated_tokens: int = MAX_GENERATED_TOKENS
    temperature: float = TEMPERATURE
    base_seed: int = 0
    progress: bool = False

    def __post_init__(self) -> None:
        if self.n_rollouts < 1:
            raise ValueError(f"n_rollouts must be >= 1, got {self.n_rollouts}")
        if self.max_generated_tokens < 1:
            raise ValueError(f"max_generated_tokens must be >= 1, got {self.max_generated_tokens}")
        if self.context_len < 1:
            raise ValueError(f"context_len must be >= 1, got {self.context_len}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")


@dataclass
class EvaluationConfig:
    """
    Metric and report knobs of the evaluate command.

    Attributes:
        tasks (Tuple[str, ...]): Tasks to score, a subset of `TASKS`.
        n_resamples (int): Bootstrap resamples.
        level (float): Interval coverage in (0, 1).
        seed (int): Bootstrap seed.
    """

    tasks: Tuple[str, ...] = field(default_factory=lambda: TASKS)
    n_resamples: int = N_RESAMPLES
    level: float = CI_LEVEL
    seed: int = 0

    def __post_init__(self) -> None:
        self.tasks = tuple(self.tasks)
        unknown = [t for t in self.tasks if t not in TASKS]
        if unknown or not self.tasks:
            raise ValueError(f"tasks must be a nonempty subset of {TASKS}, got {self.tasks}")
        if self.n_resamples < 1:
            raise ValueError(f"n_resamples must be >= 1, got {self.n_resamples}")
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")


__all__ = [
    "N_ROLLOUTS",
    "CONTEXT_LEN",
    "MAX_GENERATED_TOKENS",
    "TEMPERATURE",
    "READMISSION_WINDOW_MINUTES",
    "N_RESAMPLES",
    "CI_LEVEL",
    "MAX_REDRAWS",
    "TASKS",
    "REFERENCE_AUC",
    "ROC_COLOR",
    "BINORMAL_STYLE",
    "CHANCE_STYLE",
    "REGRESSION_STYLE",
    "REFERENCE_MARKER",
    "TASK_COLORS",
    "RolloutConfig",
    "EvaluationConfig",
]
