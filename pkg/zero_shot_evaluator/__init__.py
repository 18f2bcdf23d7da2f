# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Zero-shot clinical risk estimation by trajectory simulation.

Modules exported by this package:

- `config`: Rollout and evaluation defaults.
- `core`: Outcome, estimate and cohort types.
- `labels`: Prediction anchors and true labels.
- `rollout`: Monte-Carlo rollouts and cohort scoring.
- `metrics`: ROC/PR AUC, binormal fit, bootstrap intervals, regressions.
- `io`: Scored-cohort and metrics CSV files.
- `utils`: Axes-level drawing helpers.
- `plot`: ROC and metric-vs-loss figures.
"""

__version__ = "0.1.0"

from .config import EvaluationConfig, RolloutConfig
from .core import MissingAnchorError, RiskEstimate, ScoredCohort, SingleClassError, Terminal, TrajectoryOutcome
from .labels import icu_mortality_label, readmission_label
from .metrics import (
    BinormalRoc,
    bootstrap_ci,
    empirical_auc,
    fit_binormal,
    loss_vs_metric_regression,
    pr_auc,
    size_vs_metric_regression,
)
from .rollout import (
    estimate_icu_mortality,
    estimate_readmission_30d,
    prefix_for_task,
    score_cohort,
    simulate_rollout,
)

__all__ = [
    "BinormalRoc",
    "EvaluationConfig",
    "MissingAnchorError",
    "RiskEstimate",
    "RolloutConfig",
    "ScoredCohort",
    "SingleClassError",
    "Terminal",
    "TrajectoryOutcome",
    "bootstrap_ci",
    "empirical_auc",
    "estimate_icu_mortality",
    "estimate_readmission_30d",
    "fit_binormal",
    "icu_mortality_label",
    "loss_vs_metric_regression",
    "pr_auc",
    "prefix_for_task",
    "readmission_label",
    "score_cohort",
    "simulate_rollout",
    "size_vs_metric_regression",
]
