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
Input/output of scored cohorts and metric reports (CSV).
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Mapping, Union

import pandas as pd

from zero_shot_evaluator.core import ScoredCohort

COHORT_COLUMNS = ("patient_id", "task", "score", "label", "censored_count")
METRIC_COLUMNS = (
    "model_id",
    "params",
    "val_loss",
    "task",
    "roc_auc",
    "roc_auc_ci_lo",
    "roc_auc_ci_hi",
    "pr_auc",
    "pr_auc_ci_lo",
    "pr_auc_ci_hi",
)


def cohort_frame(cohort: ScoredCohort) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "patient_id": cohort.patient_ids,
            "task": [cohort.task] * len(cohort),
            "score": cohort.scores,
            "label": cohort.labels,
            "censored_count": cohort.censored_counts,
        },
        columns=list(COHORT_COLUMNS),
    )


def save_cohort_csv(cohort: ScoredCohort, path: Union[str, Path]) -> None:
    """Write one row per scored patient."""
    cohort_frame(cohort).to_csv(path, index=False, lineterminator="\n")


def load_cohort_csv(path: Union[str, Path]) -> ScoredCohort:
    """Read a file written by `save_cohort_csv`.

    Raises:
        ValueError: On missing columns or more than one task in the file.
    """
    frame = pd.read_csv(path, dtype={"patient_id": str, "task": str})
    missing = [c for c in COHORT_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    tasks = frame["task"].unique()
    if len(tasks) > 1:
        raise ValueError(f"{path}: several tasks in one cohort file: {list(tasks)}")
    return ScoredCohort(
        task=str(tasks[0]) if len(tasks) else "",
        patient_ids=frame["patient_id"].tolist(),
        scores=frame["score"].astype(float).tolist(),
        labels=frame["label"].astype(int).tolist(),
        censored_counts=frame["censored_count"].astype(int).tolist(),
    )


def metrics_frame(rows: Iterable[Mapping[str, object]]) -> pd.DataFrame:
    """Metric rows in report column order.

    Raises:
        ValueError: If a row lacks a report column.
    """
    rows: List[Mapping[str, object]] = list(rows)
    for row in rows:
        missing = [c for c in METRIC_COLUMNS if c not in row]
        if missing:
            raise ValueError(f"metric row lacks {missing}")
    return pd.DataFrame(rows, columns=list(METRIC_COLUMNS))


def save_metrics_csv(rows: Iterable[Mapping[str, object]], path: Union[str, Path]) -> pd.DataFrame:
    frame = metrics_frame(rows)
    frame.to_csv(path, index=False, lineterminator="\n")
    return frame


def load_metrics_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"model_id": str, "task": str}, float_precision="round_trip")


__all__ = [
    "COHORT_COLUMNS",
    "METRIC_COLUMNS",
    "cohort_frame",
    "save_cohort_csv",
    "load_cohort_csv",
    "metrics_frame",
    "save_metrics_csv",
    "load_metrics_csv",
]
