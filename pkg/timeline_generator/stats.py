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
Corpus statistics in the layout of the timeline statistics table.

`compute_stats` reduces timelines and training examples to a `CorpusStats`;
`stats_table` lays several of them out as one column per split, rows in the
table's order, and `save_stats_csv` writes that frame with pandas.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from timeline_generator.models import CorpusStats, LengthSummary, PatientTimeline, TrainingExample

STAT_ROWS = (
    "patients",
    "timeline_length_mean",
    "timeline_length_std",
    "timeline_length_min",
    "timeline_length_max",
    "timeline_length_q1",
    "timeline_length_q2",
    "timeline_length_q3",
    "total_timeline_tokens",
    "example_length_mean",
    "example_length_std",
    "example_length_min",
    "example_length_max",
    "example_length_q1",
    "example_length_q2",
    "example_length_q3",
    "total_training_examples",
    "total_trainable_tokens",
)
"""Row labels of the statistics CSV, top to bottom."""


def summarize_lengths(lengths: Sequence[int]) -> LengthSummary:
    """Mean, population std, extremes and linear-interpolation quartiles.

    Raises:
        ValueError: On an empty sequence.
    """
    arr = np.asarray(lengths, dtype=float)
    if arr.size == 0:
        raise ValueError("cannot summarize an empty length list")
    q1, q2, q3 = np.percentile(arr, [25, 50, 75], method="linear")
    return LengthSummary(
        mean=float(arr.mean()),
        std=float(arr.std()),
        min=int(arr.min()),
        max=int(arr.max()),
        q1=float(q1),
        q2=float(q2),
        q3=float(q3),
    )


def compute_stats(
    timelines: Sequence[PatientTimeline],
    examples: Sequence[TrainingExample],
) -> CorpusStats:
    """Statistics of a set of timelines and the training examples cut from them.

    Raises:
        ValueError: If either input is empty.
    """
    if not timelines or not examples:
        raise ValueError("compute_stats needs at least one timeline and one example")
    tl_lengths = [len(tl) for tl in timelines]
    ex_lengths = [len(ex) for ex in examples]
    return CorpusStats(
        patient_count=len(timelines),
        timeline_lengths=summarize_lengths(tl_lengths),
        example_lengths=summarize_lengths(ex_lengths),
        total_timeline_tokens=int(sum(tl_lengths)),
        total_examples=len(ex_lengths),
        total_trainable_tokens=int(sum(ex_lengths)),
    )


def _stat_column(stats: CorpusStats) -> Dict[str, float]:
    col: Dict[str, float] = {"patients": stats.patient_count}
    for prefix, summary in (("timeline_length", stats.timeline_lengths), ("example_length", stats.example_lengths)):
        for name in ("mean", "std", "min", "max", "q1", "q2", "q3"):
            col[f"{prefix}_{name}"] = getattr(summary, name)
    col["total_timeline_tokens"] = stats.total_timeline_tokens
    col["total_training_examples"] = stats.total_examples
    col["total_trainable_tokens"] = stats.total_trainable_tokens
    return col


def stats_table(per_split: Mapping[str, CorpusStats]) -> pd.DataFrame:
    """One column per split (in mapping order), rows as `STAT_ROWS`."""
    frame = pd.DataFrame({split: _stat_column(s) for split, s in per_split.items()})
    frame = frame.reindex(list(STAT_ROWS))
    frame.index.name = "statistic"
    return frame


def save_stats_csv(per_split: Mapping[str, CorpusStats], path: Union[str, Path]) -> pd.DataFrame:
    frame = stats_table(per_split)
    frame.to_csv(path, float_format="%.4f", lineterminator="\n")
    return frame


__all__ = ["STAT_ROWS", "summarize_lengths", "compute_stats", "stats_table", "save_stats_csv"]
