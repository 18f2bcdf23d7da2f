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
Prediction anchors and ground-truth labels of the two zero-shot tasks.

Anchors are found from token ids alone so they can be located in a decoded
token stream:

- **ICU mortality**: the last ICU-admission token.
- **30-day readmission**: the last discharge token. The label is 1 when an
  admission token follows it within the window and 0 otherwise, including
  when nothing follows it.

Labels need the token ages of a freshly built `PatientTimeline`; they are
computed once at tokenize time and stored in ``patients.csv``.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

from timeline_generator.models import PatientTimeline
from timeline_generator.vocab import Vocabulary
from zero_shot_evaluator.config import READMISSION_WINDOW_MINUTES, TASKS
from zero_shot_evaluator.core import MissingAnchorError

logger = logging.getLogger(__name__)


def _last_index(tokens: Sequence[int], token_id: int, before: Optional[int] = None) -> int:
    end = len(tokens) if before is None else before
    for i in range(end - 1, -1, -1):
        if tokens[i] == token_id:
            return i
    return -1


def mortality_anchor(tokens: Sequence[int], vocab: Vocabulary) -> int:
    """Index of the last ICU-admission token.

    Raises:
        MissingAnchorError: If the timeline has no ICU stay.
    """
    idx = _last_index(tokens, vocab.special("icu_admission"))
    if idx < 0:
        raise MissingAnchorError("no ICU admission in timeline")
    return idx


def readmission_anchor(tokens: Sequence[int], vocab: Vocabulary) -> int:
    """Index of the last discharge token.

    Raises:
        MissingAnchorError: If the timeline has no discharge.
    """
    idx = _last_index(tokens, vocab.special("discharge"))
    if idx < 0:
        raise MissingAnchorError("no discharge in timeline")
    return idx


def anchor_index(tokens: Sequence[int], task: str, vocab: Vocabulary) -> int:
    """Anchor position of ``task`` (one of `TASKS`)."""
    if task == "icu_mortality":
        return mortality_anchor(tokens, vocab)
    if task == "readmission_30d":
        return readmission_anchor(tokens, vocab)
    raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")


def icu_mortality_label(timeline: PatientTimeline, vocab: Vocabulary) -> Optional[int]:
    """1 if death follows the last ICU admission before any discharge, 0 otherwise.

    Returns ``None`` for a timeline without an ICU stay.
    """
    try:
        start = mortality_anchor(timeline.tokens, vocab)
    except MissingAnchorError:
        return None
    death = vocab.special("death")
    exits = {vocab.special("icu_discharge"), vocab.special("discharge")}
    for tok in timeline.tokens[start + 1:]:
        if tok == death:
            return 1
        if tok in exits:
            return 0
    return 0


def readmission_label(
    timeline: PatientTimeline,
    vocab: Vocabulary,
    window_minutes: float = READMISSION_WINDOW_MINUTES,
) -> Optional[int]:
    """1 if an admission follows the anchor discharge within ``window_minutes``.

    A readmission exactly at the window edge counts. A discharge with no later
    admission is a negative. Returns ``None`` when the timeline has no
    discharge.

    Raises:
        ValueError: If the anchor or the admission token carries no age.
    """
    try:
        start = readmission_anchor(timeline.tokens, vocab)
    except MissingAnchorError:
        return None
    admission = vocab.special("admission")
    nxt = next((i for i in range(start + 1, len(timeline.tokens)) if timeline.tokens[i] == admission), None)
    if nxt is None:
        return 0
    t0, t1 = timeline.token_ages[start], timeline.token_ages[nxt]
    if t0 is None or t1 is None:
        raise ValueError(f"patient {timeline.patient_id}: discharge/admission token without an age")
    return int(t1 - t0 <= window_minutes)


def task_label(timeline: PatientTimeline, task: str, vocab: Vocabulary) -> Optional[int]:
    if task == "icu_mortality":
        return icu_mortality_label(timeline, vocab)
    if task == "readmission_30d":
        return readmission_label(timeline, vocab)
    raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")


__all__ = [
    "mortality_anchor",
    "readmission_anchor",
    "anchor_index",
    "icu_mortality_label",
    "readmission_label",
    "task_label",
]
