# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Result types of trajectory simulation and scoring."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np


class MissingAnchorError(ValueError):
    """Timeline holds no token to anchor the task's prediction on."""


class SingleClassError(ValueError):
    """Metric needs both classes but the labels hold only one."""


class Terminal(str, Enum):
    """How a simulated future ended."""

    DEATH = "death"
    DISCHARGE = "discharge"
    ADMISSION = "admission"
    TIME_EXCEEDED = "time_exceeded"
    CENSORED = "censored"


@dataclass(frozen=True)
class TrajectoryOutcome:
    """
    One simulated future.

    Attributes:
        terminal (Terminal): Stop rule that fired, or CENSORED at the cap.
        tokens_generated (int): Tokens sampled, the stopping token included.
        simulated_elapsed_minutes (float): Sum of the nominal durations of the
            interval tokens generated.
    """

    terminal: Terminal
    tokens_generated: int
    simulated_elapsed_minutes: float = 0.0


@dataclass(frozen=True)
class RiskEstimate:
    """Fraction of rollouts that ended in the task's event."""

    probability: float
    event_count: int
    rollout_count: int
    censored_count: int = 0

    def __post_init__(self) -> None:
        if self.rollout_count < 1:
            raise ValueError("rollout_count must be >= 1")
        if self.event_count + self.censored_count > self.rollout_count:
            raise ValueError("event_count + censored_count exceeds rollout_count")

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[TrajectoryOutcome], event: Terminal) -> "RiskEstimate":
        n = len(outcomes)
        hits = sum(o.terminal is event for o in outcomes)
        censored = sum(o.terminal is Terminal.CENSORED for o in outcomes)
        return cls(probability=hits / n, event_count=hits, rollout_count=n, censored_count=censored)


@dataclass
class ScoredCohort:
    """
    Per-patient (score, label) pairs of one task.

    Attributes:
        task (str): Task name.
        patient_ids (List[str]): Scored patients.
        scores (List[float]): Estimated probabilities in [0, 1].
        labels (List[int]): True outcomes, 0 or 1.
        censored_counts (List[int]): Censored rollouts per patient.
    """

    task: str
    patient_ids: List[str] = field(default_factory=list)
    scores: List[float] = field(default_factory=list)
    labels: List[int] = field(default_factory=list)
    censored_counts: List[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = len(self.patient_ids)
        if not len(self.scores) == len(self.labels) == len(self.censored_counts) == n:
            raise ValueError("patient_ids, scores, labels and censored_counts differ in length")
        if any(not 0.0 <= s <= 1.0 for s in self.scores):
            raise ValueError("scores must lie in [0, 1]")
        if any(lbl not in (0, 1) for lbl in self.labels):
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.patient_ids)

    def add(self, patient_id: str, estimate: RiskEstimate, label: int) -> None:
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label}")
        self.patient_ids.append(patient_id)
        self.scores.append(estimate.probability)
        self.labels.append(int(label))
        self.censored_counts.append(estimate.censored_count)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Scores and labels as numpy arrays."""
        return np.asarray(self.scores, dtype=float), np.asarray(self.labels, dtype=int)

    @property
    def class_counts(self) -> Tuple[int, int]:
        """(negatives, positives)."""
        pos = int(sum(self.labels))
        return len(self.labels) - pos, pos


__all__ = [
    "MissingAnchorError",
    "SingleClassError",
    "Terminal",
    "TrajectoryOutcome",
    "RiskEstimate",
    "ScoredCohort",
]
