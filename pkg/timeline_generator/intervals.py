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
Time-interval ladder and gap decomposition.

Example:
    intervals_for_gap(3.0, DEFAULT_LADDER) -> []\n
    intervals_for_gap(20.0, DEFAULT_LADDER) -> [1]          (15 minutes)\n
    intervals_for_gap(736_128.0, DEFAULT_LADDER) -> [12, 12, 12]  (1.4 years)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from timeline_generator.models import MINUTES_PER_DAY, MINUTES_PER_YEAR

_MONTH = MINUTES_PER_YEAR / 12.0

DEFAULT_CLASSES: Tuple[Tuple[str, float], ...] = (
    ("5m", 5.0),
    ("15m", 15.0),
    ("30m", 30.0),
    ("1h", 60.0),
    ("2h", 120.0),
    ("6h", 360.0),
    ("12h", 720.0),
    ("1d", MINUTES_PER_DAY),
    ("3d", 3 * MINUTES_PER_DAY),
    ("1w", 7 * MINUTES_PER_DAY),
    ("1mt", _MONTH),
    ("3mt", 3 * _MONTH),
    ("6mt", 6 * _MONTH),
)
"""Thirteen (label, minutes) interval classes; 6 months = 262,800 minutes."""


@dataclass(frozen=True)
class IntervalLadder:
    """
    Strictly ascending interval classes used to discretise inter-event gaps.

    Attributes:
        labels (Tuple[str, ...]): Short class names used in token text.
        minutes (Tuple[float, ...]): Nominal duration of each class.
    """

    labels: Tuple[str, ...]
    minutes: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != 13 or len(self.minutes) != 13:
            raise ValueError("an interval ladder has exactly 13 classes")
        if any(b <= a for a, b in zip(self.minutes, self.minutes[1:])):
            raise ValueError("interval classes must be strictly ascending")
        if self.minutes[0] != 5.0 or self.minutes[-1] != 6 * _MONTH:
            raise ValueError("interval ladder must span 5 minutes to 6 months")

    @classmethod
    def default(cls) -> "IntervalLadder":
        return cls(
            labels=tuple(lbl for lbl, _ in DEFAULT_CLASSES),
            minutes=tuple(m for _, m in DEFAULT_CLASSES),
        )

    @property
    def longest(self) -> float:
        return self.minutes[-1]

    def duration(self, classes: Sequence[int]) -> float:
        """Total nominal duration represented by a list of class indices."""
        return float(sum(self.minutes[c] for c in classes))


DEFAULT_LADDER = IntervalLadder.default()


def intervals_for_gap(gap_minutes: float, ladder: IntervalLadder = DEFAULT_LADDER) -> List[int]:
    """Decompose an elapsed time into interval-class indices.

    Below 5 minutes nothing is emitted. Up to 6 months a single token of the
    largest class not exceeding the gap is used. Longer gaps become
    round-half-up(gap / 6 months) copies of the 6-month class, at least one.

    Args:
        gap_minutes: Elapsed time between two events, in minutes.
        ladder: Interval classes to use.

    Returns:
        List of indices into ``ladder``.

    Raises:
        ValueError: If the gap is negative.
    """
    if gap_minutes < 0:
        raise ValueError(f"gap must be nonnegative, got {gap_minutes}")
    if gap_minutes < ladder.minutes[0]:
        return []
    top = len(ladder.minutes) - 1
    if gap_minutes <= ladder.longest:
        idx = int(np.searchsorted(ladder.minutes, gap_minutes, side="right")) - 1
        return [idx]
    copies = max(1, int(np.floor(gap_minutes / ladder.longest + 0.5)))
    return [top] * copies


__all__ = ["IntervalLadder", "DEFAULT_LADDER", "DEFAULT_CLASSES", "intervals_for_gap"]
