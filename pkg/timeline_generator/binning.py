# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Quantile binning of numeric event values (lab results, vitals, scores)."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Set, Tuple

import numpy as np

from timeline_generator.models import ClinicalEvent, EventKind

logger = logging.getLogger(__name__)

DEFAULT_BIN_COUNT: int = 10
"""Deciles."""

DEFAULT_MIN_GROUP_SIZE: int = 50
"""Observations a (kind, code) group needs before it gets its own binner."""


@dataclass(frozen=True)
class QuantileBinner:
    """
    Empirical-quantile discretiser for one value group.

    Attributes:
        group_key (Tuple[str, str]): ``(kind, code)``; code is ``"*"`` for a per-kind fallback.
        boundaries (Tuple[float, ...]): ``bin_count - 1`` nondecreasing cut points.
        bin_count (int): Number of bins Q.
    """

    group_key: Tuple[str, str]
    boundaries: Tuple[float, ...]
    bin_count: int

    def bin(self, value: float) -> int:
        """Smallest bin ``b`` with ``value <= boundaries[b]``, else ``Q - 1``."""
        return int(np.searchsorted(self.boundaries, value, side="left"))


def fit_quantile_binner(
    values: Sequence[float],
    bin_count: int = DEFAULT_BIN_COUNT,
    group_key: Tuple[str, str] = ("*", "*"),
) -> QuantileBinner:
    """Fit a binner whose cut points are the empirical quantiles at i/Q.

    Args:
        values: Observed values (nonempty).
        bin_count: Number of bins Q (at least 2).
        group_key: Identifier stored on the binner.

    Returns:
        QuantileBinner with Q - 1 boundaries; duplicates are kept.

    Raises:
        ValueError: On empty input or Q < 2.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError(f"cannot fit a binner for {group_key} on no values")
    if bin_count < 2:
        raise ValueError(f"bin_count must be >= 2, got {bin_count}")
    probs = np.arange(1, bin_count) / bin_count
    boundaries = np.quantile(arr, probs)
    return QuantileBinner(group_key=group_key, boundaries=tuple(float(b) for b in boundaries), bin_count=bin_count)


@dataclass
class BinnerRegistry:
    """Per-(kind, code) binners with a per-kind fallback for sparse codes."""

    by_code: Dict[Tuple[str, str], QuantileBinner] = field(default_factory=dict)
    by_kind: Dict[str, QuantileBinner] = field(default_factory=dict)
    bin_count: int = DEFAULT_BIN_COUNT
    _unseen: Set[str] = field(default_factory=set, init=False, repr=False, compare=False)

    def lookup(self, kind: EventKind, code: str) -> QuantileBinner:
        """Return the code-level binner, falling back to the kind-level one."""
        binner: Optional[QuantileBinner] = self.by_code.get((kind.value, code))
        if binner is None:
            binner = self.by_kind.get(kind.value)
        if binner is None:
            raise KeyError(f"no binner fitted for {kind.value}/{code}")
        return binner

    def bin(self, kind: EventKind, code: str, value: float) -> int:
        """Bin of ``value``; a kind never seen while fitting maps to the middle bin."""
        try:
            return self.lookup(kind, code).bin(value)
        except KeyError:
            if kind.value not in self._unseen:
                self._unseen.add(kind.value)
                logger.warning("no binner fitted for %s values; using middle bin Q%d", kind.value, self.bin_count // 2)
            return self.bin_count // 2


def fit_binners(
    events: Iterable[ClinicalEvent],
    bin_count: int = DEFAULT_BIN_COUNT,
    min_group_size: int = DEFAULT_MIN_GROUP_SIZE,
) -> BinnerRegistry:
    """Fit the binner registry over every numeric event.

    Groups with at least ``min_group_size`` observations get their own binner;
    every kind that has numeric values gets a global binner as fallback.
    """
    per_code: Dict[Tuple[str, str], list] = defaultdict(list)
    per_kind: Dict[str, list] = defaultdict(list)
    for ev in events:
        if ev.numeric_value is None or ev.kind is EventKind.DEMOGRAPHIC:
            continue
        per_code[(ev.kind.value, ev.code)].append(ev.numeric_value)
        per_kind[ev.kind.value].append(ev.numeric_value)

    registry = BinnerRegistry(bin_count=bin_count)
    for kind, values in sorted(per_kind.items()):
        registry.by_kind[kind] = fit_quantile_binner(values, bin_count, (kind, "*"))
    for key, values in sorted(per_code.items()):
        if len(values) >= min_group_size:
            registry.by_code[key] = fit_quantile_binner(values, bin_count, key)
    logger.info(
        "fitted %d code-level and %d kind-level binners (Q=%d)",
        len(registry.by_code), len(registry.by_kind), bin_count,
    )
    return registry


__all__ = [
    "QuantileBinner",
    "BinnerRegistry",
    "fit_quantile_binner",
    "fit_binners",
    "DEFAULT_BIN_COUNT",
    "DEFAULT_MIN_GROUP_SIZE",
]
