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
Patient-level splits, boundary-preserving segmentation and token-budget batching.

A training example never crosses a patient boundary: each timeline is cut
into consecutive, non-overlapping chunks of at most ``max_len`` tokens and
the short tail is dropped when it falls under ``min_len``.
"""

from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from timeline_generator.models import PatientTimeline, TrainingExample

logger = logging.getLogger(__name__)

CONTEXT_LEN: int = 2048
"""Fixed model context; also the longest training example."""

DEFAULT_MIN_LEN: int = 32
"""Tails shorter than this are not worth a training example."""

DEFAULT_RATIOS: Tuple[float, float, float] = (0.8, 0.1, 0.1)
"""Train / validation / test fractions."""

SPLIT_NAMES: Tuple[str, str, str] = ("train", "validation", "test")


def split_patients(
    patient_ids: Iterable[str],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> Dict[str, List[str]]:
    """Partition patients into train / validation / test.

    Validation and test sizes are ``floor(n * ratio)``; every remaining
    patient goes to train. Ids are sorted before shuffling, so the result
    depends only on the id set and the seed.

    Args:
        patient_ids: Patient identifiers (duplicates collapse).
        ratios: Three positive fractions summing to 1.
        seed: Seed of the shuffle.

    Returns:
        ``{"train": [...], "validation": [...], "test": [...]}``, each sorted.

    Raises:
        ValueError: On an empty id list or invalid ratios.
    """
    ids = sorted(set(patient_ids))
    if not ids:
        raise ValueError("cannot split an empty patient list")
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or not np.isclose(sum(ratios), 1.0):
        raise ValueError(f"ratios must be three positive fractions summing to 1, got {tuple(ratios)}")

    n = len(ids)
    n_val = int(np.floor(n * ratios[1] + 1e-9))
    n_test = int(np.floor(n * ratios[2] + 1e-9))
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [ids[i] for i in order]
    split = {
        "validation": sorted(shuffled[:n_val]),
        "test": sorted(shuffled[n_val:n_val + n_test]),
        "train": sorted(shuffled[n_val + n_test:]),
    }
    logger.info(
        "split %d patients: %d train, %d validation, %d test",
        n, len(split["train"]), len(split["validation"]), len(split["test"]),
    )
    return {name: split[name] for name in SPLIT_NAMES}


def segment_timeline(
    timeline: PatientTimeline,
    max_len: int = CONTEXT_LEN,
    min_len: int = DEFAULT_MIN_LEN,
) -> List[TrainingExample]:
    """Cut one timeline into consecutive chunks of at most ``max_len`` tokens.

    Example:
        A 5000-token timeline with ``max_len=2048, min_len=2`` gives chunks of
        2048, 2048 and 904 tokens.

    Raises:
        ValueError: Unless ``max_len >= min_len >= 1``.
    """
    if not max_len >= min_len >= 1:
        raise ValueError(f"need max_len >= min_len >= 1, got max_len={max_len}, min_len={min_len}")
    tokens = timeline.tokens
    chunks = (tokens[i:i + max_len] for i in range(0, len(tokens), max_len))
    return [TrainingExample(timeline.patient_id, tuple(c)) for c in chunks if len(c) >= min_len]


def segment_corpus(
    timelines: Iterable[PatientTimeline],
    max_len: int = CONTEXT_LEN,
    min_len: int = DEFAULT_MIN_LEN,
) -> List[TrainingExample]:
    """`segment_timeline` over many patients, order preserved."""
    return [ex for tl in timelines for ex in segment_timeline(tl, max_len, min_len)]


class BatchSampler:
    """
    Token-budget batcher over a fixed list of training examples.

    Each epoch visits every example exactly once in an order drawn from the
    sampler's generator. A batch is filled greedily until the next example
    would push it past ``tokens_per_batch``.

    Attributes:
        examples (List[TrainingExample]): The corpus.
        tokens_per_batch (int): Token budget per batch.
        epoch (int): Completed epochs.
    """

    def __init__(
        self,
        examples: Sequence[TrainingExample],
        tokens_per_batch: int,
        rng: Optional[np.random.Generator] = None,
        context_len: int = CONTEXT_LEN,
    ) -> None:
        if not examples:
            raise ValueError("cannot batch an empty corpus")
        if tokens_per_batch < context_len:
            raise ValueError(f"tokens_per_batch ({tokens_per_batch}) must be >= context length ({context_len})")
        longest = max(len(ex) for ex in examples)
        if longest > tokens_per_batch:
            raise ValueError(f"example of {longest} tokens exceeds the batch budget of {tokens_per_batch}")
        self.examples = list(examples)
        self.tokens_per_batch = tokens_per_batch
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.epoch = 0
        self._order: List[int] = []
        self._cursor = 0

    def _new_epoch(self) -> None:
        self._order = [int(i) for i in self.rng.permutation(len(self.examples))]
        self._cursor = 0

    def next_batch(self) -> List[TrainingExample]:
        """Return the next batch; epochs roll over transparently.

        A batch never straddles two epochs, so the last batch of an epoch may
        be smaller than the budget allows.
        """
        if self._cursor >= len(self._order):
            if self._order:
                self.epoch += 1
            self._new_epoch()
        batch: List[TrainingExample] = []
        used = 0
        while self._cursor < len(self._order):
            ex = self.examples[self._order[self._cursor]]
            if batch and used + len(ex) > self.tokens_per_batch:
                break
            batch.append(ex)
            used += len(ex)
            self._cursor += 1
        return batch

    def epoch_batches(self) -> List[List[TrainingExample]]:
        """Drain the rest of the current epoch (a fresh one if at a boundary)."""
        batches = [self.next_batch()]
        while self._cursor < len(self._order):
            batches.append(self.next_batch())
        return batches


def next_batch(sampler: BatchSampler) -> List[TrainingExample]:
    """Functional alias of `BatchSampler.next_batch`."""
    return sampler.next_batch()


__all__ = [
    "CONTEXT_LEN",
    "DEFAULT_MIN_LEN",
    "DEFAULT_RATIOS",
    "SPLIT_NAMES",
    "split_patients",
    "segment_timeline",
    "segment_corpus",
    "BatchSampler",
    "next_batch",
]
