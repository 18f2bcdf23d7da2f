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
Monte-Carlo trajectory simulation.

A rollout starts from a patient's history up to the task anchor, samples one
token at a time and slides the window (oldest token dropped) once it is
full. It stops at the first stop token, when generated interval tokens add
up to more than the task's time limit, or, failing both, at the token cap
(censored). A risk estimate is the share of rollouts ending in the task's
event.

Every rollout draws from its own generator seeded from
``(base_seed, patient_id, rollout_index)``, so scores do not depend on the
order in which patients or rollouts are processed.
"""

from __future__ import annotations

import hashlib
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import torch
from torch import nn
from tqdm.auto import tqdm

from scaling_law_generator.model import sample_next
from timeline_generator.models import PatientTimeline
from timeline_generator.vocab import Vocabulary
from zero_shot_evaluator.config import READMISSION_WINDOW_MINUTES, TASKS, RolloutConfig
from zero_shot_evaluator.core import MissingAnchorError, RiskEstimate, ScoredCohort, Terminal, TrajectoryOutcome
from zero_shot_evaluator.labels import anchor_index, task_label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StopRules:
    """
    When a rollout ends.

    Attributes:
        stop_tokens (Dict[int, Terminal]): Token id -> terminal it signals.
        time_limit_minutes (Optional[float]): TIME_EXCEEDED once simulated time
            is strictly above this.
        interval_minutes (Dict[int, float]): Nominal duration of each interval token id.
    """

    stop_tokens: Dict[int, Terminal]
    time_limit_minutes: Optional[float] = None
    interval_minutes: Dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class TaskSpec:
    """Stop rules of a task and the terminal counted as its event."""

    name: str
    rules: StopRules
    event: Terminal


def mortality_task(vocab: Vocabulary) -> TaskSpec:
    """Death is the event; ICU or hospital discharge ends the stay alive."""
    rules = StopRules(
        stop_tokens={
            vocab.special("death"): Terminal.DEATH,
            vocab.special("icu_discharge"): Terminal.DISCHARGE,
            vocab.special("discharge"): Terminal.DISCHARGE,
        },
        interval_minutes=vocab.interval_minutes,
    )
    return TaskSpec("icu_mortality", rules, Terminal.DEATH)


def readmission_task(vocab: Vocabulary, window_minutes: float = READMISSION_WINDOW_MINUTES) -> TaskSpec:
    """A new admission within the window is the event; death and time-out are not."""
    rules = StopRules(
        stop_tokens={
            vocab.special("admission"): Terminal.ADMISSION,
            vocab.special("death"): Terminal.DEATH,
        },
        time_limit_minutes=window_minutes,
        interval_minutes=vocab.interval_minutes,
    )
    return TaskSpec("readmission_30d", rules, Terminal.ADMISSION)


def task_spec(task: str, vocab: Vocabulary) -> TaskSpec:
    if task == "icu_mortality":
        return mortality_task(vocab)
    if task == "readmission_30d":
        return readmission_task(vocab)
    raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")


def rollout_seed(base_seed: int, patient_id: str, rollout_index: int) -> int:
    """Stable 63-bit seed of one rollout."""
    digest = hashlib.blake2b(f"{base_seed}:{patient_id}:{rollout_index}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") & (2**63 - 1)


def effective_window(model: nn.Module, config: RolloutConfig) -> int:
    """Rollout window, never longer than the model's own context."""
    model_cfg = getattr(model, "config", None)
    limit = getattr(model_cfg, "context_len", None)
    return min(config.context_len, limit) if limit else config.context_len


def prefix_for_task(
    tokens: Sequence[int],
    task: str,
    vocab: Vocabulary,
    context_len: int = RolloutConfig.context_len,
) -> List[int]:
    """History up to and including the task anchor, at most ``context_len`` tokens.

    Raises:
        MissingAnchorError: If the timeline has no anchor for ``task``.
    """
    end = anchor_index(tokens, task, vocab) + 1
    return list(tokens[max(0, end - context_len):end])


def simulate_rollout(
    model: nn.Module,
    context: Sequence[int],
    rules: StopRules,
    generator: torch.Generator,
    max_generated_tokens: int,
    context_len: int,
    temperature: float = 1.0,
) -> TrajectoryOutcome:
    """Sample one future after ``context``.

    Raises:
        ValueError: If ``context`` is empty or longer than ``context_len``.
    """
    if not context:
        raise ValueError("rollout context is empty")
    if len(context) > context_len:
        raise ValueError(f"context of {len(context)} tokens exceeds window {context_len}")
    window = deque(context, maxlen=context_len)
    elapsed = 0.0
    for n in range(1, max_generated_tokens + 1):
        tok = sample_next(model, window, generator, temperature)
        window.append(tok)
        elapsed += rules.interval_minutes.get(tok, 0.0)
        if tok in rules.stop_tokens:
            return TrajectoryOutcome(rules.stop_tokens[tok], n, elapsed)
        if rules.time_limit_minutes is not None and elapsed > rules.time_limit_minutes:
            return TrajectoryOutcome(Terminal.TIME_EXCEEDED, n, elapsed)
    return TrajectoryOutcome(Terminal.CENSORED, max_generated_tokens, elapsed)


def estimate_risk(
    model: nn.Module,
    timeline: PatientTimeline,
    task: str,
    vocab: Vocabulary,
    config: RolloutConfig,
) -> RiskEstimate:
    """Run ``config.n_rollouts`` futures from the task anchor and count events."""
    spec = task_spec(task, vocab)
    window = effective_window(model, config)
    context = prefix_for_task(timeline.tokens, task, vocab, window)
    outcomes = []
    for i in range(config.n_rollouts):
        gen = torch.Generator().manual_seed(rollout_seed(config.base_seed, timeline.patient_id, i))
        outcomes.append(
            simulate_rollout(model, context, spec.rules, gen, config.max_generated_tokens, window, config.temperature)
        )
    return RiskEstimate.from_outcomes(outcomes, spec.event)


def estimate_icu_mortality(
    model: nn.Module, timeline: PatientTimeline, vocab: Vocabulary, config: Optional[RolloutConfig] = None
) -> RiskEstimate:
    """Share of rollouts from the last ICU admission that end in death."""
    return estimate_risk(model, timeline, "icu_mortality", vocab, config or RolloutConfig())


def estimate_readmission_30d(
    model: nn.Module, timeline: PatientTimeline, vocab: Vocabulary, config: Optional[RolloutConfig] = None
) -> RiskEstimate:
    """Share of rollouts from the anchor discharge that reach an admission within 30 days."""
    return estimate_risk(model, timeline, "readmission_30d", vocab, config or RolloutConfig())


def score_cohort(
    model: nn.Module,
    timelines: Sequence[PatientTimeline],
    task: str,
    vocab: Vocabulary,
    config: Optional[RolloutConfig] = None,
    labels: Optional[Mapping[str, Optional[int]]] = None,
) -> ScoredCohort:
    """Score every eligible patient of ``timelines`` on ``task``.

    Args:
        model: Trained model (or any module with the same call signature).
        timelines: Held-out patients.
        task: One of `TASKS`.
        vocab: Vocabulary the timelines were encoded with.
        config: Rollout knobs.
        labels: Patient id -> true label. When omitted, labels are derived from
            the timelines' token ages.

    Returns:
        ScoredCohort in the order of ``timelines``; patients without an anchor
        or a label are skipped with a warning.

    Raises:
        ValueError: If no patient is eligible.
    """
    config = config or RolloutConfig()
    cohort = ScoredCohort(task=task)
    skipped: List[str] = []
    for tl in tqdm(timelines, desc=f"rollouts {task}", disable=not config.progress):
        label = labels.get(tl.patient_id) if labels is not None else task_label(tl, task, vocab)
        if label is None:
            skipped.append(tl.patient_id)
            continue
        try:
            estimate = estimate_risk(model, tl, task, vocab, config)
        except MissingAnchorError:
            skipped.append(tl.patient_id)
            continue
        cohort.add(tl.patient_id, estimate, int(label))
    if skipped:
        logger.warning("%s: %d patients without anchor or label skipped: %s", task, len(skipped), ", ".join(skipped[:20]))
    if not len(cohort):
        raise ValueError(f"no eligible patients for task {task!r}")
    censored = sum(cohort.censored_counts)
    if censored:
        logger.warning("%s: %d censored rollouts counted as non-events", task, censored)
    return cohort


__all__ = [
    "StopRules",
    "TaskSpec",
    "mortality_task",
    "readmission_task",
    "task_spec",
    "rollout_seed",
    "effective_window",
    "prefix_for_task",
    "simulate_rollout",
    "estimate_risk",
    "estimate_icu_mortality",
    "estimate_readmission_30d",
    "score_cohort",
]
