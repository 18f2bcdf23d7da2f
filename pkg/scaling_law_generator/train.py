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
Training loop: AdamW with warmup and cosine decay, token-budget or early-stopping runs.

Two stopping modes:

- **budget**: the batch plan is fixed up front and holds the largest number
  of whole batches whose tokens fit into ``tokens_for_budget``;
- **early stop**: validation runs on a fixed cadence and training ends after
  ``patience`` validations without improvement; the lowest-validation-loss
  weights are restored.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import torch
from torch.optim.lr_scheduler import LambdaLR
from tqdm.auto import tqdm

from scaling_law_generator.config import MIN_VALIDATION_INTERVAL, ModelConfig, TrainConfig
from scaling_law_generator.model import IGNORE_INDEX, MicroLlama, init_params, sequence_loss
from scaling_law_generator.physics import BudgetTooSmallError
from timeline_generator.corpus import BatchSampler
from timeline_generator.models import TrainingExample

logger = logging.getLogger(__name__)


class NonFiniteGradientError(FloatingPointError):
    """A gradient held NaN or Inf; training is aborted."""


class DataLimitedError(ValueError):
    """The corpus cannot supply the requested number of tokens."""


# ── schedule ─────────────────────────────────────────────────────────────────
def lr_multiplier(step: int, total_steps: int, warmup_steps: int, floor: float) -> float:
    """Learning rate at ``step`` as a fraction of the peak.

    Linear ramp ``step / warmup`` during warmup (0 at step 0), then cosine
    decay from 1 to ``floor``, reaching ``floor`` on the last step.
    """
    if step < warmup_steps:
        return step / warmup_steps
    span = total_steps - 1 - warmup_steps
    progress = 1.0 if span <= 0 else min(1.0, (step - warmup_steps) / span)
    return floor + (1.0 - floor) * (1.0 + math.cos(math.pi * progress)) / 2.0


def warmup_steps_for(total_steps: int, cfg: TrainConfig) -> int:
    return int(round(cfg.warmup_fraction * total_steps))


def make_optimizer(model: MicroLlama, cfg: TrainConfig) -> torch.optim.AdamW:
    return torch.optim.AdamW(
        model.decay_groups(cfg.weight_decay),
        lr=cfg.lr_for(model.config),
        betas=cfg.betas,
    )


def make_scheduler(optimizer: torch.optim.Optimizer, total_steps: int, cfg: TrainConfig) -> LambdaLR:
    warmup = warmup_steps_for(total_steps, cfg)
    return LambdaLR(optimizer, lambda step: lr_multiplier(step, total_steps, warmup, cfg.lr_floor_fraction))


# ── state ────────────────────────────────────────────────────────────────────
@dataclass
class LossRecord:
    step: int
    split: str
    loss: float


@dataclass
class TrainState:
    """
    Mutable bookkeeping of a run.

    Attributes:
        step (int): Optimizer steps taken.
        tokens_seen (int): Training tokens consumed.
        best_val_loss (float): Lowest validation loss so far.
        best_step (int): Step of that validation.
        validations_since_improvement (int): Early-stopping counter.
        history (List[LossRecord]): Train and validation losses.
        optimizer (Optional[torch.optim.Optimizer]): Holds the moment accumulators.
    """

    step: int = 0
    tokens_seen: int = 0
    best_val_loss: float = math.inf
    best_step: int = -1
    validations_since_improvement: int = 0
    history: List[LossRecord] = field(default_factory=list)
    optimizer: Optional[torch.optim.Optimizer] = None

    def record_validation(self, loss: float) -> bool:
        """Log a validation loss; return True when it improves on the best."""
        self.history.append(LossRecord(self.step, "validation", loss))
        if loss < self.best_val_loss:
            self.best_val_loss = loss
            self.best_step = self.step
            self.validations_since_improvement = 0
            return True
        self.validations_since_improvement += 1
        return False

    def loss_curve(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.history], columns=["step", "split", "loss"])


@dataclass
class TrainResult:
    model: MicroLlama
    state: TrainState
    final_val_loss: float

    @property
    def loss_curve(self) -> pd.DataFrame:
        return self.state.loss_curve()


# ── batches ──────────────────────────────────────────────────────────────────
def collate(examples: Sequence[TrainingExample]) -> torch.Tensor:
    """Right-pad examples with `IGNORE_INDEX` into a ``(batch, longest)`` tensor."""
    longest = max(len(ex) for ex in examples)
    out = torch.full((len(examples), longest), IGNORE_INDEX, dtype=torch.long)
    for i, ex in enumerate(examples):
        out[i, : len(ex)] = torch.as_tensor(ex.tokens, dtype=torch.long)
    return out


def corpus_tokens(examples: Sequence[TrainingExample]) -> int:
    return int(sum(len(ex) for ex in examples))


def plan_budget_batches(
    examples: Sequence[TrainingExample],
    token_budget: int,
    cfg: TrainConfig,
    context_len: int,
) -> List[List[TrainingExample]]:
    """Whole batches whose tokens add up to at most ``token_budget``.

    Raises:
        DataLimitedError: If the corpus is smaller than one batch or the budget
            needs more than ``cfg.max_epochs`` passes.
        BudgetTooSmallError: If the budget covers no whole batch.
    """
    available = corpus_tokens(examples)
    if available < cfg.tokens_per_batch:
        raise DataLimitedError(f"corpus of {available} tokens is smaller than one batch ({cfg.tokens_per_batch})")
    if token_budget > cfg.max_epochs * available:
        raise DataLimitedError(
            f"budget asks for {token_budget} tokens, corpus holds {available} x {cfg.max_epochs} epochs"
        )
    sampler = BatchSampler(examples, cfg.tokens_per_batch, np.random.default_rng(cfg.seed), context_len)
    plan: List[List[TrainingExample]] = []
    used = 0
    while True:
        batch = sampler.next_batch()
        size = corpus_tokens(batch)
        if used + size > token_budget:
            break
        plan.append(batch)
        used += size
    if not plan:
        raise BudgetTooSmallError(f"token budget {token_budget} does not cover a single batch")
    return plan


# ── steps ────────────────────────────────────────────────────────────────────
def optimizer_step(
    model: MicroLlama,
    optimizer: torch.optim.Optimizer,
    scheduler: Optional[LambdaLR],
    grad_clip: float,
) -> float:
    """Clip, check and apply the accumulated gradients; return the lr used.

    Raises:
        NonFiniteGradientError: If any gradient holds NaN or Inf.
    """
    for name, p in model.named_parameters():
        if p.grad is not None and not torch.isfinite(p.grad).all():
            raise NonFiniteGradientError(f"non-finite gradient in {name}")
    if grad_clip > 0:
        torch.nn.utils.clip_grad_norm_(model.parameters(), grad_clip)
    lr = optimizer.param_groups[0]["lr"]
    optimizer.step()
    if scheduler is not None:
        scheduler.step()
    return lr


def train_step(model: MicroLlama, batch: Sequence[TrainingExample], optimizer, scheduler, cfg: TrainConfig) -> float:
    model.train()
    optimizer.zero_grad(set_to_none=True)
    loss = sequence_loss(model, collate(batch))
    loss.backward()
    optimizer_step(model, optimizer, scheduler, cfg.grad_clip)
    return float(loss.detach())


@torch.no_grad()
def evaluate_loss(
    model: MicroLlama,
    examples: Sequence[TrainingExample],
    tokens_per_batch: int,
    max_examples: Optional[int] = None,
) -> float:
    """Mean next-token loss over ``examples``, weighted by predicted tokens."""
    model.eval()
    pool = list(examples)[:max_examples] if max_examples else list(examples)
    pool = [ex for ex in pool if len(ex) >= 2]
    if not pool:
        raise ValueError("no validation example has two or more tokens")
    total, count = 0.0, 0
    batch: List[TrainingExample] = []
    used = 0
    for ex in pool + [None]:
        if ex is None or (batch and used + len(ex) > tokens_per_batch):
            n = sum(len(b) - 1 for b in batch)
            total += float(sequence_loss(model, collate(batch))) * n
            count += n
            batch, used = [], 0
        if ex is not None:
            batch.append(ex)
            used += len(ex)
    return total / count


def validation_interval(total_steps: int, cfg: TrainConfig) -> int:
    if cfg.validation_interval is not None:
        return cfg.validation_interval
    return max(MIN_VALIDATION_INTERVAL, total_steps // 100)


# ── runs ─────────────────────────────────────────────────────────────────────
def train(
    model_config: ModelConfig,
    train_examples: Sequence[TrainingExample],
    val_examples: Sequence[TrainingExample],
    cfg: TrainConfig,
    token_budget: Optional[int] = None,
    early_stop: bool = False,
) -> TrainResult:
    """Train a freshly initialised model.

    Args:
        model_config: Architecture.
        train_examples: Training corpus.
        val_examples: Validation corpus.
        cfg: Optimizer, schedule and stopping settings.
        token_budget: Tokens to process in budget mode.
        early_stop: Use early stopping instead of a budget.

    Returns:
        TrainResult with the final (budget) or best (early stop) weights.

    Raises:
        ValueError: If neither or both stopping modes are requested, or the corpus is empty.
        DataLimitedError: Budget larger than the corpus allows.
        NonFiniteGradientError: Diverged optimisation.
    """
    if (token_budget is None) == (not early_stop):
        raise ValueError("give exactly one of token_budget or early_stop=True")
    if not train_examples or not val_examples:
        raise ValueError("training and validation corpora must be nonempty")

    dtype = torch.float64 if cfg.dtype == "float64" else torch.float32
    model = init_params(model_config, cfg.seed, dtype)
    optimizer = make_optimizer(model, cfg)
    state = TrainState(optimizer=optimizer)

    if token_budget is not None:
        plan = plan_budget_batches(train_examples, token_budget, cfg, model_config.context_len)
        total_steps = len(plan)
        batches = iter(plan)
    else:
        total_steps = cfg.max_steps
        sampler = BatchSampler(
            train_examples, cfg.tokens_per_batch, np.random.default_rng(cfg.seed), model_config.context_len
        )
        batches = (sampler.next_batch() for _ in range(total_steps))

    scheduler = make_scheduler(optimizer, total_steps, cfg)
    every = validation_interval(total_steps, cfg)
    best_weights: Optional[Dict[str, torch.Tensor]] = None
    logger.info(
        "training %s (%d steps, %s)", model_config.config_id, total_steps,
        f"budget {token_budget} tokens" if token_budget is not None else "early stopping",
    )

    for batch in tqdm(batches, total=total_steps, desc=model_config.config_id, disable=not cfg.progress, leave=False):
        loss = train_step(model, batch, optimizer, scheduler, cfg)
        state.step += 1
        state.tokens_seen += corpus_tokens(batch)
        state.history.append(LossRecord(state.step, "train", loss))
        if early_stop and (state.step % every == 0 or state.step == total_steps):
            val = evaluate_loss(model, val_examples, cfg.tokens_per_batch, cfg.max_validation_examples)
            if state.record_validation(val):
                best_weights = copy.deepcopy(model.state_dict())
            elif state.validations_since_improvement >= cfg.patience:
                logger.info("early stop at step %d, best step %d", state.step, state.best_step)
                break
        elif not early_stop and cfg.validation_interval and state.step % every == 0:
            state.record_validation(evaluate_loss(model, val_examples, cfg.tokens_per_batch, cfg.max_validation_examples))

    if early_stop:
        if best_weights is not None:
            model.load_state_dict(best_weights)
        final = state.best_val_loss
    else:
        final = evaluate_loss(model, val_examples, cfg.tokens_per_batch, cfg.max_validation_examples)
        state.record_validation(final)
    logger.info("%s: %d tokens, validation loss %.4f", model_config.config_id, state.tokens_seen, final)
    return TrainResult(model=model, state=state, final_val_loss=final)


__all__ = [
    "NonFiniteGradientError",
    "DataLimitedError",
    "lr_multiplier",
    "make_optimizer",
    "make_scheduler",
    "LossRecord",
    "TrainState",
    "TrainResult",
    "collate",
    "corpus_tokens",
    "plan_budget_batches",
    "optimizer_step",
    "train_step",
    "evaluate_loss",
    "validation_interval",
    "train",
]
