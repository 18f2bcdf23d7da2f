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
FLOPs accounting for training under a fixed compute budget.

Per layer, for a sequence of ``s`` tokens::

    query projection      2 s d (H dh)
    key/value projections 2 s d (2 Hkv dh)
    attention scores      2 s^2 H dh
    softmax               3 H s^2
    score-value product   2 s^2 H dh
    output projection     2 s d (H dh)
    SwiGLU (3 matrices)   2 s 3 d d_ff

plus ``2 s d V`` for the output logits. Embedding lookups cost nothing.
A training token costs three forward tokens. Every count is an exact int.

Example:
    forward_flops(one layer, d 4, 1 head, d_ff 8, vocab 8, s=2).total_forward -> 844\n
    tokens_for_budget(cfg, 3 * per_token, s) -> 1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import pandas as pd

from scaling_law_generator.config import CONTEXT_LEN, ModelConfig
from scaling_law_generator.model import count_params


class BudgetTooSmallError(ValueError):
    """A FLOPs or token budget too small to train on at all."""

BACKWARD_FACTOR: int = 3
"""Training FLOPs per forward FLOP (forward + twice-as-expensive backward)."""


@dataclass(frozen=True)
class FlopsBreakdown:
    """
    Forward-pass FLOPs of one sequence, by component.

    Attributes:
        seq_len (int): Tokens in the sequence.
        attention_flops (int): Projections, scores, softmax and score-value product, all layers.
        dense_flops (int): Feed-forward blocks, all layers.
        embedding_flops (int): Always 0.
        logit_flops (int): Output projection (0 when excluded).
        total_forward (int): Sum of the above.
    """

    seq_len: int
    attention_flops: int
    dense_flops: int
    embedding_flops: int
    logit_flops: int
    total_forward: int

    @property
    def per_token(self) -> int:
        """Forward FLOPs per token; every term carries a factor ``s`` so this is exact."""
        return self.total_forward // self.seq_len


def forward_flops(config: ModelConfig, seq_len: int = CONTEXT_LEN, include_logits: bool = True) -> FlopsBreakdown:
    """Forward FLOPs of one ``seq_len``-token sequence.

    Raises:
        ValueError: If ``seq_len < 1``.
    """
    if seq_len < 1:
        raise ValueError(f"seq_len must be >= 1, got {seq_len}")
    s, d, dh = seq_len, config.d_model, config.d_head
    h, hkv, layers = config.n_heads, config.n_kv_heads, config.n_layers

    attention = (
        2 * s * d * (h * dh)
        + 2 * s * d * (2 * hkv * dh)
        + 2 * s * s * h * dh
        + 3 * h * s * s
        + 2 * s * s * h * dh
        + 2 * s * (h * dh) * d
    )
    dense = 2 * s * 3 * d * config.d_ff
    logits = 2 * s * d * config.vocab_size if include_logits else 0
    attention_total, dense_total = layers * attention, layers * dense
    return FlopsBreakdown(
        seq_len=s,
        attention_flops=attention_total,
        dense_flops=dense_total,
        embedding_flops=0,
        logit_flops=logits,
        total_forward=attention_total + dense_total + logits,
    )


def training_flops_per_token(config: ModelConfig, seq_len: int = CONTEXT_LEN, include_logits: bool = True) -> int:
    return BACKWARD_FACTOR * forward_flops(config, seq_len, include_logits).per_token


def training_flops(
    config: ModelConfig, n_tokens: int, seq_len: int = CONTEXT_LEN, include_logits: bool = True
) -> int:
    """``3 * forward_per_token * n_tokens``.

    Raises:
        ValueError: If ``n_tokens < 1``.
    """
    if n_tokens < 1:
        raise ValueError(f"n_tokens must be >= 1, got {n_tokens}")
    return training_flops_per_token(config, seq_len, include_logits) * int(n_tokens)


def palm_flops_per_token(config: ModelConfig, seq_len: int = CONTEXT_LEN) -> int:
    """Training FLOPs per token the PaLM way: ``6 N + 12 L H dh s``."""
    return 6 * count_params(config) + 12 * config.n_layers * config.n_heads * config.d_head * seq_len


def tokens_for_budget(
    config: ModelConfig, budget_flops: float, seq_len: int = CONTEXT_LEN, include_logits: bool = True
) -> int:
    """Largest token count whose training cost fits in ``budget_flops``.

    Raises:
        BudgetTooSmallError: If the budget does not cover a single token.
    """
    per_token = training_flops_per_token(config, seq_len, include_logits)
    budget = int(budget_flops)
    if budget < per_token:
        raise BudgetTooSmallError(f"budget {budget_flops:.3e} FLOPs is below the cost of one token ({per_token})")
    return budget // per_token


def flops_table(configs: Iterable[ModelConfig], seq_len: int = CONTEXT_LEN, include_logits: bool = True) -> pd.DataFrame:
    """Per-model accounting: params, forward/training FLOPs per token, PaLM ratio."""
    rows = []
    for cfg in configs:
        fwd = forward_flops(cfg, seq_len, include_logits).per_token
        train = BACKWARD_FACTOR * fwd
        palm = palm_flops_per_token(cfg, seq_len)
        rows.append(
            {
                "config_id": cfg.config_id,
                "params": count_params(cfg),
                "forward_flops_per_token": fwd,
                "training_flops_per_token": train,
                "palm_flops_per_token": palm,
                "palm_ratio": palm / train,
            }
        )
    return pd.DataFrame(rows)


__all__ = [
    "BACKWARD_FACTOR",
    "BudgetTooSmallError",
    "FlopsBreakdown",
    "forward_flops",
    "training_flops_per_token",
    "training_flops",
    "palm_flops_per_token",
    "tokens_for_budget",
    "flops_table",
]
