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
Decoder-only micro transformer.

Llama-style block stack: pre-RMSNorm, rotary position embeddings on
queries and keys, grouped-query attention, SwiGLU feed-forward, untied
output head, no biases.

Functions:
 count_params: Closed-form parameter count of a config.
 init_params: Build a model with seeded Normal(0, 0.02) weights.
 nll_loss: Mean next-token negative log-likelihood in nats.
 backward: Gradients of the loss with respect to every parameter.
 sample_next: Draw the next token from the final-position distribution.
"""

from __future__ import annotations

import math
from typing import Dict, Optional, Sequence, Tuple, Union

import torch
import torch.nn as nn
import torch.nn.functional as F

from scaling_law_generator.config import INIT_STD, NORM_EPS, ModelConfig

IGNORE_INDEX: int = -100
"""Target value that padding positions carry."""


def count_params(config: ModelConfig) -> int:
    """Exact parameter count: embeddings, every projection, every gain, the head.

    Example:
        vocab 8, d_model 4, one layer, 2 heads, 2 kv heads, d_ff 8 -> 236.
    """
    d, dh = config.d_model, config.d_head
    attention = d * (config.n_heads * dh) * 2 + d * (config.n_kv_heads * dh) * 2
    feed_forward = 3 * d * config.d_ff
    per_layer = attention + feed_forward + 2 * d
    return 2 * config.vocab_size * d + d + config.n_layers * per_layer


# ── building blocks ──────────────────────────────────────────────────────────
class RMSNorm(nn.Module):
    """Root-mean-square normalization with a learned gain, initialised to 1."""

    def __init__(self, dim: int, eps: float = NORM_EPS) -> None:
        super().__init__()
        self.eps = eps
        self.weight = nn.Parameter(torch.ones(dim))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x * torch.rsqrt(x.pow(2).mean(-1, keepdim=True) + self.eps) * self.weight


def rope_tables(d_head: int, length: int, base: float, dtype: torch.dtype) -> Tuple[torch.Tensor, torch.Tensor]:
    """Cosine and sine tables of shape ``(length, d_head // 2)``."""
    freqs = 1.0 / (base ** (torch.arange(0, d_head, 2, dtype=torch.float64) / d_head))
    angles = torch.outer(torch.arange(length, dtype=torch.float64), freqs)
    return angles.cos().to(dtype), angles.sin().to(dtype)


def apply_rope(x: torch.Tensor, cos: torch.Tensor, sin: torch.Tensor) -> torch.Tensor:
    """Rotate consecutive pairs of ``x`` (batch, heads, seq, d_head)."""
    pairs = x.reshape(*x.shape[:-1], -1, 2)
    even, odd = pairs[..., 0], pairs[..., 1]
    rotated = torch.stack((even * cos - odd * sin, even * sin + odd * cos), dim=-1)
    return rotated.flatten(-2)


class Attention(nn.Module):
    """Causal grouped-query attention."""

    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.n_heads = config.n_heads
        self.n_kv_heads = config.n_kv_heads
        self.d_head = config.d_head
        self.wq = nn.Linear(config.d_model, config.n_heads * config.d_head, bias=False)
        self.wk = nn.Linear(config.d_model, config.n_kv_heads * config.d_head, bias=False)
        self.wv = nn.Linear(config.d_model, config.n_kv_heads * config.d_head, bias=False)
        self.wo = nn.Linear(config.n_heads * config.d_head, config.d_model, bias=False)

    def forward(self, x: torch.Tensor, cos: Optional[torch.Tensor], sin: Optional[torch.Tensor]) -> torch.Tensor:
        b, s, _ = x.shape
        q = self.wq(x).view(b, s, self.n_heads, self.d_head).transpose(1, 2)
        k = self.wk(x).view(b, s, self.n_kv_heads, self.d_head).transpose(1, 2)
        v = self.wv(x).view(b, s, self.n_kv_heads, self.d_head).transpose(1, 2)
        if cos is not None:
            q, k = apply_rope(q, cos, sin), apply_rope(k, cos, sin)
        group = self.n_heads // self.n_kv_heads
        if group > 1:
            k = k.repeat_interleave(group, dim=1)
            v = v.repeat_interleave(group, dim=1)

        scores = (q @ k.transpose(-2, -1)) / math.sqrt(self.d_head)
        future = torch.triu(torch.ones(s, s, dtype=torch.bool, device=x.device), diagonal=1)
        scores = scores.masked_fill(future, float("-inf"))
        out = torch.softmax(scores, dim=-1) @ v
        return self.wo(out.transpose(1, 2).reshape(b, s, self.n_heads * self.d_head))


class FeedForward(nn.Module):
    """SwiGLU: ``down(silu(gate(x)) * up(x))``."""

    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.w_gate = nn.Linear(config.d_model, config.d_ff, bias=False)
        self.w_up = nn.Linear(config.d_model, config.d_ff, bias=False)
        self.w_down = nn.Linear(config.d_ff, config.d_model, bias=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.w_down(F.silu(self.w_gate(x)) * self.w_up(x))


class Block(nn.Module):
    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.attention_norm = RMSNorm(config.d_model)
        self.attention = Attention(config)
        self.ffn_norm = RMSNorm(config.d_model)
        self.feed_forward = FeedForward(config)

    def forward(self, x: torch.Tensor, cos: Optional[torch.Tensor], sin: Optional[torch.Tensor]) -> torch.Tensor:
        x = x + self.attention(self.attention_norm(x), cos, sin)
        return x + self.feed_forward(self.ffn_norm(x))


class MicroLlama(nn.Module):
    """
    The full model.

    Attributes:
        config (ModelConfig): Architecture.
        tok_embeddings (nn.Embedding): Input token table.
        layers (nn.ModuleList): Decoder blocks.
        norm (RMSNorm): Final normalization.
        output (nn.Linear): Untied output projection.
    """

    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.config = config
        self.tok_embeddings = nn.Embedding(config.vocab_size, config.d_model)
        self.layers = nn.ModuleList(Block(config) for _ in range(config.n_layers))
        self.norm = RMSNorm(config.d_model)
        self.output = nn.Linear(config.d_model, config.vocab_size, bias=False)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        """Logits of shape ``(batch, seq, vocab)`` for ``tokens`` of shape ``(batch, seq)``.

        Raises:
            ValueError: On an empty or overlong sequence, or an id outside the vocabulary.
        """
        if tokens.dim() == 1:
            tokens = tokens.unsqueeze(0)
        s = tokens.shape[1]
        if not 1 <= s <= self.config.context_len:
            raise ValueError(f"sequence length {s} outside [1, {self.config.context_len}]")
        if tokens.numel() and (int(tokens.min()) < 0 or int(tokens.max()) >= self.config.vocab_size):
            raise ValueError(f"token ids must lie in [0, {self.config.vocab_size})")

        x = self.tok_embeddings(tokens)
        cos = sin = None
        if self.config.use_rope:
            cos, sin = rope_tables(self.config.d_head, s, self.config.rope_base, x.dtype)
            cos, sin = cos.to(x.device), sin.to(x.device)
        for layer in self.layers:
            x = layer(x, cos, sin)
        return self.output(self.norm(x))

    def decay_groups(self, weight_decay: float) -> list:
        """AdamW parameter groups; 1-D gains get no decay."""
        decay = [p for p in self.parameters() if p.dim() >= 2]
        no_decay = [p for p in self.parameters() if p.dim() < 2]
        return [
            {"params": decay, "weight_decay": weight_decay},
            {"params": no_decay, "weight_decay": 0.0},
        ]


# ── operations ───────────────────────────────────────────────────────────────
def init_params(config: ModelConfig, seed: int = 0, dtype: torch.dtype = torch.float32) -> MicroLlama:
    """Build a model whose weights depend only on ``config`` and ``seed``.

    Matrices ~ Normal(0, 0.02); the output projection of each residual branch
    (``wo``, ``w_down``) uses std ``0.02 / sqrt(2 * n_layers)``; gains are 1.
    """
    model = MicroLlama(config).to(dtype)
    gen = torch.Generator().manual_seed(int(seed))
    residual_std = INIT_STD / math.sqrt(2 * config.n_layers) if config.n_layers else INIT_STD
    with torch.no_grad():
        for name, p in model.named_parameters():
            if p.dim() < 2:
                p.fill_(1.0)
            elif name.endswith(("attention.wo.weight", "feed_forward.w_down.weight")):
                nn.init.normal_(p, mean=0.0, std=residual_std, generator=gen)
            else:
                nn.init.normal_(p, mean=0.0, std=INIT_STD, generator=gen)
    return model


def forward(model: MicroLlama, tokens: Union[Sequence[int], torch.Tensor]) -> torch.Tensor:
    """Per-position logits ``(seq, vocab)`` of a single sequence."""
    t = torch.as_tensor(tokens, dtype=torch.long)
    return model(t.view(1, -1))[0]


def nll_loss(logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """Mean of ``-log softmax(logits)[target]`` over non-ignored positions.

    Raises:
        ValueError: If the leading shapes of ``logits`` and ``targets`` differ.
    """
    if logits.shape[:-1] != targets.shape:
        raise ValueError(f"logits {tuple(logits.shape)} do not match targets {tuple(targets.shape)}")
    return F.cross_entropy(logits.reshape(-1, logits.shape[-1]), targets.reshape(-1), ignore_index=IGNORE_INDEX)


def sequence_loss(model: MicroLlama, tokens: torch.Tensor) -> torch.Tensor:
    """Next-token loss of a ``(batch, seq)`` tensor padded with `IGNORE_INDEX`."""
    inputs = tokens[:, :-1].clamp(min=0)
    targets = tokens[:, 1:]
    return nll_loss(model(inputs), targets)


def backward(
    model: MicroLlama,
    tokens: Union[Sequence[int], torch.Tensor],
    targets: Union[Sequence[int], torch.Tensor],
) -> Dict[str, torch.Tensor]:
    """Gradient of the mean loss w.r.t. every named parameter (no ``.grad`` side effects)."""
    t = torch.as_tensor(tokens, dtype=torch.long).view(1, -1)
    y = torch.as_tensor(targets, dtype=torch.long).view(1, -1)
    loss = nll_loss(model(t), y)
    names, params = zip(*model.named_parameters())
    grads = torch.autograd.grad(loss, params, allow_unused=True)
    return {n: (g if g is not None else torch.zeros_like(p)) for n, p, g in zip(names, params, grads)}


def sample_from_logits(logits: torch.Tensor, generator: torch.Generator, temperature: float = 1.0) -> int:
    """Categorical draw from ``softmax(logits / temperature)``; 0 means argmax.

    Raises:
        ValueError: On a negative temperature.
    """
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return int(torch.argmax(logits))
    probs = torch.softmax(logits.double() / temperature, dim=-1)
    return int(torch.multinomial(probs, 1, generator=generator))


def sample_next(
    model: nn.Module,
    context: Sequence[int],
    generator: torch.Generator,
    temperature: float = 1.0,
) -> int:
    """Sample the token that follows ``context``.

    Args:
        model: Any module mapping ``(1, seq)`` ids to ``(1, seq, vocab)`` logits.
        context: Token ids, at most the model context long.
        generator: Source of randomness.
        temperature: Softmax temperature; 0 picks the argmax (smallest id on ties).
    """
    with torch.no_grad():
        logits = model(torch.as_tensor(list(context), dtype=torch.long).view(1, -1))[0, -1]
    return sample_from_logits(logits, generator, temperature)


__all__ = [
    "IGNORE_INDEX",
    "count_params",
    "RMSNorm",
    "Attention",
    "FeedForward",
    "Block",
    "MicroLlama",
    "rope_tables",
    "apply_rope",
    "init_params",
    "forward",
    "nll_loss",
    "sequence_loss",
    "backward",
    "sample_from_logits",
    "sample_next",
]
