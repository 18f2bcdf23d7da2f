# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Architecture, training and sweep configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

CONTEXT_LEN: int = 2048
"""Fixed context length; desk tests override it per config."""

ROPE_BASE: float = 10_000.0
"""Base of the rotary frequency ladder."""

NORM_EPS: float = 1e-5
"""RMSNorm epsilon."""

INIT_STD: float = 0.02
"""Std of the normal weight init."""

ADAM_BETAS: Tuple[float, float] = (0.9, 0.95)
"""First and second moment decay."""

WEIGHT_DECAY: float = 0.1
"""Decoupled weight decay on matrices; norm gains are exempt."""

WARMUP_FRACTION: float = 0.01
"""Share of steps spent on the linear warmup."""

LR_FLOOR_FRACTION: float = 0.1
"""Cosine decay ends at this fraction of the peak learning rate."""

GRAD_CLIP_NORM: float = 1.0
"""Global gradient-norm clip."""

PATIENCE: int = 5
"""Validations without improvement before early stopping."""

MIN_VALIDATION_INTERVAL: int = 50
"""Validation runs every ``max(MIN_VALIDATION_INTERVAL, total_steps // 100)`` steps."""

GRID_D_MODEL: Tuple[int, ...] = (64, 96, 128, 192, 256, 384)
"""Widths of the default sweep grid."""

GRID_N_LAYERS: Tuple[int, ...] = (2, 4, 6, 8)
"""Depths of the default sweep grid."""

GRID_HEAD_DIM: int = 32
"""Head width of grid models (``n_heads = d_model // 32``)."""

REFERENCE_EXPONENTS: Dict[str, float] = {"a": 0.58, "b": 0.44}
"""Published exponents of N_opt and D_opt, annotated on reports, never asserted."""


def default_peak_lr(d_model: int) -> float:
    """Rule-of-thumb peak learning rate ``3e-3 * 64 / d_model``."""
    return 3e-3 * 64.0 / d_model


@dataclass(frozen=True)
class ModelConfig:
    """
    Shape of a decoder-only transformer.

    Attributes:
        vocab_size (int): Number of token ids.
        d_model (int): Residual width.
        n_layers (int): Decoder blocks (0 allowed).
        n_heads (int): Query heads.
        n_kv_heads (int): Key/value heads shared by groups of query heads.
        d_ff (int): SwiGLU hidden width.
        context_len (int): Longest input sequence.
        rope_base (float): Rotary frequency base.
        use_rope (bool): ``False`` turns rotations off (angle 0 everywhere).
    """

    vocab_size: int
    d_model: int
    n_layers: int
    n_heads: int
    n_kv_heads: int
    d_ff: int
    context_len: int = CONTEXT_LEN
    rope_base: float = ROPE_BASE
    use_rope: bool = True

    def __post_init__(self) -> None:
        for name in ("vocab_size", "d_model", "n_heads", "n_kv_heads", "d_ff", "context_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_layers < 0:
            raise ValueError(f"n_layers must be >= 0, got {self.n_layers}")
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model {self.d_model} is not divisible by n_heads {self.n_heads}")
        if self.n_heads % self.n_kv_heads:
            raise ValueError(f"n_heads {self.n_heads} is not divisible by n_kv_heads {self.n_kv_heads}")
        if self.d_head % 2:
            raise ValueError(f"rotary embeddings need an even head width, got {self.d_head}")
        if self.rope_base <= 0:
            raise ValueError(f"rope_base must be positive, got {self.rope_base}")

    @property
    def d_head(self) -> int:
        return self.d_model // self.n_heads

    @property
    def config_id(self) -> str:
        """Short stable name, e.g. ``d128-l4-h4-kv1-ff336``."""
        return f"d{self.d_model}-l{self.n_layers}-h{self.n_heads}-kv{self.n_kv_heads}-ff{self.d_ff}"

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict[str, object]) -> "ModelConfig":
        kinds = {"rope_base": float, "use_rope": lambda v: str(v).lower() in ("1", "true", "yes")}
        return cls(**{k: kinds.get(k, int)(v) for k, v in d.items()})


def grid_model(d_model: int, n_layers: int, vocab_size: int, context_len: int = CONTEXT_LEN) -> ModelConfig:
    """Grid member: ``d_ff = 8/3 d_model`` rounded to a multiple of 16, GQA groups of 4."""
    n_heads = max(1, d_model // GRID_HEAD_DIM)
    return ModelConfig(
        vocab_size=vocab_size,
        d_model=d_model,
        n_layers=n_layers,
        n_heads=n_heads,
        n_kv_heads=max(1, n_heads // 4),
        d_ff=max(16, int(round(8 * d_model / 3 / 16)) * 16),
        context_len=context_len,
    )


def default_grid(
    vocab_size: int,
    context_len: int = CONTEXT_LEN,
    d_models: Sequence[int] = GRID_D_MODEL,
    n_layers: Sequence[int] = GRID_N_LAYERS,
) -> List[ModelConfig]:
    """Cartesian width x depth grid, widths outermost."""
    return [grid_model(d, l, vocab_size, context_len) for d in d_models for l in n_layers]


@dataclass
class TrainConfig:
    """
    Optimizer, schedule and stopping settings.

    Attributes:
        tokens_per_batch (int): Token budget of one batch (>= context length).
        peak_lr (Optional[float]): ``None`` picks `default_peak_lr`.
        betas (Tuple[float, float]): AdamW moment decays.
        weight_decay (float): Decoupled weight decay.
        warmup_fraction (float): Share of steps in the linear warmup.
        lr_floor_fraction (float): Final learning rate as a share of the peak.
        grad_clip (float): Global gradient-norm clip (0 disables).
        max_epochs (float): Passes over the corpus a budget run may take;
            asking for more tokens than that is a data-limited run.
        max_steps (int): Step cap of an early-stopping run.
        patience (int): Validations without improvement before stopping.
        validation_interval (Optional[int]): ``None`` uses the default cadence.
        max_validation_examples (Optional[int]): Cap on validation examples per check.
        seed (int): Seed of init and batch order.
        dtype (str): ``"float32"`` or ``"float64"``.
        progress (bool): Show a tqdm bar.
    """

    tokens_per_batch: int = 8192
    peak_lr: Optional[float] = None
    betas: Tuple[float, float] = ADAM_BETAS
    weight_decay: float = WEIGHT_DECAY
    warmup_fraction: float = WARMUP_FRACTION
    lr_floor_fraction: float = LR_FLOOR_FRACTION
    grad_clip: float = GRAD_CLIP_NORM
    max_epochs: float = 1.0
    max_steps: int = 2000
    patience: int = PATIENCE
    validation_interval: Optional[int] = None
    max_validation_examples: Optional[int] = 256
    seed: int = 0
    dtype: str = "float32"
    progress: bool = False

    def __post_init__(self) -> None:
        self.betas = tuple(self.betas)
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype!r}")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ValueError(f"warmup_fraction must lie in [0, 1), got {self.warmup_fraction}")
        if not 0.0 <= self.lr_floor_fraction <= 1.0:
            raise ValueError(f"lr_floor_fraction must lie in [0, 1], got {self.lr_floor_fraction}")
        if self.max_epochs <= 0 or self.max_steps < 1 or self.patience < 1:
            raise ValueError("max_epochs, max_steps and patience must be positive")

    def lr_for(self, model: ModelConfig) -> float:
        return self.peak_lr if self.peak_lr is not None else default_peak_lr(model.d_model)


@dataclass
class SweepConfig:
    """
    Fixed-compute sweep settings.

    Attributes:
        budgets (List[float]): Total training FLOPs per IsoFLOP profile.
        d_models (List[int]): Widths of the grid.
        n_layers (List[int]): Depths of the grid.
        context_len (int): Context (and FLOPs accounting) length.
        keep_lowest (int): Points per budget kept for the parabola fit.
        include_logits (bool): Count output-logit FLOPs.
        train (TrainConfig): Training settings of every point.
    """

    budgets: List[float] = field(default_factory=lambda: [1e12, 3e12, 1e13])
    d_models: List[int] = field(default_factory=lambda: list(GRID_D_MODEL))
    n_layers: List[int] = field(default_factory=lambda: list(GRID_N_LAYERS))
    context_len: int = 256
    keep_lowest: int = 6
    include_logits: bool = True
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self) -> None:
        if isinstance(self.train, dict):
            self.train = TrainConfig(**self.train)
        if len(self.budgets) < 3:
            raise ValueError(f"a sweep needs at least 3 budgets, got {len(self.budgets)}")
        if len(self.d_models) * len(self.n_layers) < 4:
            raise ValueError("a sweep needs at least 4 grid models per budget")
        if any(c <= 0 for c in self.budgets):
            raise ValueError("budgets must be positive")

    def grid(self, vocab_size: int) -> List[ModelConfig]:
        return default_grid(vocab_size, self.context_len, self.d_models, self.n_layers)


__all__ = [
    "CONTEXT_LEN",
    "ROPE_BASE",
    "NORM_EPS",
    "INIT_STD",
    "ADAM_BETAS",
    "WEIGHT_DECAY",
    "WARMUP_FRACTION",
    "LR_FLOOR_FRACTION",
    "GRAD_CLIP_NORM",
    "PATIENCE",
    "MIN_VALIDATION_INTERVAL",
    "GRID_D_MODEL",
    "GRID_N_LAYERS",
    "REFERENCE_EXPONENTS",
    "default_peak_lr",
    "ModelConfig",
    "grid_model",
    "default_grid",
    "TrainConfig",
    "SweepConfig",
]
