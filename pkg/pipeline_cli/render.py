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
Declarative run configuration.

A config file is one JSON object with optional sections, each rebuilt into a
dataclass; missing sections keep their defaults::

    {
      "cohort":     {...},   # SyntheticCohortConfig
      "tokenizer":  {...},   # TokenizerConfig
      "model":      {...},   # d_model, n_layers and optional ModelConfig fields
      "train":      {...},   # TrainConfig
      "sweep":      {...},   # SweepConfig (its "train" key is a TrainConfig)
      "rollout":    {...},   # RolloutConfig
      "evaluation": {...}    # EvaluationConfig
    }

Unknown sections or keys raise ``TypeError``. Command-line flags override the
file, which overrides the defaults.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from scaling_law_generator.config import ModelConfig, SweepConfig, TrainConfig, grid_model
from timeline_generator.models import SyntheticCohortConfig, TokenizerConfig
from zero_shot_evaluator.config import EvaluationConfig, RolloutConfig


@dataclass
class ModelSection:
    """
    Model shape without the vocabulary, which comes from the corpus.

    Attributes:
        d_model (int): Residual width.
        n_layers (int): Decoder blocks.
        context_len (int): Context length.
        overrides (Dict[str, Any]): Other `ModelConfig` fields; unset ones
            follow the sweep grid rule (`grid_model`).
    """

    d_model: int = 64
    n_layers: int = 2
    context_len: int = 256
    overrides: Dict[str, Any] = field(default_factory=dict)

    def build(self, vocab_size: int) -> ModelConfig:
        base = grid_model(self.d_model, self.n_layers, vocab_size, self.context_len)
        return dataclasses.replace(base, **self.overrides)


@dataclass
class RunConfig:
    """All sections of a config file."""

    cohort: SyntheticCohortConfig = field(default_factory=SyntheticCohortConfig)
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    model: ModelSection = field(default_factory=ModelSection)
    train: TrainConfig = field(default_factory=TrainConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    rollout: RolloutConfig = field(default_factory=RolloutConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """sha256 of the resolved configuration (canonical JSON)."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), default=list)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


SECTIONS = {
    "cohort": SyntheticCohortConfig,
    "tokenizer": TokenizerConfig,
    "train": TrainConfig,
    "sweep": SweepConfig,
    "rollout": RolloutConfig,
    "evaluation": EvaluationConfig,
}
_MODEL_FIELDS = {f.name for f in dataclasses.fields(ModelConfig)} - {"vocab_size"}


# ---- Helpers ---------------------------------------------------------------
def _check_keys(section: str, given: Dict[str, Any], allowed: set) -> None:
    unknown = sorted(set(given) - allowed)
    if unknown:
        raise TypeError(f"{section}: unknown keys {unknown}; allowed {sorted(allowed)}")


def _build(section: str, cls: type, raw: Any) -> Any:
    if not isinstance(raw, dict):
        raise TypeError(f"{section} must be a JSON object, got {type(raw).__name__}")
    _check_keys(section, raw, {f.name for f in dataclasses.fields(cls)})
    if cls is SweepConfig and "train" in raw:
        train = raw["train"]
        if not isinstance(train, dict):
            raise TypeError("sweep.train must be a JSON object")
        _check_keys("sweep.train", train, {f.name for f in dataclasses.fields(TrainConfig)})
        raw = {**raw, "train": TrainConfig(**train)}
    return cls(**raw)


def _build_model(raw: Any) -> ModelSection:
    if not isinstance(raw, dict):
        raise TypeError(f"model must be a JSON object, got {type(raw).__name__}")
    _check_keys("model", raw, _MODEL_FIELDS)
    rest = dict(raw)
    return ModelSection(
        d_model=int(rest.pop("d_model", 64)),
        n_layers=int(rest.pop("n_layers", 2)),
        context_len=int(rest.pop("context_len", 256)),
        overrides=rest,
    )


# ---- Main loader -----------------------------------------------------------
def json_breaker(src: Union[None, str, Path, dict]) -> RunConfig:
    """
    Load JSON (path, str path, dict or ``None`` for all defaults), split it
    into sections and rebuild each into its dataclass.
    """
    if src is None:
        config: Dict[str, Any] = {}
    elif isinstance(src, (str, Path)):
        with open(src, "r", encoding="utf-8") as f:
            config = json.load(f)
    elif isinstance(src, dict):
        config = src
    else:
        raise TypeError("src must be None, a dict or a path-like string/Path to a JSON file.")
    if not isinstance(config, dict):
        raise TypeError("config file must hold a JSON object")

    _check_keys("config", config, set(SECTIONS) | {"model"})
    built = {name: _build(name, cls, config[name]) for name, cls in SECTIONS.items() if name in config}
    if "model" in config:
        built["model"] = _build_model(config["model"])
    return RunConfig(**built)


def apply_seed(cfg: RunConfig, seed: Optional[int]) -> RunConfig:
    """Put ``seed`` into every seeded section (flag beats file)."""
    if seed is None:
        return cfg
    cfg.cohort = dataclasses.replace(cfg.cohort, seed=seed)
    cfg.tokenizer = dataclasses.replace(cfg.tokenizer, split_seed=seed)
    cfg.train = dataclasses.replace(cfg.train, seed=seed)
    cfg.sweep = dataclasses.replace(cfg.sweep, train=dataclasses.replace(cfg.sweep.train, seed=seed))
    cfg.rollout = dataclasses.replace(cfg.rollout, base_seed=seed)
    cfg.evaluation = dataclasses.replace(cfg.evaluation, seed=seed)
    return cfg


def apply_progress(cfg: RunConfig, enabled: bool) -> RunConfig:
    cfg.train = dataclasses.replace(cfg.train, progress=enabled)
    cfg.sweep = dataclasses.replace(cfg.sweep, train=dataclasses.replace(cfg.sweep.train, progress=enabled))
    cfg.rollout = dataclasses.replace(cfg.rollout, progress=enabled)
    return cfg


def config_help() -> str:
    """Defaults of every section, as shown by ``--help``."""
    return json.dumps(RunConfig().to_dict(), indent=2, default=list)


__all__ = ["ModelSection", "RunConfig", "SECTIONS", "json_breaker", "apply_seed", "apply_progress", "config_help"]
