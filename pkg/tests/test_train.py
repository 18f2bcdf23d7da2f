import math

import pytest

from scaling_law_generator.config import ModelConfig, TrainConfig
from scaling_law_generator.train import (
    DataLimitedError,
    NonFiniteGradientError,
    lr_multiplier,
    optimizer_step,
    make_optimizer,
    plan_budget_batches,
    train,
)
from scaling_law_generator.model import init_params
from scaling_law_generator.physics import BudgetTooSmallError
from timeline_generator.models import TrainingExample

VOCAB = 16
CFG = ModelConfig(vocab_size=VOCAB, d_model=32, n_layers=1, n_heads=2, n_kv_heads=1, d_ff=64, context_len=16)


def _cyclic_examples(n, length=16, offset=0):
    return [
        TrainingExample(f"P{i}", tuple((offset + i + j) % VOCAB for j in range(length)))
        for i in range(n)
    ]


def test_warmup_then_cosine_to_floor():
    assert lr_multiplier(0, 110, 10, 0.1) == 0.0
    assert lr_multiplier(5, 110, 10, 0.1) == pytest.approx(0.5)
    assert lr_multiplier(10, 110, 10, 0.1) == pytest.approx(1.0)
    assert lr_multiplier(109, 110, 10, 0.1) == pytest.approx(0.1)
    mid = lr_multiplier(10 + 99 // 2, 110, 10, 0.1)
    assert 0.1 < mid < 1.0


def test_no_warmup_starts_at_peak():
    assert lr_multiplier(0, 10, 0, 0.1) == pytest.approx(1.0)


def test_budget_plan_respects_token_budget():
    cfg = TrainConfig(tokens_per_batch=32, seed=0)
    plan = plan_budget_batches(_cyclic_examples(10), 70, cfg, context_len=16)
    assert len(plan) == 2
    assert sum(len(ex) for b in plan for ex in b) == 64


def test_budget_beyond_corpus_is_data_limited():
    cfg = TrainConfig(tokens_per_batch=32, max_epochs=1.0)
    with pytest.raises(DataLimitedError):
        plan_budget_batches(_cyclic_examples(10), 1000, cfg, context_len=16)
    with pytest.raises(DataLimitedError, match="smaller than one batch"):
        plan_budget_batches(_cyclic_examples(1), 8, cfg, context_len=16)


def test_budget_below_one_batch_is_too_small():
    cfg = TrainConfig(tokens_per_batch=32)
    with pytest.raises(BudgetTooSmallError):
        plan_budget_batches(_cyclic_examples(10), 8, cfg, context_len=16)


def test_budget_run_counts_tokens():
    cfg = TrainConfig(tokens_per_batch=32, peak_lr=1e-2)
    result = train(CFG, _cyclic_examples(20), _cyclic_examples(4, offset=3), cfg, token_budget=256)
    assert result.state.tokens_seen == 256
    assert result.state.step == 8
    assert math.isfinite(result.final_val_loss)
    assert list(result.loss_curve["split"].unique()) == ["train", "validation"]


def test_learns_a_cyclic_sequence():
    cfg = TrainConfig(tokens_per_batch=64, peak_lr=1e-2, max_epochs=50)
    result = train(CFG, _cyclic_examples(16), _cyclic_examples(4, offset=5), cfg, token_budget=64 * 60)
    assert result.final_val_loss < math.log(VOCAB) - 0.5


def test_early_stopping_keeps_best_weights():
    cfg = TrainConfig(tokens_per_batch=32, peak_lr=1e-2, max_steps=40, validation_interval=5, patience=2)
    result = train(CFG, _cyclic_examples(20), _cyclic_examples(4, offset=3), cfg, early_stop=True)
    vals = result.loss_curve.query("split == 'validation'")["loss"]
    assert result.final_val_loss == pytest.approx(vals.min())
    assert result.state.best_step > 0


def test_exactly_one_stopping_mode():
    cfg = TrainConfig(tokens_per_batch=32)
    with pytest.raises(ValueError):
        train(CFG, _cyclic_examples(4), _cyclic_examples(2), cfg)
    with pytest.raises(ValueError):
        train(CFG, _cyclic_examples(4), _cyclic_examples(2), cfg, token_budget=32, early_stop=True)


def test_non_finite_gradients_abort():
    model = init_params(CFG)
    optimizer = make_optimizer(model, TrainConfig())
    for p in model.parameters():
        p.grad = p.detach().clone().fill_(float("nan"))
    with pytest.raises(NonFiniteGradientError):
        optimizer_step(model, optimizer, None, 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(dtype="float16")
    with pytest.raises(ValueError):
        TrainConfig(warmup_fraction=1.0)
