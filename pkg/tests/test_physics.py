import pytest

from scaling_law_generator.config import ModelConfig, grid_model
from scaling_law_generator.physics import (
    flops_table,
    forward_flops,
    palm_flops_per_token,
    tokens_for_budget,
    training_flops,
    training_flops_per_token,
)

ONE_LAYER = ModelConfig(vocab_size=8, d_model=4, n_layers=1, n_heads=1, n_kv_heads=1, d_ff=8, context_len=2)


def test_hand_counted_forward_flops():
    f = forward_flops(ONE_LAYER, seq_len=2)
    assert f.attention_flops == 332
    assert f.dense_flops == 384
    assert f.logit_flops == 128
    assert f.embedding_flops == 0
    assert f.total_forward == 844
    assert f.per_token == 422


def test_logits_can_be_excluded():
    assert forward_flops(ONE_LAYER, 2, include_logits=False).total_forward == 844 - 128


def test_training_costs_three_forwards():
    assert training_flops_per_token(ONE_LAYER, 2) == 3 * 422
    assert training_flops(ONE_LAYER, 10, 2) == 10 * 3 * 422
    with pytest.raises(ValueError):
        training_flops(ONE_LAYER, 0, 2)


def test_tokens_for_budget_inverts_training_flops():
    per = training_flops_per_token(ONE_LAYER, 2)
    assert tokens_for_budget(ONE_LAYER, per, 2) == 1
    assert tokens_for_budget(ONE_LAYER, 5 * per + per - 1, 2) == 5
    with pytest.raises(ValueError):
        tokens_for_budget(ONE_LAYER, per - 1, 2)

    cfg = grid_model(128, 4, vocab_size=500, context_len=256)
    for budget in (1e12, 3.3e13, 7e14):
        d = tokens_for_budget(cfg, budget, 256)
        assert training_flops(cfg, d, 256) <= budget < training_flops(cfg, d + 1, 256)


def test_palm_estimate_agrees_for_wide_models():
    cfg = grid_model(256, 8, vocab_size=512, context_len=2048)
    ratio = palm_flops_per_token(cfg, 2048) / training_flops_per_token(cfg, 2048)
    assert ratio == pytest.approx(1.0, abs=0.05)


def test_flops_table_columns():
    frame = flops_table([ONE_LAYER], seq_len=2)
    row = frame.iloc[0]
    assert row["params"] == 2 * 8 * 4 + 4 + (4 * 4 * 4 + 3 * 4 * 8 + 8)
    assert row["forward_flops_per_token"] == 422
    assert row["training_flops_per_token"] == 1266
    assert row["palm_ratio"] == pytest.approx(row["palm_flops_per_token"] / 1266)
