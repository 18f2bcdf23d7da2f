import math

import pytest
import torch

from scaling_law_generator.config import ModelConfig
from scaling_law_generator.model import (
    backward,
    count_params,
    forward,
    init_params,
    nll_loss,
    sample_from_logits,
    sample_next,
)

TINY = ModelConfig(vocab_size=8, d_model=4, n_layers=1, n_heads=2, n_kv_heads=2, d_ff=8, context_len=16)
SMALL = ModelConfig(vocab_size=32, d_model=16, n_layers=2, n_heads=4, n_kv_heads=2, d_ff=32, context_len=32)


def test_count_params_closed_form():
    assert count_params(TINY) == 236
    for cfg in (TINY, SMALL):
        assert count_params(cfg) == sum(p.numel() for p in init_params(cfg).parameters())


def test_init_is_seeded():
    a, b, c = init_params(SMALL, seed=1), init_params(SMALL, seed=1), init_params(SMALL, seed=2)
    for (_, pa), (_, pb), (_, pc) in zip(a.named_parameters(), b.named_parameters(), c.named_parameters()):
        assert torch.equal(pa, pb)
    assert not torch.equal(a.tok_embeddings.weight, c.tok_embeddings.weight)


def test_output_shape_and_limits():
    model = init_params(SMALL)
    assert forward(model, [1, 2, 3]).shape == (3, 32)
    with pytest.raises(ValueError):
        forward(model, list(range(33)))
    with pytest.raises(ValueError):
        forward(model, [1, 32])


def test_causal_masking():
    model = init_params(SMALL, seed=3)
    seq = [3, 1, 4, 1, 5, 9, 2, 6]
    changed = seq[:5] + [7] + seq[6:]
    a, b = forward(model, seq), forward(model, changed)
    assert torch.allclose(a[:5], b[:5], atol=1e-6)
    assert not torch.allclose(a[5:], b[5:])


def test_initial_loss_is_near_uniform():
    model = init_params(SMALL, seed=0)
    tokens = torch.randint(0, 32, (4, 17), generator=torch.Generator().manual_seed(0))
    with torch.no_grad():
        loss = nll_loss(model(tokens[:, :-1]), tokens[:, 1:])
    assert float(loss) == pytest.approx(math.log(32), abs=0.05)


def test_gradients_match_finite_differences():
    model = init_params(TINY, seed=5, dtype=torch.float64)
    tokens, targets = [1, 5, 2, 7, 3], [5, 2, 7, 3, 0]
    grads = backward(model, tokens, targets)

    def loss() -> float:
        with torch.no_grad():
            return float(nll_loss(forward(model, tokens), torch.as_tensor(targets)))

    eps = 1e-6
    params = dict(model.named_parameters())
    for name in ("tok_embeddings.weight", "layers.0.attention.wq.weight", "layers.0.feed_forward.w_up.weight", "output.weight"):
        p = params[name]
        flat = p.data.view(-1)
        for idx in (0, flat.numel() // 2, flat.numel() - 1):
            orig = float(flat[idx])
            flat[idx] = orig + eps
            up = loss()
            flat[idx] = orig - eps
            down = loss()
            flat[idx] = orig
            numeric = (up - down) / (2 * eps)
            assert float(grads[name].view(-1)[idx]) == pytest.approx(numeric, abs=1e-7, rel=1e-4)


def test_greedy_and_temperature_sampling():
    logits = torch.tensor([0.1, 2.0, 2.0, -1.0])
    gen = torch.Generator().manual_seed(0)
    assert sample_from_logits(logits, gen, temperature=0.0) == 1
    with pytest.raises(ValueError):
        sample_from_logits(logits, gen, temperature=-1.0)
    draws = {sample_from_logits(torch.tensor([0.0, 0.0]), gen) for _ in range(50)}
    assert draws == {0, 1}


def test_sample_next_is_reproducible():
    model = init_params(SMALL, seed=0)
    first = [sample_next(model, [1, 2, 3], torch.Generator().manual_seed(9)) for _ in range(3)]
    assert len(set(first)) == 1
