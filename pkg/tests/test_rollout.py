import logging

import pytest
import torch
from torch import nn

from conftest import ConstantModel, ScriptedModel, UniformModel, icu_timeline, readmission_timeline, timeline_from
from zero_shot_evaluator.config import RolloutConfig
from zero_shot_evaluator.core import MissingAnchorError, Terminal
from zero_shot_evaluator.rollout import (
    effective_window,
    estimate_icu_mortality,
    estimate_readmission_30d,
    estimate_risk,
    mortality_task,
    prefix_for_task,
    readmission_task,
    rollout_seed,
    score_cohort,
    simulate_rollout,
)


def _gen(seed=0):
    return torch.Generator().manual_seed(seed)


class WindowProbe(nn.Module):
    """Emits ``token`` and records the longest input it was shown."""

    def __init__(self, vocab_size, token):
        super().__init__()
        self.inner = ConstantModel(vocab_size, token)
        self.longest = 0

    def forward(self, tokens):
        self.longest = max(self.longest, tokens.shape[-1])
        return self.inner(tokens)


def test_certain_death(base_vocab):
    model = ConstantModel(len(base_vocab), base_vocab.special("death"))
    est = estimate_icu_mortality(model, icu_timeline(base_vocab), base_vocab, RolloutConfig(n_rollouts=5))
    assert est.probability == 1.0
    assert (est.event_count, est.rollout_count, est.censored_count) == (5, 5, 0)


def test_certain_discharge(base_vocab):
    model = ConstantModel(len(base_vocab), base_vocab.special("discharge"))
    outcome = simulate_rollout(model, [1, 2], mortality_task(base_vocab).rules, _gen(), 10, 8)
    assert outcome.terminal is Terminal.DISCHARGE
    assert outcome.tokens_generated == 1


def test_long_interval_exceeds_readmission_window(base_vocab):
    model = ConstantModel(len(base_vocab), base_vocab.encode("INT//6mt"))
    outcome = simulate_rollout(model, [1], readmission_task(base_vocab).rules, _gen(), 10, 8)
    assert outcome.terminal is Terminal.TIME_EXCEEDED
    assert outcome.tokens_generated == 1
    assert outcome.simulated_elapsed_minutes == 262_800.0


def test_no_stop_rule_is_censored(base_vocab):
    model = ConstantModel(len(base_vocab), base_vocab.encode("LAB_RESULT"))
    outcome = simulate_rollout(model, [1], mortality_task(base_vocab).rules, _gen(), 5, 8)
    assert outcome.terminal is Terminal.CENSORED
    assert outcome.tokens_generated == 5

    est = estimate_icu_mortality(
        model, icu_timeline(base_vocab), base_vocab, RolloutConfig(n_rollouts=3, max_generated_tokens=5)
    )
    assert est.probability == 0.0
    assert est.censored_count == 3


def test_readmission_inside_window(base_vocab):
    week, day = base_vocab.encode("INT//1w"), base_vocab.encode("INT//1d")
    model = ScriptedModel(len(base_vocab), [week] * 4 + [day, base_vocab.special("admission")])
    outcome = simulate_rollout(model, [1], readmission_task(base_vocab).rules, _gen(), 20, 8)
    assert outcome.terminal is Terminal.ADMISSION
    assert outcome.tokens_generated == 6
    assert outcome.simulated_elapsed_minutes == 29 * 1440.0


def test_readmission_after_a_month_is_too_late(base_vocab):
    model = ScriptedModel(len(base_vocab), [base_vocab.encode("INT//1mt"), base_vocab.special("admission")])
    outcome = simulate_rollout(model, [1], readmission_task(base_vocab).rules, _gen(), 20, 8)
    assert outcome.terminal is Terminal.TIME_EXCEEDED
    assert model.calls == 1


def test_window_slides_instead_of_growing(base_vocab):
    probe = WindowProbe(len(base_vocab), base_vocab.encode("LAB_RESULT"))
    simulate_rollout(probe, [1, 2, 3], mortality_task(base_vocab).rules, _gen(), 10, 3)
    assert probe.longest == 3


def test_context_checks(base_vocab):
    model = ConstantModel(len(base_vocab), base_vocab.special("death"))
    rules = mortality_task(base_vocab).rules
    with pytest.raises(ValueError, match="empty"):
        simulate_rollout(model, [], rules, _gen(), 5, 4)
    with pytest.raises(ValueError, match="exceeds"):
        simulate_rollout(model, [1, 2, 3, 4, 5], rules, _gen(), 5, 4)


def test_prefix_ends_at_anchor(base_vocab):
    tl = readmission_timeline(base_vocab, 10)
    assert prefix_for_task(tl.tokens, "readmission_30d", base_vocab) == tl.tokens[:3]
    assert prefix_for_task(tl.tokens, "readmission_30d", base_vocab, context_len=2) == tl.tokens[1:3]
    with pytest.raises(MissingAnchorError):
        prefix_for_task(tl.tokens, "icu_mortality", base_vocab)


def test_window_capped_by_model_context(base_vocab):
    class WithConfig(ConstantModel):
        class config:
            context_len = 64

    model = WithConfig(len(base_vocab), 0)
    assert effective_window(model, RolloutConfig(context_len=2048)) == 64
    assert effective_window(model, RolloutConfig(context_len=16)) == 16
    assert effective_window(ConstantModel(len(base_vocab), 0), RolloutConfig(context_len=16)) == 16


def test_rollout_seed_is_stable():
    assert rollout_seed(0, "P1", 3) == rollout_seed(0, "P1", 3)
    assert rollout_seed(0, "P1", 3) != rollout_seed(0, "P1", 4)
    assert rollout_seed(0, "P1", 3) != rollout_seed(1, "P1", 3)
    assert 0 <= rollout_seed(7, "P000123", 19) < 2**63


def test_fair_coin_scores_near_half(base_vocab):
    model = UniformModel(len(base_vocab), [base_vocab.special("death"), base_vocab.special("icu_discharge")])
    timelines = [icu_timeline(base_vocab, f"P{i}") for i in range(200)]
    labels = {tl.patient_id: i % 2 for i, tl in enumerate(timelines)}
    cohort = score_cohort(model, timelines, "icu_mortality", base_vocab, RolloutConfig(n_rollouts=20), labels)
    assert len(cohort) == 200
    scores, _ = cohort.arrays()
    assert 0.45 <= scores.mean() <= 0.55
    assert cohort.class_counts == (100, 100)


def test_scores_do_not_depend_on_patient_order(base_vocab):
    model = UniformModel(len(base_vocab), [base_vocab.special("death"), base_vocab.special("icu_discharge")])
    timelines = [icu_timeline(base_vocab, f"P{i}") for i in range(12)]
    config = RolloutConfig(n_rollouts=8, base_seed=3)
    forward = score_cohort(model, timelines, "icu_mortality", base_vocab, config)
    backward = score_cohort(model, timelines[::-1], "icu_mortality", base_vocab, config)
    assert dict(zip(forward.patient_ids, forward.scores)) == dict(zip(backward.patient_ids, backward.scores))


def test_ineligible_patients_are_skipped(base_vocab, caplog):
    model = ConstantModel(len(base_vocab), base_vocab.special("death"))
    no_icu = timeline_from(base_vocab, [("ADMISSION", 0.0), ("DISCHARGE", 10.0)], "P9")
    with caplog.at_level(logging.WARNING):
        cohort = score_cohort(
            model, [icu_timeline(base_vocab), no_icu], "icu_mortality", base_vocab, RolloutConfig(n_rollouts=2)
        )
    assert cohort.patient_ids == ["P1"]
    assert "P9" in caplog.text
    with pytest.raises(ValueError, match="no eligible"):
        score_cohort(model, [no_icu], "icu_mortality", base_vocab, RolloutConfig(n_rollouts=2))


def test_readmission_estimate_from_anchor(base_vocab):
    model = ConstantModel(len(base_vocab), base_vocab.special("admission"))
    est = estimate_readmission_30d(model, readmission_timeline(base_vocab, 40), base_vocab, RolloutConfig(n_rollouts=4))
    assert est.probability == 1.0
    same = estimate_risk(model, readmission_timeline(base_vocab, 40), "readmission_30d", base_vocab, RolloutConfig(n_rollouts=4))
    assert same == est
