import numpy as np
import pytest

from timeline_generator.corpus import BatchSampler, segment_corpus, segment_timeline, split_patients
from timeline_generator.models import PatientTimeline, TrainingExample


def test_split_sizes_and_disjointness():
    ids = [f"P{i:03d}" for i in range(101)]
    split = split_patients(ids, seed=4)
    assert [len(split[k]) for k in ("train", "validation", "test")] == [81, 10, 10]
    assert sorted(sum(split.values(), [])) == ids


def test_split_is_deterministic_and_order_free():
    ids = [f"P{i:03d}" for i in range(50)]
    assert split_patients(ids, seed=1) == split_patients(list(reversed(ids)), seed=1)
    assert split_patients(ids, seed=1) != split_patients(ids, seed=2)


def test_split_rejects_bad_input():
    with pytest.raises(ValueError):
        split_patients([])
    with pytest.raises(ValueError):
        split_patients(["a", "b"], ratios=(0.5, 0.5, 0.5))


def test_segmentation_keeps_patient_boundaries():
    tl = PatientTimeline("P1", tokens=list(range(5000)))
    chunks = segment_timeline(tl, max_len=2048, min_len=2)
    assert [len(c) for c in chunks] == [2048, 2048, 904]
    assert sum((list(c.tokens) for c in chunks), []) == tl.tokens


def test_short_tail_dropped():
    tl = PatientTimeline("P1", tokens=list(range(2050)))
    assert [len(c) for c in segment_timeline(tl, max_len=2048, min_len=32)] == [2048]


def test_no_example_spans_two_patients():
    tls = [PatientTimeline("A", [1] * 10), PatientTimeline("B", [2] * 7)]
    examples = segment_corpus(tls, max_len=4, min_len=1)
    for ex in examples:
        assert len(set(ex.tokens)) == 1
        assert ex.tokens[0] == (1 if ex.patient_id == "A" else 2)


def test_bad_lengths_rejected():
    with pytest.raises(ValueError):
        segment_timeline(PatientTimeline("P", [1, 2]), max_len=4, min_len=8)


def _examples(lengths):
    return [TrainingExample(f"P{i}", tuple(range(n))) for i, n in enumerate(lengths)]


def test_sampler_visits_every_example_once_per_epoch():
    examples = _examples([8, 5, 8, 3, 6, 8, 2])
    sampler = BatchSampler(examples, tokens_per_batch=16, rng=np.random.default_rng(0), context_len=8)
    batches = sampler.epoch_batches()
    seen = sorted(ex.patient_id for b in batches for ex in b)
    assert seen == sorted(ex.patient_id for ex in examples)
    assert all(sum(len(ex) for ex in b) <= 16 for b in batches)
    sampler.next_batch()
    assert sampler.epoch == 1


def test_sampler_rejects_oversized_examples():
    with pytest.raises(ValueError):
        BatchSampler(_examples([20]), tokens_per_batch=16, context_len=8)
    with pytest.raises(ValueError):
        BatchSampler(_examples([4]), tokens_per_batch=4, context_len=8)
    with pytest.raises(ValueError):
        BatchSampler([], tokens_per_batch=16, context_len=8)
