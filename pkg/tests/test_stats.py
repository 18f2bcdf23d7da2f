import pandas as pd
import pytest

from timeline_generator.corpus import segment_corpus
from timeline_generator.models import PatientTimeline
from timeline_generator.stats import STAT_ROWS, compute_stats, save_stats_csv, summarize_lengths


def test_summarize_lengths():
    s = summarize_lengths([1, 2, 3, 4])
    assert (s.min, s.max) == (1, 4)
    assert s.mean == pytest.approx(2.5)
    assert s.std == pytest.approx(1.118034, rel=1e-6)
    assert (s.q1, s.q2, s.q3) == pytest.approx((1.75, 2.5, 3.25))


def test_compute_stats_counts_tokens():
    tls = [PatientTimeline("A", list(range(10))), PatientTimeline("B", list(range(3)))]
    examples = segment_corpus(tls, max_len=4, min_len=2)
    stats = compute_stats(tls, examples)
    assert stats.patient_count == 2
    assert stats.total_timeline_tokens == 13
    # A -> 4, 4, 2 ; B -> 3
    assert stats.total_examples == 4
    assert stats.total_trainable_tokens == 13


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        compute_stats([], [])


def test_csv_has_one_column_per_split(tmp_path):
    tls = [PatientTimeline("A", list(range(10)))]
    stats = compute_stats(tls, segment_corpus(tls, 4, 1))
    path = tmp_path / "stats.csv"
    save_stats_csv({"train": stats, "test": stats}, path)
    frame = pd.read_csv(path, index_col=0)
    assert list(frame.columns) == ["train", "test"]
    assert tuple(frame.index) == STAT_ROWS
    assert frame.loc["patients", "train"] == 1
