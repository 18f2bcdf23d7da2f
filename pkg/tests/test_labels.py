import pytest

from conftest import icu_timeline, readmission_timeline, timeline_from
from zero_shot_evaluator.core import MissingAnchorError
from zero_shot_evaluator.labels import (
    anchor_index,
    icu_mortality_label,
    mortality_anchor,
    readmission_anchor,
    readmission_label,
    task_label,
)


@pytest.mark.parametrize("gap_days, expected", [(29, 1), (30, 1), (31, 0)])
def test_readmission_window_edge_counts(base_vocab, gap_days, expected):
    assert readmission_label(readmission_timeline(base_vocab, gap_days), base_vocab) == expected


def test_readmission_anchor_is_last_discharge(base_vocab):
    tl = readmission_timeline(base_vocab, 10)
    assert readmission_anchor(tl.tokens, base_vocab) == 2
    assert anchor_index(tl.tokens, "readmission_30d", base_vocab) == 2
    two_stays = timeline_from(
        base_vocab,
        [("ADMISSION", 0.0), ("DISCHARGE", 10.0), ("INT//1d", None), ("ADMISSION", 1450.0), ("DISCHARGE", 1460.0)],
    )
    assert readmission_anchor(two_stays.tokens, base_vocab) == 4
    assert readmission_label(two_stays, base_vocab) == 0


def test_single_stay_is_a_negative(base_vocab):
    tl = timeline_from(base_vocab, [("ADMISSION", 0.0), ("INT//1d", None), ("DISCHARGE", 1440.0)])
    assert readmission_anchor(tl.tokens, base_vocab) == 2
    assert readmission_label(tl, base_vocab) == 0


def test_no_discharge_has_no_readmission_anchor(base_vocab):
    tl = timeline_from(base_vocab, [("ADMISSION", 0.0), ("INT//1h", None), ("ICU_ADMISSION", 60.0)])
    with pytest.raises(MissingAnchorError):
        readmission_anchor(tl.tokens, base_vocab)
    assert readmission_label(tl, base_vocab) is None


def test_readmission_needs_ages(base_vocab):
    tl = readmission_timeline(base_vocab, 5)
    tl.token_ages[2] = None
    with pytest.raises(ValueError, match="without an age"):
        readmission_label(tl, base_vocab)


def test_death_in_icu(base_vocab):
    tl = timeline_from(
        base_vocab, [("ADMISSION", 0.0), ("ICU_ADMISSION", 10.0), ("INT//1d", None), ("DEATH", 1450.0)]
    )
    assert icu_mortality_label(tl, base_vocab) == 1
    assert task_label(tl, "icu_mortality", base_vocab) == 1


def test_death_after_icu_discharge_is_negative(base_vocab):
    tl = timeline_from(
        base_vocab,
        [("ICU_ADMISSION", 0.0), ("ICU_DISCHARGE", 100.0), ("INT//1d", None), ("DEATH", 1540.0)],
    )
    assert icu_mortality_label(tl, base_vocab) == 0


def test_last_icu_stay_is_the_anchor(base_vocab):
    tl = timeline_from(
        base_vocab,
        [("ICU_ADMISSION", 0.0), ("ICU_DISCHARGE", 50.0), ("ICU_ADMISSION", 90.0), ("DEATH", 200.0)],
    )
    assert mortality_anchor(tl.tokens, base_vocab) == 2
    assert icu_mortality_label(tl, base_vocab) == 1


def test_no_icu_stay(base_vocab):
    tl = timeline_from(base_vocab, [("ADMISSION", 0.0), ("DISCHARGE", 10.0)])
    assert icu_mortality_label(tl, base_vocab) is None
    with pytest.raises(MissingAnchorError):
        mortality_anchor(tl.tokens, base_vocab)


def test_icu_fixture_is_eligible(base_vocab):
    assert icu_mortality_label(icu_timeline(base_vocab), base_vocab) == 0


def test_unknown_task(base_vocab):
    with pytest.raises(ValueError, match="unknown task"):
        task_label(icu_timeline(base_vocab), "sepsis", base_vocab)
