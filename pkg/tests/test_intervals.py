import pytest

from timeline_generator.intervals import DEFAULT_LADDER, IntervalLadder, intervals_for_gap
from timeline_generator.models import MINUTES_PER_DAY


def test_ladder_has_thirteen_ascending_classes():
    assert len(DEFAULT_LADDER.labels) == 13
    assert DEFAULT_LADDER.minutes[0] == 5.0
    assert DEFAULT_LADDER.longest == pytest.approx(262_800.0)
    assert list(DEFAULT_LADDER.minutes) == sorted(DEFAULT_LADDER.minutes)


@pytest.mark.parametrize("gap", [0.0, 1.0, 4.999])
def test_short_gaps_emit_nothing(gap):
    assert intervals_for_gap(gap) == []


def test_single_class_up_to_six_months():
    assert intervals_for_gap(5.0) == [0]
    assert intervals_for_gap(20.0) == [1]
    assert intervals_for_gap(2 * MINUTES_PER_DAY) == [DEFAULT_LADDER.labels.index("1d")]
    assert intervals_for_gap(DEFAULT_LADDER.longest) == [12]


def test_long_gap_repeats_top_class():
    # 1.4 years
    assert intervals_for_gap(736_128.0) == [12, 12, 12]
    # just above six months rounds to one copy
    assert intervals_for_gap(DEFAULT_LADDER.longest + 1.0) == [12]
    # 2.5 half-years rounds up
    assert intervals_for_gap(2.5 * DEFAULT_LADDER.longest) == [12, 12, 12]


def test_negative_gap_rejected():
    with pytest.raises(ValueError):
        intervals_for_gap(-1.0)


def test_duration_sums_nominal_minutes():
    assert DEFAULT_LADDER.duration([0, 1]) == pytest.approx(20.0)


def test_malformed_ladder_rejected():
    minutes = list(DEFAULT_LADDER.minutes)
    minutes[3], minutes[4] = minutes[4], minutes[3]
    with pytest.raises(ValueError):
        IntervalLadder(labels=DEFAULT_LADDER.labels, minutes=tuple(minutes))
    with pytest.raises(ValueError):
        IntervalLadder(labels=DEFAULT_LADDER.labels[:12], minutes=DEFAULT_LADDER.minutes[:12])
