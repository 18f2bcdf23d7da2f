import logging

import pytest

from timeline_generator.binning import fit_binners, fit_quantile_binner
from timeline_generator.models import ClinicalEvent, EventKind


def test_boundaries_are_empirical_deciles():
    binner = fit_quantile_binner(list(range(1, 101)))
    assert len(binner.boundaries) == 9
    assert binner.boundaries[4] == pytest.approx(50.5)


def test_bin_is_smallest_bin_whose_cut_is_not_below_value():
    binner = fit_quantile_binner(list(range(1, 101)))
    assert binner.bin(-1e9) == 0
    assert binner.bin(binner.boundaries[0]) == 0
    assert binner.bin(binner.boundaries[0] + 1e-9) == 1
    assert binner.bin(1e9) == 9


def test_constant_values_fall_in_first_bin():
    binner = fit_quantile_binner([3.0] * 20, bin_count=4)
    assert binner.boundaries == (3.0, 3.0, 3.0)
    assert binner.bin(3.0) == 0
    assert binner.bin(3.5) == 3


def test_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_quantile_binner([])
    with pytest.raises(ValueError):
        fit_quantile_binner([1.0, 2.0], bin_count=1)


def _labs(code, values):
    return [ClinicalEvent("P", 10.0, EventKind.LAB_RESULT, code, v) for v in values]


def test_sparse_codes_fall_back_to_kind_binner():
    events = _labs("K", [float(v) for v in range(60)]) + _labs("NA", [1000.0, 2000.0])
    registry = fit_binners(events, bin_count=10, min_group_size=50)
    assert ("LabResult", "K") in registry.by_code
    assert ("LabResult", "NA") not in registry.by_code
    assert registry.lookup(EventKind.LAB_RESULT, "NA").group_key == ("LabResult", "*")
    assert registry.bin(EventKind.LAB_RESULT, "K", -5.0) == 0


def test_missing_kind_raises():
    registry = fit_binners(_labs("K", [1.0, 2.0, 3.0]))
    with pytest.raises(KeyError):
        registry.lookup(EventKind.VITAL_SIGN, "HR")


def test_unseen_kind_maps_to_middle_bin(caplog):
    registry = fit_binners(_labs("K", [1.0, 2.0, 3.0]), bin_count=10)
    with caplog.at_level(logging.WARNING):
        assert registry.bin(EventKind.VITAL_SIGN, "HR", 80.0) == 5
        assert registry.bin(EventKind.VITAL_SIGN, "RR", 300.0) == 5
    assert caplog.text.count("no binner fitted for VitalSign") == 1
