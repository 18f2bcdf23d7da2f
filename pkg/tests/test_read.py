import json

import pytest

from timeline_generator.models import ClinicalEvent, EventKind
from timeline_generator.read import MalformedEventError, load_events, parse_event_line, save_events


def _line(**record):
    return json.dumps(record)


def test_parse_accepts_value_or_name_kinds():
    ev = parse_event_line(_line(patient_id="P1", age_minutes=120, kind="LabResult", code="K", value=4.1), 1)
    assert ev.kind is EventKind.LAB_RESULT and ev.numeric_value == pytest.approx(4.1)
    ev = parse_event_line(_line(patient_id=7, age_minutes=5, kind="DISCHARGE"), 1)
    assert ev.patient_id == "7" and ev.kind is EventKind.DISCHARGE and ev.code == ""


def test_demographic_needs_no_age():
    ev = parse_event_line(_line(patient_id="P1", kind="Demographic", code="SEX_F"), 1)
    assert ev.age_at_event is None and ev.is_static


@pytest.mark.parametrize(
    "line",
    [
        "{not json",
        "[1, 2]",
        _line(kind="Admission", age_minutes=1),
        _line(patient_id="P1", age_minutes=1, kind="Surgery"),
        _line(patient_id="P1", kind="Admission"),
        _line(patient_id="P1", age_minutes=-5, kind="Admission"),
        _line(patient_id="P1", age_minutes="soon", kind="Admission"),
        '{"patient_id": "P1", "age_minutes": NaN, "kind": "Admission"}',
        '{"patient_id": "P1", "age_minutes": Infinity, "kind": "Admission"}',
        '{"patient_id": "P1", "age_minutes": 3, "kind": "LabResult", "code": "K", "value": NaN}',
    ],
)
def test_malformed_lines(line):
    with pytest.raises(MalformedEventError):
        parse_event_line(line, 4)


def test_error_carries_line_number(tmp_path):
    path = tmp_path / "events.jsonl"
    path.write_text(
        _line(patient_id="P1", age_minutes=1, kind="Admission") + "\n\n" + "{oops\n",
        encoding="utf-8",
    )
    with pytest.raises(MalformedEventError) as info:
        load_events(path)
    assert info.value.line_number == 3
    assert str(info.value).startswith("line 3:")


def test_invalid_utf8_reports_line_number(tmp_path):
    path = tmp_path / "events.jsonl"
    good = _line(patient_id="P1", age_minutes=1, kind="Admission").encode("utf-8")
    path.write_bytes(good + b"\n" + b'{"patient_id": "\xff\xfe", "kind": "Admission"}\n')
    with pytest.raises(MalformedEventError, match="UTF-8") as info:
        load_events(path)
    assert info.value.line_number == 2


def test_non_finite_value_rejected_by_model():
    with pytest.raises(ValueError, match="Non-finite"):
        ClinicalEvent("P1", float("nan"), EventKind.ADMISSION)


def test_save_then_load_groups_by_patient(tmp_path, stay_events):
    path = tmp_path / "events.jsonl"
    save_events({"P1": stay_events}, path)
    cohort = load_events(path)
    assert list(cohort) == ["P1"]
    assert cohort["P1"] == stay_events
