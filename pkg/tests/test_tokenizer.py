import logging
import random

import pytest

from conftest import AGE_62
from timeline_generator.models import MINUTES_PER_DAY, ClinicalEvent, EventKind
from timeline_generator.tokenizer import (
    MAX_EVENT_TOKENS,
    build_corpus_vocabulary,
    build_timeline,
    event_token_texts,
    timeline_token_texts,
)
from timeline_generator.vocab import UnknownTokenError, build_vocabulary

EXPECTED = [
    "DEM//SEX_F", "DEMOGRAPHIC", "AGE//60-65", "YEAR//2010-2015",
    "ADMISSION", "ADMTYPE//EMERGENCY",
    "INT//15m", "LAB_RESULT", "LAB//K", "Q5",
    "INT//30m", "ICU_ADMISSION", "ICUTYPE//MICU", "SOFA_SCORE", "Q7",
    "INT//1d", "DISCHARGE", "DISCH//HOME", "DRG_ASSIGNMENT", "DRG//DRG291",
]


def test_timeline_layout(stay_events, registry):
    assert timeline_token_texts(stay_events, registry) == EXPECTED


def test_build_timeline_ages_and_prefix(stay_events, registry):
    vocab = build_vocabulary([EXPECTED])
    tl = build_timeline(stay_events, vocab, registry)
    assert vocab.decode_many(tl.tokens) == EXPECTED
    assert tl.static_prefix_len == 4
    assert tl.token_ages[:4] == [None] * 4
    # interval tokens carry no age
    assert all(tl.token_ages[i] is None for i, t in enumerate(EXPECTED) if t.startswith("INT//"))
    # SOFA is stamped with the ICU admission it follows, DRG with the discharge
    sofa = EXPECTED.index("SOFA_SCORE")
    assert tl.token_ages[sofa] == tl.token_ages[EXPECTED.index("ICU_ADMISSION")] == AGE_62 + 60.0
    drg = EXPECTED.index("DRG_ASSIGNMENT")
    assert tl.token_ages[drg] == tl.token_ages[EXPECTED.index("DISCHARGE")]


def test_input_order_does_not_matter(stay_events, registry):
    shuffled = list(stay_events)
    random.Random(3).shuffle(shuffled)
    assert timeline_token_texts(shuffled, registry) == EXPECTED


def test_event_token_counts(registry):
    death = ClinicalEvent("P", 10.0, EventKind.DEATH)
    assert event_token_texts(death, registry) == ["DEATH"]
    dx = ClinicalEvent("P", 10.0, EventKind.DIAGNOSIS, "I21.4")
    assert event_token_texts(dx, None) == ["DIAGNOSIS", "ICD//I", "ICD//I21", "ICD//I214"]
    lab = ClinicalEvent("P", 10.0, EventKind.LAB_RESULT, "K", 0.0)
    assert 1 <= len(event_token_texts(lab, registry)) <= MAX_EVENT_TOKENS


def test_numeric_event_needs_binners():
    lab = ClinicalEvent("P", 10.0, EventKind.LAB_RESULT, "K", 4.0)
    with pytest.raises(ValueError):
        event_token_texts(lab, None)


def test_events_after_death_rejected(stay_events, registry):
    events = stay_events + [ClinicalEvent("P1", AGE_62 + 100.0, EventKind.DEATH)]
    with pytest.raises(ValueError, match="after death"):
        timeline_token_texts(events, registry)


def test_death_ends_timeline(registry):
    events = [
        ClinicalEvent("P1", AGE_62, EventKind.ADMISSION, "URGENT"),
        ClinicalEvent("P1", AGE_62 + 60.0, EventKind.ICU_ADMISSION, "MICU"),
        ClinicalEvent("P1", AGE_62 + 600.0, EventKind.DEATH),
    ]
    texts = timeline_token_texts(events, registry)
    assert texts[-2:] == ["INT//6h", "DEATH"]
    assert texts[1] == "YEAR//UNKNOWN"


def test_orphan_drg_dropped(registry, caplog):
    events = [
        ClinicalEvent("P1", AGE_62, EventKind.ADMISSION, "URGENT"),
        ClinicalEvent("P1", AGE_62 + 5.0, EventKind.DRG_ASSIGNMENT, "DRG291"),
    ]
    with caplog.at_level(logging.WARNING):
        texts = timeline_token_texts(events, registry)
    assert "DRG_ASSIGNMENT" not in texts
    assert "no anchor" in caplog.text


def test_mixed_patients_rejected(stay_events, registry):
    other = ClinicalEvent("P2", AGE_62, EventKind.ADMISSION, "URGENT")
    with pytest.raises(ValueError):
        timeline_token_texts(stay_events + [other], registry)
    with pytest.raises(ValueError):
        timeline_token_texts([], registry)


def test_vocabulary_mismatch_raises(stay_events, registry, base_vocab):
    with pytest.raises(UnknownTokenError):
        build_timeline(stay_events, base_vocab, registry)


def test_corpus_vocabulary_covers_every_patient(stay_events, registry):
    vocab = build_corpus_vocabulary({"P1": stay_events}, registry)
    assert all(t in vocab for t in EXPECTED)


def test_late_drg_stays_with_its_own_discharge(registry):
    first_out = AGE_62 + MINUTES_PER_DAY
    events = [
        ClinicalEvent("P1", AGE_62, EventKind.ADMISSION, "URGENT"),
        ClinicalEvent("P1", first_out, EventKind.DISCHARGE, "HOME"),
        ClinicalEvent("P1", first_out + 60.0, EventKind.DRG_ASSIGNMENT, "DRG111"),
        ClinicalEvent("P1", first_out + 100 * MINUTES_PER_DAY, EventKind.ADMISSION, "URGENT"),
        ClinicalEvent("P1", first_out + 101 * MINUTES_PER_DAY, EventKind.DISCHARGE, "HOME"),
    ]
    texts = timeline_token_texts(events, registry)
    first = texts.index("DISCHARGE")
    assert texts[first:first + 4] == ["DISCHARGE", "DISCH//HOME", "DRG_ASSIGNMENT", "DRG//DRG111"]
    assert texts.count("DRG_ASSIGNMENT") == 1
    assert texts[-2:] == ["DISCHARGE", "DISCH//HOME"]


def test_drg_after_last_discharge_is_kept(registry):
    events = [
        ClinicalEvent("P1", AGE_62, EventKind.ADMISSION, "URGENT"),
        ClinicalEvent("P1", AGE_62 + 10.0, EventKind.DISCHARGE, "HOME"),
        ClinicalEvent("P1", AGE_62 + 70.0, EventKind.DRG_ASSIGNMENT, "DRG111"),
    ]
    assert timeline_token_texts(events, registry)[-2:] == ["DRG_ASSIGNMENT", "DRG//DRG111"]


def test_static_only_patient_keeps_prefix_shape(registry):
    events = [ClinicalEvent("P1", None, EventKind.DEMOGRAPHIC, "SEX_F")]
    assert timeline_token_texts(events, registry) == ["DEM//SEX_F", "DEMOGRAPHIC", "AGE//UNKNOWN", "YEAR//UNKNOWN"]


def test_oversized_event_rejected(registry, monkeypatch):
    monkeypatch.setattr("timeline_generator.tokenizer.split_code", lambda kind, code: ["X"] * MAX_EVENT_TOKENS)
    with pytest.raises(ValueError, match="at most"):
        event_token_texts(ClinicalEvent("P1", AGE_62, EventKind.DIAGNOSIS, "I214"), registry)
