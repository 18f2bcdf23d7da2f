# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""
tokenizer.py: turns age-stamped clinical events into token timelines.

Layout of a timeline
--------------------
- **Static prefix**: demographic tokens (sorted), then the age bucket at the
  first timed event, then the start-year bucket.
- **Timed events**: sorted by age, ties broken by kind declaration order,
  then code, then value. Each event becomes 1 to 7 tokens:
  ``[kind] + [up to 3 code tokens] + [optional quantile token]``.
- **Interval tokens**: inserted before an event whose age differs from the
  previous event's age (see `intervals_for_gap`).
- **Leakage rules**: a DRG token is emitted right after the Discharge that
  closes its stay, or after the latest earlier Discharge when it is stamped
  after its stay ended. A SOFA token goes right after the IcuAdmission that
  opened its ICU stay. Orphans (no such anchor) are dropped and logged.

Assumptions
-----------
- Timeline start year comes from a Demographic event with code ``START_YEAR``
  and the year as ``numeric_value``; without one the ``YEAR//UNKNOWN`` token
  is used. A timeline with no timed event gets the ``AGE//UNKNOWN`` token.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from timeline_generator.binning import BinnerRegistry
from timeline_generator.format import (
    UNKNOWN_AGE,
    UNKNOWN_YEAR,
    age_token,
    interval_token,
    kind_token,
    quantile_token,
    year_token,
)
from timeline_generator.intervals import DEFAULT_LADDER, IntervalLadder, intervals_for_gap
from timeline_generator.models import MINUTES_PER_YEAR, ClinicalEvent, EventKind, PatientTimeline
from timeline_generator.splitters import split_code
from timeline_generator.vocab import Vocabulary, build_vocabulary

logger = logging.getLogger(__name__)

START_YEAR_CODE = "START_YEAR"
NUMERIC_KINDS = frozenset({EventKind.LAB_RESULT, EventKind.VITAL_SIGN, EventKind.SOFA_SCORE})
MAX_EVENT_TOKENS = 7


def event_token_texts(event: ClinicalEvent, binners: Optional[BinnerRegistry]) -> List[str]:
    """Token texts of a single event, 1 to 7 of them.

    Args:
        event: The event to tokenize.
        binners: Registry used for numeric values; may be ``None`` when no
            event carries a binned value.

    Returns:
        ``[kind] + code tokens + [quantile]``; a Death event is just ``[DEATH]``.
    """
    out = [kind_token(event.kind)]
    if event.kind is EventKind.DEATH:
        return out
    out.extend(split_code(event.kind, event.code))
    if event.kind in NUMERIC_KINDS and event.numeric_value is not None:
        if binners is None:
            raise ValueError(f"numeric {event.kind.value} event needs a binner registry")
        out.append(quantile_token(binners.bin(event.kind, event.code, event.numeric_value)))
    if not 1 <= len(out) <= MAX_EVENT_TOKENS:
        raise ValueError(f"{event.kind.value} event {event.code!r} spans {len(out)} tokens; at most {MAX_EVENT_TOKENS} allowed")
    return out


def tokenize_event(event: ClinicalEvent, vocab: Vocabulary, binners: Optional[BinnerRegistry]) -> List[int]:
    """Token ids of a single event; raises `UnknownTokenError` on a vocabulary mismatch."""
    return vocab.encode_many(event_token_texts(event, binners))


def encode_age_and_start_year(age_years: float, start_year: int, vocab: Vocabulary) -> Tuple[int, int]:
    """Static age-bucket and start-year-bucket token ids."""
    return vocab.encode(age_token(age_years)), vocab.encode(year_token(start_year))


@dataclass
class _Layout:
    texts: List[str]
    ages: List[Optional[float]]
    static_len: int


def _drg_anchor(timed: List[ClinicalEvent], discharges: List[int], admissions: List[int], age: float) -> Optional[int]:
    """Discharge closing the stay that contains ``age``, else the latest one before it."""
    closing = next((i for i in discharges if timed[i].age_at_event >= age), None)
    if closing is not None and not any(age < timed[j].age_at_event < timed[closing].age_at_event for j in admissions):
        return closing
    return next((i for i in reversed(discharges) if timed[i].age_at_event <= age), None)


def _attach_leaky(
    timed: List[ClinicalEvent], leaky: List[ClinicalEvent], patient_id: str
) -> Dict[int, List[ClinicalEvent]]:
    """Map index-in-``timed`` -> DRG/SOFA events emitted right after that event."""
    attached: Dict[int, List[ClinicalEvent]] = {}
    discharges = [i for i, ev in enumerate(timed) if ev.kind is EventKind.DISCHARGE]
    admissions = [i for i, ev in enumerate(timed) if ev.kind is EventKind.ADMISSION]
    icu_admissions = [i for i, ev in enumerate(timed) if ev.kind is EventKind.ICU_ADMISSION]
    for ev in sorted(leaky, key=ClinicalEvent.sort_key):
        if ev.kind is EventKind.DRG_ASSIGNMENT:
            anchor = _drg_anchor(timed, discharges, admissions, ev.age_at_event)
        else:
            anchor = next((i for i in reversed(icu_admissions) if timed[i].age_at_event <= ev.age_at_event), None)
        if anchor is None:
            logger.warning("patient %s: dropping %s %r with no anchor event", patient_id, ev.kind.value, ev.code)
            continue
        attached.setdefault(anchor, []).append(ev)
    return attached


def _layout(
    events: Sequence[ClinicalEvent], binners: Optional[BinnerRegistry], ladder: IntervalLadder
) -> _Layout:
    if not events:
        raise ValueError("cannot build a timeline from no events")
    ids = {ev.patient_id for ev in events}
    if len(ids) != 1:
        raise ValueError(f"events span several patients: {sorted(ids)}")
    patient_id = next(iter(ids))

    static = [ev for ev in events if ev.is_static]
    timed = sorted((ev for ev in events if not ev.is_static), key=ClinicalEvent.sort_key)
    deaths = [ev.age_at_event for ev in timed if ev.kind is EventKind.DEATH]
    if deaths and timed[-1].age_at_event > min(deaths):
        raise ValueError(f"patient {patient_id}: events recorded after death")

    # ---------- static prefix ----------
    texts: List[str] = []
    start_year: Optional[int] = None
    demo: List[str] = []
    for ev in static:
        if ev.code == START_YEAR_CODE and ev.numeric_value is not None:
            start_year = int(ev.numeric_value)
        else:
            demo.extend(event_token_texts(ev, binners))
    texts.extend(sorted(demo))
    texts.append(age_token(timed[0].age_at_event / MINUTES_PER_YEAR) if timed else UNKNOWN_AGE)
    texts.append(year_token(start_year) if start_year is not None else UNKNOWN_YEAR)
    ages: List[Optional[float]] = [None] * len(texts)
    static_len = len(texts)

    # ---------- timed events ----------
    leaky_kinds = (EventKind.DRG_ASSIGNMENT, EventKind.SOFA_SCORE)
    leaky = [ev for ev in timed if ev.kind in leaky_kinds]
    timed = [ev for ev in timed if ev.kind not in leaky_kinds]
    attached = _attach_leaky(timed, leaky, patient_id)

    prev_age: Optional[float] = None
    for i, ev in enumerate(timed):
        if prev_age is not None and ev.age_at_event > prev_age:
            for c in intervals_for_gap(ev.age_at_event - prev_age, ladder):
                texts.append(interval_token(ladder.labels[c]))
                ages.append(None)
        for follower in [ev] + attached.get(i, []):
            toks = event_token_texts(follower, binners)
            texts.extend(toks)
            ages.extend([ev.age_at_event] * len(toks))
        prev_age = ev.age_at_event
    return _Layout(texts=texts, ages=ages, static_len=static_len)


def timeline_token_texts(
    events: Sequence[ClinicalEvent],
    binners: Optional[BinnerRegistry],
    ladder: IntervalLadder = DEFAULT_LADDER,
) -> List[str]:
    """Token texts of a whole timeline (used to build the vocabulary)."""
    return _layout(events, binners, ladder).texts


def build_timeline(
    events: Sequence[ClinicalEvent],
    vocab: Vocabulary,
    binners: Optional[BinnerRegistry],
    ladder: IntervalLadder = DEFAULT_LADDER,
) -> PatientTimeline:
    """Build the token timeline of one patient.

    The result depends only on the set of events, not on their input order.

    Args:
        events: All events of one patient (at least one).
        vocab: Vocabulary to encode with.
        binners: Binner registry for numeric values.
        ladder: Interval classes.

    Returns:
        PatientTimeline with static prefix, interval tokens and leakage-safe
        placement of DRG/SOFA tokens.

    Raises:
        ValueError: On empty input, several patient ids, or events after death.
        UnknownTokenError: If a token is missing from ``vocab``.
    """
    lay = _layout(events, binners, ladder)
    return PatientTimeline(
        patient_id=events[0].patient_id,
        tokens=vocab.encode_many(lay.texts),
        token_ages=lay.ages,
        static_prefix_len=lay.static_len,
    )


def build_corpus_vocabulary(
    cohort: Dict[str, List[ClinicalEvent]],
    binners: Optional[BinnerRegistry],
    ladder: IntervalLadder = DEFAULT_LADDER,
) -> Vocabulary:
    """Vocabulary covering every token any patient of ``cohort`` produces."""
    bin_count = binners.bin_count if binners is not None else 10
    texts: Iterable[List[str]] = (
        timeline_token_texts(evs, binners, ladder) for _, evs in sorted(cohort.items())
    )
    return build_vocabulary(texts, ladder, bin_count)


__all__ = [
    "event_token_texts",
    "tokenize_event",
    "encode_age_and_start_year",
    "timeline_token_texts",
    "build_timeline",
    "build_corpus_vocabulary",
    "START_YEAR_CODE",
    "MAX_EVENT_TOKENS",
]
