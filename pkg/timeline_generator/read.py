# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------
"""Load and save clinical events as JSON Lines, one event object per line."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Union

from timeline_generator.models import ClinicalEvent, EventKind


class MalformedEventError(ValueError):
    """An event line that cannot be parsed; carries the 1-based line number."""

    def __init__(self, line_number: int, reason: str) -> None:
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


def _optional_float(raw, key: str, line_number: int):
    value = raw.get(key)
    if value is None:
        return None
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise MalformedEventError(line_number, f"{key} is not a number: {value!r}") from None
    if not math.isfinite(number):
        raise MalformedEventError(line_number, f"{key} is not finite: {value!r}")
    return number


def parse_event_line(line: str, line_number: int) -> ClinicalEvent:
    """Parse one JSON Lines record into a ClinicalEvent.

    Args:
        line: Text of the line.
        line_number: 1-based position, used in error messages.

    Returns:
        The parsed event.

    Raises:
        MalformedEventError: On invalid JSON, missing keys or bad values.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedEventError(line_number, f"invalid JSON ({e.msg})") from None
    if not isinstance(raw, dict):
        raise MalformedEventError(line_number, "record is not a JSON object")
    for key in ("patient_id", "kind"):
        if key not in raw:
            raise MalformedEventError(line_number, f"missing {key!r}")
    try:
        return ClinicalEvent(
            patient_id=str(raw["patient_id"]),
            age_at_event=_optional_float(raw, "age_minutes", line_number),
            kind=EventKind.parse(str(raw["kind"])),
            code=str(raw.get("code") or ""),
            numeric_value=_optional_float(raw, "value", line_number),
        )
    except ValueError as e:
        if isinstance(e, MalformedEventError):
            raise
        raise MalformedEventError(line_number, str(e)) from None


def load_events(path: Union[str, Path]) -> Dict[str, List[ClinicalEvent]]:
    """Load a JSON Lines event file, grouped by patient id.

    Blank lines are skipped. Patients keep the file's first-seen order.

    Raises:
        MalformedEventError: On a line that is not UTF-8 or not a valid event.
    """
    cohort: Dict[str, List[ClinicalEvent]] = defaultdict(list)
    with open(path, "rb") as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise MalformedEventError(line_number, f"invalid UTF-8 at byte {e.start}") from None
            if not line.strip():
                continue
            ev = parse_event_line(line, line_number)
            cohort[ev.patient_id].append(ev)
    return dict(cohort)


def event_to_record(ev: ClinicalEvent) -> dict:
    return {
        "patient_id": ev.patient_id,
        "age_minutes": ev.age_at_event,
        "kind": ev.kind.value,
        "code": ev.code,
        "value": ev.numeric_value,
    }


def save_events(cohort: Dict[str, List[ClinicalEvent]], path: Union[str, Path]) -> None:
    """Write a cohort as JSON Lines, patients in sorted id order."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pid in sorted(cohort):
            for ev in cohort[pid]:
                f.write(json.dumps(event_to_record(ev), sort_keys=True) + "\n")


__all__ = ["MalformedEventError", "parse_event_line", "load_events", "save_events", "event_to_record"]
