# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Data models for clinical events, patient timelines and the corpus built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple


MINUTES_PER_DAY: float = 1440.0
MINUTES_PER_YEAR: float = 525_600.0


class EventKind(str, Enum):
    """Clinical event categories, declared in tie-break order."""

    DEMOGRAPHIC = "Demographic"
    ADMISSION = "Admission"
    ICU_ADMISSION = "IcuAdmission"
    DIAGNOSIS = "Diagnosis"
    PROCEDURE = "Procedure"
    LAB_RESULT = "LabResult"
    VITAL_SIGN = "VitalSign"
    SOFA_SCORE = "SofaScore"
    MEDICATION = "Medication"
    ICU_DISCHARGE = "IcuDischarge"
    DISCHARGE = "Discharge"
    DRG_ASSIGNMENT = "DrgAssignment"
    DEATH = "Death"

    @property
    def order(self) -> int:
        """Position of the kind in the declaration order."""
        return _KIND_ORDER[self]

    @classmethod
    def parse(cls, text: str) -> "EventKind":
        """Look a kind up by its value (``"LabResult"``) or name (``"LAB_RESULT"``)."""
        try:
            return cls(text)
        except ValueError:
            try:
                return cls[text]
            except KeyError:
                raise ValueError(f"Unknown event kind: {text!r}") from None


_KIND_ORDER = {kind: i for i, kind in enumerate(EventKind)}


@dataclass(frozen=True)
class ClinicalEvent:
    """
    A single age-stamped clinical event of one patient.

    Attributes:
        patient_id (str): Opaque patient identifier.
        age_at_event (Optional[float]): Minutes since birth; ``None`` for static
            (Demographic) events only.
        kind (EventKind): Event category.
        code (str): Code in its native system (ICD-10, ATC, local).
        numeric_value (Optional[float]): Measured value, code-specific units.
    """

    patient_id: str
    age_at_event: Optional[float]
    kind: EventKind
    code: str = ""
    numeric_value: Optional[float] = None

    def __post_init__(self) -> None:
        if self.numeric_value is not None and not math.isfinite(self.numeric_value):
            raise ValueError(f"Non-finite value {self.numeric_value} for patient {self.patient_id!r}")
        if self.age_at_event is not None and not math.isfinite(self.age_at_event):
            raise ValueError(f"Non-finite age {self.age_at_event} for patient {self.patient_id!r}")
        if self.kind is EventKind.DEMOGRAPHIC:
            return
        if self.age_at_event is None:
            raise ValueError(f"{self.kind.value} event of patient {self.patient_id!r} has no age")
        if self.age_at_event < 0:
            raise ValueError(f"Negative age {self.age_at_event} for patient {self.patient_id!r}")

    @property
    def is_static(self) -> bool:
        return self.kind is EventKind.DEMOGRAPHIC

    def sort_key(self) -> Tuple[float, int, str, float]:
        """Total order used when laying events out on a timeline."""
        value = float("-inf") if self.numeric_value is None else float(self.numeric_value)
        return (float(self.age_at_event or 0.0), self.kind.order, self.code, value)


@dataclass
class PatientTimeline:
    """
    Tokenized timeline of one patient.

    Attributes:
        patient_id (str): Patient identifier.
        tokens (List[int]): Token ids in timeline order.
        token_ages (List[Optional[float]]): Age (minutes) of the event each token
            came from; ``None`` for static and interval tokens.
        static_prefix_len (int): Number of leading static tokens.
    """

    patient_id: str
    tokens: List[int] = field(default_factory=list)
    token_ages: List[Optional[float]] = field(default_factory=list)
    static_prefix_len: int = 0

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TrainingExample:
    """Contiguous token chunk cut from a single patient's timeline."""

    patient_id: str
    tokens: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class TokenStream:
    """
    Flat token array with per-patient start offsets.

    Attributes:
        tokens (List[int]): Concatenated timelines.
        patient_offsets (List[int]): Start index of each patient, strictly increasing, first = 0.
        vocab_size (int): Size of the vocabulary the ids index into.
    """

    tokens: List[int]
    patient_offsets: List[int]
    vocab_size: int

    def __post_init__(self) -> None:
        offsets = self.patient_offsets
        if not offsets or offsets[0] != 0:
            raise ValueError("patient_offsets must start at 0")
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError("patient_offsets must be strictly increasing")
        if offsets[-1] >= len(self.tokens):
            raise ValueError("last patient segment is empty")

    def segments(self) -> List[List[int]]:
        """Split the flat array back into per-patient token lists."""
        bounds = list(self.patient_offsets) + [len(self.tokens)]
        return [list(self.tokens[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]

    @classmethod
    def from_timelines(cls, timelines: List[PatientTimeline], vocab_size: int) -> "TokenStream":
        tokens: List[int] = []
        offsets: List[int] = []
        for tl in timelines:
            offsets.append(len(tokens))
            tokens.extend(tl.tokens)
        return cls(tokens=tokens, patient_offsets=offsets, vocab_size=vocab_size)


@dataclass(frozen=True)
class LengthSummary:
    """Mean/std/min/max and quartiles of a length distribution."""

    mean: float
    std: float
    min: int
    max: int
    q1: float
    q2: float
    q3: float


@dataclass(frozen=True)
class CorpusStats:
    """Corpus statistics laid out like the timeline statistics table."""

    patient_count: int
    timeline_lengths: LengthSummary
    example_lengths: LengthSummary
    total_timeline_tokens: int
    total_examples: int
    total_trainable_tokens: int


@dataclass
class SyntheticCohortConfig:
    """
    Knobs of the synthetic cohort generator.

    Attributes:
        n_patients (int): Number of patients to generate.
        mean_admissions (float): Mean hospital admissions per patient (at least 1).
        labs_per_admission (int): Lab results drawn per admission.
        medication_rate (float): Probability of each medication order per admission.
        icu_rate (float): Probability that an admission includes an ICU stay.
        icu_mortality_hazard (float): Base probability of death per ICU stay at average severity.
        readmission_hazard (float): Base probability of a readmission within 30 days.
        hazard_coupling (float): Log-odds increase of death/readmission per unit of
            abnormal-lab severity (severity is a mean quantile in [0, 1], centred at 0.5).
        start_year_range (Tuple[int, int]): Inclusive range of timeline start years.
        seed (int): Seed for the numpy generator.
    """

    n_patients: int = 200
    mean_admissions: float = 2.5
    labs_per_admission: int = 6
    medication_rate: float = 0.5
    icu_rate: float = 0.4
    icu_mortality_hazard: float = 0.15
    readmission_hazard: float = 0.2
    hazard_coupling: float = 6.0
    start_year_range: Tuple[int, int] = (2008, 2019)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_patients < 1 or self.labs_per_admission < 1:
            raise ValueError("n_patients and labs_per_admission must be positive")
        if self.mean_admissions < 1:
            raise ValueError("mean_admissions must be >= 1")
        for name in ("medication_rate", "icu_rate", "icu_mortality_hazard", "readmission_hazard"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.hazard_coupling < 0:
            raise ValueError("hazard_coupling must be nonnegative")
        self.start_year_range = tuple(self.start_year_range)  # JSON gives lists


@dataclass
class TokenizerConfig:
    """
    Build-phase settings of the tokenize command.

    Attributes:
        bin_count (int): Quantile bins per value group.
        min_group_size (int): Observations a code needs for its own binner.
        max_len (int): Longest training example, in tokens.
        min_len (int): Shortest training example kept.
        split_ratios (Tuple[float, float, float]): Train / validation / test fractions.
        split_seed (int): Seed of the patient shuffle.
    """

    bin_count: int = 10
    min_group_size: int = 50
    max_len: int = 2048
    min_len: int = 32
    split_ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    split_seed: int = 0

    def __post_init__(self) -> None:
        if self.bin_count < 2:
            raise ValueError(f"bin_count must be >= 2, got {self.bin_count}")
        if not self.max_len >= self.min_len >= 1:
            raise ValueError(f"need max_len >= min_len >= 1, got {self.max_len}, {self.min_len}")
        self.split_ratios = tuple(self.split_ratios)


__all__ = [
    "EventKind",
    "ClinicalEvent",
    "PatientTimeline",
    "TrainingExample",
    "TokenStream",
    "LengthSummary",
    "CorpusStats",
    "SyntheticCohortConfig",
    "TokenizerConfig",
    "MINUTES_PER_DAY",
    "MINUTES_PER_YEAR",
]
