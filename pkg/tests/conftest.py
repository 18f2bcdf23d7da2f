"""Shared fixtures: a small vocabulary, hand-built timelines and stub next-token models."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import pytest
import torch
from torch import nn

from timeline_generator.binning import BinnerRegistry, QuantileBinner
from timeline_generator.models import MINUTES_PER_DAY, MINUTES_PER_YEAR, ClinicalEvent, EventKind, PatientTimeline
from timeline_generator.tokenizer import START_YEAR_CODE
from timeline_generator.vocab import Vocabulary, build_vocabulary

AGE_62 = 62 * MINUTES_PER_YEAR


@pytest.fixture
def base_vocab() -> Vocabulary:
    """Reserved tokens only: every kind, every interval and Q1..Q10."""
    return build_vocabulary([])


@pytest.fixture
def registry() -> BinnerRegistry:
    cuts = tuple(float(b) for b in range(1, 10))
    return BinnerRegistry(
        by_kind={
            "LabResult": QuantileBinner(("LabResult", "*"), cuts, 10),
            "SofaScore": QuantileBinner(("SofaScore", "*"), cuts, 10),
        },
        bin_count=10,
    )


@pytest.fixture
def stay_events() -> List[ClinicalEvent]:
    """One admission with an ICU stay, a SOFA score and a DRG stamped at admission."""
    pid = "P1"
    return [
        ClinicalEvent(pid, None, EventKind.DEMOGRAPHIC, "SEX_F"),
        ClinicalEvent(pid, None, EventKind.DEMOGRAPHIC, START_YEAR_CODE, 2013.0),
        ClinicalEvent(pid, AGE_62, EventKind.ADMISSION, "EMERGENCY"),
        ClinicalEvent(pid, AGE_62 + 1.0, EventKind.DRG_ASSIGNMENT, "DRG291"),
        ClinicalEvent(pid, AGE_62 + 20.0, EventKind.LAB_RESULT, "K", 4.5),
        ClinicalEvent(pid, AGE_62 + 60.0, EventKind.ICU_ADMISSION, "MICU"),
        ClinicalEvent(pid, AGE_62 + 120.0, EventKind.SOFA_SCORE, "SOFA", 7.0),
        ClinicalEvent(pid, AGE_62 + 3 * MINUTES_PER_DAY, EventKind.DISCHARGE, "HOME"),
    ]


def timeline_from(
    vocab: Vocabulary, entries: Sequence[Tuple[str, Optional[float]]], patient_id: str = "P1"
) -> PatientTimeline:
    """Timeline from ``(token text, age in minutes)`` pairs."""
    return PatientTimeline(
        patient_id=patient_id,
        tokens=[vocab.encode(text) for text, _ in entries],
        token_ages=[age for _, age in entries],
    )


def icu_timeline(vocab: Vocabulary, patient_id: str = "P1") -> PatientTimeline:
    return timeline_from(
        vocab,
        [("ADMISSION", 0.0), ("INT//1h", None), ("ICU_ADMISSION", 60.0)],
        patient_id,
    )


def readmission_timeline(vocab: Vocabulary, gap_days: float, patient_id: str = "P1") -> PatientTimeline:
    discharge = 2 * MINUTES_PER_DAY
    return timeline_from(
        vocab,
        [
            ("ADMISSION", 0.0),
            ("INT//1d", None),
            ("DISCHARGE", discharge),
            ("INT//3d", None),
            ("ADMISSION", discharge + gap_days * MINUTES_PER_DAY),
        ],
        patient_id,
    )


def _logits_for(tokens: torch.Tensor, vocab_size: int, allowed: Sequence[int]) -> torch.Tensor:
    if tokens.dim() == 1:
        tokens = tokens.unsqueeze(0)
    out = torch.full((tokens.shape[0], tokens.shape[1], vocab_size), -1e9)
    out[..., list(allowed)] = 0.0
    return out


class ConstantModel(nn.Module):
    """Always emits ``token``."""

    def __init__(self, vocab_size: int, token: int) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.token = token

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        return _logits_for(tokens, self.vocab_size, [self.token])


class UniformModel(nn.Module):
    """Picks uniformly among ``choices``."""

    def __init__(self, vocab_size: int, choices: Sequence[int]) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.choices = list(choices)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        return _logits_for(tokens, self.vocab_size, self.choices)


class ScriptedModel(nn.Module):
    """Emits ``script`` in order, then repeats its last token."""

    def __init__(self, vocab_size: int, script: Sequence[int]) -> None:
        super().__init__()
        self.vocab_size = vocab_size
        self.script = list(script)
        self.calls = 0

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        tok = self.script[min(self.calls, len(self.script) - 1)]
        self.calls += 1
        return _logits_for(tokens, self.vocab_size, [tok])
