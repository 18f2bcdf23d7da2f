# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Splitting kernels for hierarchical clinical codes: ICD-10, ICD-10-PCS, ATC.

Each splitter turns one code into at most three prefix-level tokens, coarse
to fine, so a code carries its position in the hierarchy. Non-hierarchical
systems (local lab codes, DRGs) go through :class:`FlatSplitter`.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from timeline_generator.format import code_token, normalize_code
from timeline_generator.models import EventKind

MAX_CODE_TOKENS: int = 3


class Splitter:  # pylint: disable=too-few-public-methods
    """Abstract base interface for all code splitters."""

    name: str
    prefix_lengths: Tuple[int, ...] = ()

    def split(self, code: str) -> List[str]:
        """Decompose ``code`` into token texts, coarsest first."""
        code = normalize_code(code)
        if not code:
            return []
        cuts = sorted({n for n in self.prefix_lengths if n < len(code)} | {len(code)})
        return [code_token(self.name, code[:n]) for n in cuts[-MAX_CODE_TOKENS:]]


class AtcSplitter(Splitter):  # pylint: disable=too-few-public-methods
    """ATC levels 1, 3 and 5: ``B01AC06 -> B, B01A, B01AC06``."""

    name = "ATC"
    prefix_lengths = (1, 4)


class IcdSplitter(Splitter):  # pylint: disable=too-few-public-methods
    """ICD-10-CM chapter letter, three-character category, full code."""

    name = "ICD"
    prefix_lengths = (1, 3)


class PcsSplitter(Splitter):  # pylint: disable=too-few-public-methods
    """ICD-10-PCS section, section+body system+operation, full code."""

    name = "PCS"
    prefix_lengths = (1, 3)


class FlatSplitter(Splitter):  # pylint: disable=too-few-public-methods
    """One token for the whole code."""

    def __init__(self, name: str) -> None:
        self.name = name

    def split(self, code: str) -> List[str]:
        code = normalize_code(code)
        return [code_token(self.name, code)] if code else []


SPLITTERS: Dict[EventKind, Splitter] = {
    EventKind.DIAGNOSIS: IcdSplitter(),
    EventKind.PROCEDURE: PcsSplitter(),
    EventKind.MEDICATION: AtcSplitter(),
    EventKind.LAB_RESULT: FlatSplitter("LAB"),
    EventKind.VITAL_SIGN: FlatSplitter("VITAL"),
    EventKind.DRG_ASSIGNMENT: FlatSplitter("DRG"),
    EventKind.ADMISSION: FlatSplitter("ADMTYPE"),
    EventKind.DISCHARGE: FlatSplitter("DISCH"),
    EventKind.ICU_ADMISSION: FlatSplitter("ICUTYPE"),
    EventKind.ICU_DISCHARGE: FlatSplitter("ICUDISCH"),
    EventKind.DEMOGRAPHIC: FlatSplitter("DEM"),
}
"""Splitter per event kind; SOFA and Death carry no code tokens."""


def split_code(kind: EventKind, code: str) -> List[str]:
    """Code tokens of an event, or [] for kinds without a code system."""
    splitter = SPLITTERS.get(kind)
    return splitter.split(code) if splitter else []


__all__ = [
    "Splitter",
    "AtcSplitter",
    "IcdSplitter",
    "PcsSplitter",
    "FlatSplitter",
    "SPLITTERS",
    "split_code",
    "MAX_CODE_TOKENS",
]
