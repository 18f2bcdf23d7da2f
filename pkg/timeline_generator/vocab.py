# ---------------------------------------------------------------------
# Copyright 2026 The EHR Scaling Lab contributors
#
# Redistribution and use in source and binary forms, with or without modification, are permitted provided that the following conditions are met:
# 1. Redistributions of source code must retain the above copyright notice, this list of conditions and the following disclaimer.
# 2. Redistributions in binary form must reproduce the above copyright notice, this list of conditions and the following disclaimer in the documentation and/or other materials provided with the distribution.
# 3. Neither the name of the copyright holder nor the names of its contributors may be used to endorse or promote products derived from this software without specific prior written permission.
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
# ---------------------------------------------------------------------


"""Token vocabulary: a dense bijection between token text and integer ids."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

from timeline_generator.format import interval_token, kind_token, quantile_token
from timeline_generator.intervals import DEFAULT_LADDER, IntervalLadder
from timeline_generator.models import EventKind


class UnknownTokenError(KeyError):
    """Token text or id outside the vocabulary (vocabulary/build mismatch)."""


SPECIAL_KINDS = {
    "death": EventKind.DEATH,
    "discharge": EventKind.DISCHARGE,
    "admission": EventKind.ADMISSION,
    "icu_admission": EventKind.ICU_ADMISSION,
    "icu_discharge": EventKind.ICU_DISCHARGE,
}
"""Named special tokens, each the opening token of its event kind."""


def reserved_tokens(ladder: IntervalLadder = DEFAULT_LADDER, bin_count: int = 10) -> List[str]:
    """Tokens every vocabulary holds, in fixed order: kinds, intervals, quantiles."""
    out = [kind_token(kind) for kind in EventKind]
    out += [interval_token(lbl) for lbl in ladder.labels]
    out += [quantile_token(b) for b in range(bin_count)]
    return out


@dataclass
class Vocabulary:
    """
    Bijective token-text <-> id map.

    Attributes:
        itos (List[str]): Token text by id.
        ladder (IntervalLadder): Interval classes whose tokens are registered.
    """

    itos: List[str]
    ladder: IntervalLadder = DEFAULT_LADDER
    stoi: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.stoi = {s: i for i, s in enumerate(self.itos)}
        if len(self.stoi) != len(self.itos):
            raise ValueError("duplicate token text in vocabulary")
        missing = [kind_token(k) for k in SPECIAL_KINDS.values() if kind_token(k) not in self.stoi]
        missing += [interval_token(lbl) for lbl in self.ladder.labels if interval_token(lbl) not in self.stoi]
        if missing:
            raise ValueError(f"vocabulary lacks special tokens: {missing}")

    # ── lookups ──────────────────────────────────────────────────────────────
    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, text: str) -> bool:
        return text in self.stoi

    def encode(self, text: str) -> int:
        try:
            return self.stoi[text]
        except KeyError:
            raise UnknownTokenError(text) from None

    def decode(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.itos):
            raise UnknownTokenError(token_id)
        return self.itos[token_id]

    def encode_many(self, texts: Iterable[str]) -> List[int]:
        return [self.encode(t) for t in texts]

    def decode_many(self, ids: Iterable[int]) -> List[str]:
        return [self.decode(i) for i in ids]

    # ── special tokens ───────────────────────────────────────────────────────
    def special(self, name: str) -> int:
        """Id of a named special token (``"death"``, ``"discharge"``, ...)."""
        return self.stoi[kind_token(SPECIAL_KINDS[name])]

    @property
    def specials(self) -> Dict[str, int]:
        return {name: self.special(name) for name in SPECIAL_KINDS}

    def interval_id(self, class_index: int) -> int:
        return self.stoi[interval_token(self.ladder.labels[class_index])]

    @property
    def interval_minutes(self) -> Dict[int, float]:
        """Nominal duration of every interval token id."""
        return {self.interval_id(i): m for i, m in enumerate(self.ladder.minutes)}

    # ── persistence ──────────────────────────────────────────────────────────
    def to_text(self) -> str:
        return "".join(f"{i}\t{s}\n" for i, s in enumerate(self.itos))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_bytes(self.to_text().encode("utf-8"))

    @classmethod
    def from_text(cls, text: str, ladder: IntervalLadder = DEFAULT_LADDER) -> "Vocabulary":
        itos: List[str] = []
        for line_no, line in enumerate(text.split("\n"), start=1):
            if not line:
                continue
            idx, _, token = line.partition("\t")
            if int(idx) != len(itos):
                raise ValueError(f"vocabulary line {line_no}: id {idx} is not dense")
            itos.append(token)
        return cls(itos=itos, ladder=ladder)

    @classmethod
    def load(cls, path: Union[str, Path], ladder: IntervalLadder = DEFAULT_LADDER) -> "Vocabulary":
        return cls.from_text(Path(path).read_bytes().decode("utf-8"), ladder)


def build_vocabulary(
    token_texts: Iterable[Sequence[str]],
    ladder: IntervalLadder = DEFAULT_LADDER,
    bin_count: int = 10,
) -> Vocabulary:
    """Reserved tokens first, then every other observed token sorted lexicographically."""
    reserved = reserved_tokens(ladder, bin_count)
    seen = set(reserved)
    observed = {t for seq in token_texts for t in seq if t not in seen}
    return Vocabulary(itos=reserved + sorted(observed), ladder=ladder)


__all__ = ["Vocabulary", "UnknownTokenError", "SPECIAL_KINDS", "build_vocabulary", "reserved_tokens"]
