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
Binary token-stream files and their per-patient sidecar table.

Stream layout (all integers little-endian)::

    b"EHRT"            magic
    u8                 format version (1)
    u32                vocabulary size
    u64                patient count P
    u64 * P            patient offsets
    u32 * T            tokens (T = rest of the file / 4)

The sidecar ``patients.csv`` holds one row per patient, in stream order:
``patient_id, split, offset, length, mortality_label, readmission_label``.
Labels are empty when the patient has no anchor for the task.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

import numpy as np
import pandas as pd

from timeline_generator.models import TokenStream

MAGIC = b"EHRT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sBIQ")

PATIENT_COLUMNS = ("patient_id", "split", "offset", "length", "mortality_label", "readmission_label")


def encode_stream(stream: TokenStream) -> bytes:
    """Serialize a stream to bytes in the layout above."""
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, stream.vocab_size, len(stream.patient_offsets))
    offsets = np.asarray(stream.patient_offsets, dtype="<u8").tobytes()
    tokens = np.asarray(stream.tokens, dtype="<u4").tobytes()
    return header + offsets + tokens


def decode_stream(data: bytes) -> TokenStream:
    """Parse bytes produced by `encode_stream`.

    Raises:
        ValueError: On a bad magic, unknown version, truncated body or a token
            id outside the declared vocabulary.
    """
    if len(data) < _HEADER.size:
        raise ValueError("token stream is shorter than its header")
    magic, version, vocab_size, n_patients = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"not a token stream (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported token stream version {version}")
    body = _HEADER.size + 8 * n_patients
    if len(data) < body or (len(data) - body) % 4:
        raise ValueError("token stream body is truncated")
    offsets = np.frombuffer(data, dtype="<u8", count=n_patients, offset=_HEADER.size)
    tokens = np.frombuffer(data, dtype="<u4", offset=body)
    if tokens.size and int(tokens.max()) >= vocab_size:
        raise ValueError(f"token id {int(tokens.max())} outside vocabulary of {vocab_size}")
    return TokenStream(
        tokens=[int(t) for t in tokens],
        patient_offsets=[int(o) for o in offsets],
        vocab_size=int(vocab_size),
    )


def save_stream(stream: TokenStream, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_stream(stream))


def load_stream(path: Union[str, Path]) -> TokenStream:
    return decode_stream(Path(path).read_bytes())


def patient_table(
    patient_ids: Iterable[str],
    stream: TokenStream,
    splits: Mapping[str, str],
    mortality: Optional[Mapping[str, Optional[int]]] = None,
    readmission: Optional[Mapping[str, Optional[int]]] = None,
) -> pd.DataFrame:
    """Sidecar rows for ``patient_ids`` (given in stream order).

    Args:
        patient_ids: Ids in the order their timelines sit in ``stream``.
        stream: The token stream.
        splits: Patient id -> split name.
        mortality: Patient id -> ICU-mortality label (``None`` if no anchor).
        readmission: Patient id -> 30-day readmission label.
    """
    ids = list(patient_ids)
    if len(ids) != len(stream.patient_offsets):
        raise ValueError(f"{len(ids)} patient ids for {len(stream.patient_offsets)} stream segments")
    bounds = list(stream.patient_offsets) + [len(stream.tokens)]
    mortality = mortality or {}
    readmission = readmission or {}
    frame = pd.DataFrame(
        {
            "patient_id": ids,
            "split": [splits[pid] for pid in ids],
            "offset": bounds[:-1],
            "length": [b - a for a, b in zip(bounds[:-1], bounds[1:])],
            "mortality_label": pd.array([mortality.get(pid) for pid in ids], dtype="Int64"),
            "readmission_label": pd.array([readmission.get(pid) for pid in ids], dtype="Int64"),
        }
    )
    return frame[list(PATIENT_COLUMNS)]


def save_patient_table(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    frame.to_csv(path, index=False, lineterminator="\n")


def load_patient_table(path: Union[str, Path]) -> pd.DataFrame:
    frame = pd.read_csv(
        path,
        dtype={"patient_id": str, "split": str, "offset": "int64", "length": "int64"},
        keep_default_na=False,
        na_values={"mortality_label": [""], "readmission_label": [""]},
    )
    missing = [c for c in PATIENT_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    for col in ("mortality_label", "readmission_label"):
        frame[col] = frame[col].astype("Int64")
    return frame


__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "PATIENT_COLUMNS",
    "encode_stream",
    "decode_stream",
    "save_stream",
    "load_stream",
    "patient_table",
    "save_patient_table",
    "load_patient_table",
]
