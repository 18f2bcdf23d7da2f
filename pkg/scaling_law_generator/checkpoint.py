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
Checkpoint and loss-curve files.

A checkpoint is a text header of ``key=value`` lines closed by a ``---``
line, followed by every tensor of the model's ``state_dict`` (in its
order) as raw little-endian float32. Header keys are the `ModelConfig`
fields plus free-form metadata prefixed with ``meta.``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd
import torch

from scaling_law_generator.config import ModelConfig
from scaling_law_generator.model import MicroLlama

SEPARATOR = b"---\n"
META_PREFIX = "meta."


def save_checkpoint(
    model: MicroLlama,
    path: Union[str, Path],
    meta: Optional[Dict[str, object]] = None,
) -> None:
    """Write ``model`` with optional metadata (validation loss, step, ...)."""
    lines = [f"{k}={v}" for k, v in model.config.to_dict().items()]
    lines += [f"{META_PREFIX}{k}={v}" for k, v in sorted((meta or {}).items())]
    header = ("\n".join(lines) + "\n").encode("utf-8")
    body = b"".join(
        t.detach().cpu().numpy().astype("<f4", copy=False).tobytes() for t in model.state_dict().values()
    )
    Path(path).write_bytes(header + SEPARATOR + body)


def _parse_header(text: str) -> Tuple[Dict[str, str], Dict[str, str]]:
    fields: Dict[str, str] = {}
    meta: Dict[str, str] = {}
    for line in text.splitlines():
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"checkpoint header line without '=': {line!r}")
        if key.startswith(META_PREFIX):
            meta[key[len(META_PREFIX):]] = value
        else:
            fields[key] = value
    return fields, meta


def load_checkpoint(path: Union[str, Path]) -> Tuple[MicroLlama, Dict[str, str]]:
    """Rebuild the model stored at ``path``; also return its metadata.

    Raises:
        ValueError: On a missing separator or a body that does not match the config.
    """
    data = Path(path).read_bytes()
    cut = data.find(b"\n" + SEPARATOR)
    if data.startswith(SEPARATOR):
        cut = -1
    elif cut < 0:
        raise ValueError(f"{path}: no header separator")
    header, body = data[: cut + 1], data[cut + 1 + len(SEPARATOR):]
    fields, meta = _parse_header(header.decode("utf-8"))
    model = MicroLlama(ModelConfig.from_dict(fields))

    expected = sum(t.numel() for t in model.state_dict().values()) * 4
    if len(body) != expected:
        raise ValueError(f"{path}: body holds {len(body)} bytes, config needs {expected}")
    flat = np.frombuffer(body, dtype="<f4")
    state, pos = {}, 0
    for name, t in model.state_dict().items():
        n = t.numel()
        state[name] = torch.from_numpy(flat[pos:pos + n].astype(np.float32)).view(t.shape)
        pos += n
    model.load_state_dict(state)
    model.eval()
    return model, meta


def save_loss_curve(curve: pd.DataFrame, path: Union[str, Path]) -> None:
    curve.to_csv(path, index=False, columns=["step", "split", "loss"], lineterminator="\n")


def load_loss_curve(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)


__all__ = ["save_checkpoint", "load_checkpoint", "save_loss_curve", "load_loss_curve"]
