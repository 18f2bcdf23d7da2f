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
Run manifests and the output-directory lock.

Every command writes ``manifest-<command>.json`` into its output directory:
the command, config digest, seed, tool version, timestamps and a sha256
digest of every artifact. ``verify_manifest`` recomputes the digests.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Union

logger = logging.getLogger(__name__)

LOCK_NAME = ".ehr-scaling.lock"


class OutputLockedError(RuntimeError):
    """Another run holds the output directory."""


def file_digest(path: Union[str, Path], chunk: int = 1 << 20) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(chunk), b""):
            h.update(block)
    return h.hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """
    Provenance of one command run.

    Attributes:
        command (str): Subcommand name.
        config_digest (str): sha256 of the resolved configuration.
        seed (Optional[int]): ``--seed`` flag, if given.
        tool_version (str): Package version.
        outputs (Dict[str, str]): Artifact path relative to the output directory -> sha256.
        started_at (str): UTC ISO timestamp.
        finished_at (str): UTC ISO timestamp, set by `finish`.
    """

    command: str
    config_digest: str
    seed: Optional[int]
    tool_version: str
    outputs: Dict[str, str] = field(default_factory=dict)
    started_at: str = field(default_factory=_now)
    finished_at: str = ""

    def record(self, out_dir: Union[str, Path], path: Union[str, Path]) -> None:
        """Add the digest of ``path`` (inside ``out_dir``)."""
        out_dir, path = Path(out_dir), Path(path)
        self.outputs[path.relative_to(out_dir).as_posix()] = file_digest(path)

    def finish(self) -> None:
        self.finished_at = _now()

    def path_in(self, out_dir: Union[str, Path]) -> Path:
        return Path(out_dir) / f"manifest-{self.command}.json"

    def save(self, out_dir: Union[str, Path]) -> Path:
        path = self.path_in(out_dir)
        data = asdict(self)
        data["outputs"] = dict(sorted(self.outputs.items()))
        path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as f:
            return cls(**json.load(f))


def verify_manifest(manifest: RunManifest, out_dir: Union[str, Path]) -> List[str]:
    """Artifacts whose current digest differs from the recorded one (missing files included)."""
    out_dir = Path(out_dir)
    bad: List[str] = []
    for rel, digest in sorted(manifest.outputs.items()):
        path = out_dir / rel
        if not path.is_file() or file_digest(path) != digest:
            bad.append(rel)
    return bad


@contextmanager
def output_lock(out_dir: Union[str, Path]) -> Iterator[Path]:
    """Hold an exclusive lock file in ``out_dir`` for the duration of a run.

    Raises:
        OutputLockedError: If the lock file already exists.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise OutputLockedError(f"{out_dir} is in use by another run (remove {lock} if stale)") from None
    try:
        os.write(fd, str(os.getpid()).encode("ascii"))
        os.close(fd)
        yield lock
    finally:
        lock.unlink(missing_ok=True)


__all__ = ["RunManifest", "OutputLockedError", "file_digest", "verify_manifest", "output_lock", "LOCK_NAME"]
